"""Exception types shared across the package."""


class ConfigError(ValueError):
    """A scenario or experiment description violates its constraints."""


class IdentifiabilityError(RuntimeError):
    """The dimensions do not admit a unique least-squares solution."""


class DegenerateEstimateError(RuntimeError):
    """An estimate is too close to singular to post-process."""
