"""Experiment description files (YAML, which includes plain JSON).

Recognized keys:

``n_ports, n_antennas, n_users, n_blocks, n_slots, mod_order, master_seed``
    scenario fields (see :class:`masim.model.SystemConfig`);
``snr_db``
    fixed SNR for ``n_ports`` sweeps (ignored on the ``snr_db`` axis);
    accepts a number, ``.inf`` or the string ``"inf"`` for noiseless runs;
``sweep_axis, sweep_values, n_trials, receivers, output_path``
    the campaign itself;
``name``
    optional label written to the CSV ``experiment`` column.
"""

from __future__ import annotations

import math

import yaml

from .errors import ConfigError
from .model import SystemConfig
from .montecarlo import ExperimentSpec

_SCENARIO_KEYS = (
    "n_ports",
    "n_antennas",
    "n_users",
    "n_blocks",
    "n_slots",
    "mod_order",
    "master_seed",
)
_CAMPAIGN_KEYS = ("sweep_axis", "sweep_values", "n_trials", "receivers", "output_path")
_OPTIONAL_KEYS = ("snr_db", "name")


def _as_number(value, key):
    if isinstance(value, str):
        if value.lower() in ("inf", "infinity", ".inf"):
            return math.inf
        raise ConfigError(f"{key} must be a number, got {value!r}")
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key} must be a number, got {value!r}")
    return value


def _as_count(value, key):
    v = _as_number(value, key)
    if not isinstance(v, int):
        raise ConfigError(f"{key} must be an integer, got {value!r}")
    return v


def load_spec(path: str, master_seed_override: int | None = None) -> ExperimentSpec:
    """Parse an experiment file into an :class:`ExperimentSpec`.

    Raises :class:`ConfigError` for unknown or missing keys and malformed
    values; structural constraints beyond parsing are enforced later by
    ``validate_spec``.
    """
    try:
        with open(path) as f:
            raw = yaml.safe_load(f)
    except yaml.YAMLError as err:
        raise ConfigError(f"cannot parse {path}: {err}") from err
    if not isinstance(raw, dict):
        raise ConfigError(f"{path} must hold a mapping of config keys")

    known = set(_SCENARIO_KEYS) | set(_CAMPAIGN_KEYS) | set(_OPTIONAL_KEYS)
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")
    missing = sorted(k for k in (*_SCENARIO_KEYS, *_CAMPAIGN_KEYS) if k not in raw)
    if missing:
        raise ConfigError(f"missing config key(s): {', '.join(missing)}")

    sweep_axis = raw["sweep_axis"]
    if sweep_axis == "n_ports" and "snr_db" not in raw:
        raise ConfigError("snr_db is required for n_ports sweeps")
    snr_db = float(_as_number(raw["snr_db"], "snr_db")) if "snr_db" in raw else math.inf

    base = SystemConfig(
        n_ports=_as_count(raw["n_ports"], "n_ports"),
        n_antennas=_as_count(raw["n_antennas"], "n_antennas"),
        n_users=_as_count(raw["n_users"], "n_users"),
        n_blocks=_as_count(raw["n_blocks"], "n_blocks"),
        n_slots=_as_count(raw["n_slots"], "n_slots"),
        mod_order=_as_count(raw["mod_order"], "mod_order"),
        snr_db=snr_db,
        master_seed=(
            master_seed_override
            if master_seed_override is not None
            else _as_count(raw["master_seed"], "master_seed")
        ),
    )

    values = raw["sweep_values"]
    if not isinstance(values, (list, tuple)):
        raise ConfigError("sweep_values must be a list")
    if sweep_axis == "n_ports":
        sweep_values = tuple(_as_count(v, "sweep_values") for v in values)
    else:
        sweep_values = tuple(float(_as_number(v, "sweep_values")) for v in values)

    receivers = raw["receivers"]
    if not isinstance(receivers, (list, tuple)) or not all(
        isinstance(r, str) for r in receivers
    ):
        raise ConfigError("receivers must be a list of receiver names")

    return ExperimentSpec(
        base=base,
        sweep_axis=sweep_axis,
        sweep_values=sweep_values,
        n_trials=_as_count(raw["n_trials"], "n_trials"),
        receivers=tuple(receivers),
        output_path=str(raw["output_path"]),
        name=str(raw.get("name", "sweep")),
    )
