"""Semi-blind joint channel and symbol estimation for port-switched antenna uplinks.

The package splits into:

* :mod:`masim.linalg` -- complex dense kernels (Kronecker, vec/unvec, pinv);
* :mod:`masim.model` -- scenario generation and the received-signal model;
* :mod:`masim.receiver` -- the alternating-LS receiver and pilot baseline;
* :mod:`masim.metrics` -- NMSE, PSK detection, SER;
* :mod:`masim.montecarlo` -- seeded sweep campaigns and CSV persistence;
* :mod:`masim.cli` -- the ``masim`` command.
"""

from .errors import ConfigError, DegenerateEstimateError, IdentifiabilityError
from .linalg import diag_row, fro_norm, kron, pinv, unvec, vec
from .metrics import TrialMetrics, nmse, psk_detect, ser
from .model import (
    IdentifiabilityReport,
    SystemConfig,
    check_identifiability,
    gen_channel,
    gen_coding,
    gen_switching,
    gen_symbols,
    identity_switching,
    observed_ports,
    psk_alphabet,
    synth_received,
)
from .montecarlo import (
    ExperimentSpec,
    SweepRow,
    run_sweep,
    run_trial,
    trial_seed,
)
from .receiver import (
    BalsOptions,
    BalsResult,
    bals,
    build_w,
    build_z,
    estimate_channel,
    estimate_symbols,
    pilot_ls,
    remove_ambiguity,
)

__version__ = "0.1.0"

__all__ = [
    "BalsOptions",
    "BalsResult",
    "ConfigError",
    "DegenerateEstimateError",
    "ExperimentSpec",
    "IdentifiabilityError",
    "IdentifiabilityReport",
    "SweepRow",
    "SystemConfig",
    "TrialMetrics",
    "bals",
    "build_w",
    "build_z",
    "check_identifiability",
    "diag_row",
    "estimate_channel",
    "estimate_symbols",
    "fro_norm",
    "gen_channel",
    "gen_coding",
    "gen_switching",
    "gen_symbols",
    "identity_switching",
    "kron",
    "nmse",
    "observed_ports",
    "pilot_ls",
    "pinv",
    "psk_alphabet",
    "psk_detect",
    "remove_ambiguity",
    "run_sweep",
    "run_trial",
    "ser",
    "synth_received",
    "trial_seed",
    "unvec",
    "vec",
]
