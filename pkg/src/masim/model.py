"""Scenario generation for the port-switched uplink.

Array conventions used throughout the package:

* switching schedule -- float ``(P, M, N)``, slice ``p`` is the binary
  port-selection matrix of block ``p``;
* channel -- complex ``(N, K)``, column ``k`` is user ``k``'s port gains;
* block code -- complex ``(P, K)``, row ``p`` scales the users in block ``p``;
* symbols -- complex ``(K, T)``, slot 1 (column 0) is the all-ones reference;
* received tensor -- complex ``(P, M, T)``, slice ``p`` is the block-``p``
  base-station observation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .linalg import diag_row


@dataclass(frozen=True)
class SystemConfig:
    """Scenario dimensions and signal parameters.

    Attributes
    ----------
    n_ports : int
        Number of selectable antenna ports N at the base station.
    n_antennas : int
        Number of RF chains M connected to ports through the switch; the
        generators require M <= N.
    n_users : int
        Number of single-antenna uplink users K; the block code requires
        K <= P.
    n_blocks : int
        Number of transmission blocks P. Port selection is constant within
        a block and redrawn between blocks.
    n_slots : int
        Symbol slots T per block; slot 1 carries the all-ones reference used
        to resolve the per-user scaling ambiguity.
    mod_order : int
        PSK constellation size Q (>= 2).
    snr_db : float
        Per-realization signal-to-noise ratio in dB. ``math.inf`` is the
        noiseless sentinel.
    master_seed : int
        Root seed for all campaign randomness.

    Construction only enforces positivity; the cross-field constraints
    (M <= N, K <= P) are enforced by the operations that rely on them and
    by :meth:`validate`, so that identifiability of arbitrary dimension
    tuples can still be queried.
    """

    n_ports: int
    n_antennas: int
    n_users: int
    n_blocks: int
    n_slots: int
    mod_order: int = 16
    snr_db: float = math.inf
    master_seed: int = 0

    def __post_init__(self):
        for name in ("n_ports", "n_antennas", "n_users", "n_blocks", "n_slots"):
            if int(getattr(self, name)) < 1:
                raise ConfigError(f"{name} must be a positive count")
        if self.mod_order < 2:
            raise ConfigError("mod_order must be at least 2")

    def validate(self) -> "SystemConfig":
        """Enforce the cross-field constraints the generators rely on."""
        if self.n_antennas > self.n_ports:
            raise ConfigError(
                f"n_antennas={self.n_antennas} exceeds n_ports={self.n_ports}"
            )
        if self.n_users > self.n_blocks:
            raise ConfigError(
                f"n_users={self.n_users} exceeds n_blocks={self.n_blocks}; "
                "the truncated-DFT block code would lose column rank"
            )
        return self


@dataclass(frozen=True)
class IdentifiabilityReport:
    """Outcome of the least-squares uniqueness check.

    ``obs_rows`` (T*M*P), ``chan_unknowns`` (N*K) and ``sym_rows`` (P*M) are
    the row/column counts of the two LS problems; ``max_users`` is the
    largest user count these dimensions admit.
    """

    ok: bool
    max_users: int
    obs_rows: int
    chan_unknowns: int
    sym_rows: int


def check_identifiability(cfg: SystemConfig) -> IdentifiabilityReport:
    """Evaluate the uniqueness conditions T*M*P >= N*K and P*M >= K.

    Pure predicate: never raises, even for configurations the generators
    would reject. ``max_users = floor(min(T*M*P / N, P*M))``.
    """
    tmp = cfg.n_slots * cfg.n_antennas * cfg.n_blocks
    nk = cfg.n_ports * cfg.n_users
    pm = cfg.n_blocks * cfg.n_antennas
    ok = tmp >= nk and pm >= cfg.n_users
    max_users = int(min(tmp / cfg.n_ports, pm))
    return IdentifiabilityReport(ok, max_users, tmp, nk, pm)


def psk_alphabet(q: int) -> np.ndarray:
    """The Q-PSK constellation exp(2j*pi*m/q), m = 0..q-1."""
    if q < 2:
        raise ConfigError("PSK order must be at least 2")
    return np.exp(2j * np.pi * np.arange(q) / q)


def gen_switching(cfg: SystemConfig, rng: np.random.Generator) -> np.ndarray:
    """Draw the per-block port-selection matrices.

    Each block connects the M antennas to M distinct ports chosen uniformly
    without replacement, so every row of S_p has exactly one 1, every column
    at most one, and S_p @ S_p.conj().T == I_M exactly.
    """
    if cfg.n_antennas > cfg.n_ports:
        raise ConfigError(
            f"cannot select {cfg.n_antennas} distinct ports out of {cfg.n_ports}"
        )
    s = np.zeros((cfg.n_blocks, cfg.n_antennas, cfg.n_ports))
    rows = np.arange(cfg.n_antennas)
    for p in range(cfg.n_blocks):
        ports = rng.choice(cfg.n_ports, size=cfg.n_antennas, replace=False)
        s[p, rows, ports] = 1.0
    return s


def identity_switching(cfg: SystemConfig) -> np.ndarray:
    """Fixed-antenna baseline schedule: S_p = I for every block (needs M == N)."""
    if cfg.n_antennas != cfg.n_ports:
        raise ConfigError(
            "the fixed-antenna baseline requires n_antennas == n_ports, got "
            f"{cfg.n_antennas} != {cfg.n_ports}"
        )
    return np.tile(np.eye(cfg.n_ports), (cfg.n_blocks, 1, 1))


def observed_ports(s: np.ndarray) -> np.ndarray:
    """Boolean mask of ports selected in at least one block of the schedule.

    The dimension inequalities of :func:`check_identifiability` are necessary
    but not sufficient: a realized schedule that never connects some port
    leaves that channel row unobserved (the channel LS problem is then rank
    deficient no matter how long the campaign runs). The probability of this
    is (1 - M/N)**P per port, which is small but not negligible for N >> M.
    """
    return s.sum(axis=(0, 1)) > 0


def gen_channel(cfg: SystemConfig, rng: np.random.Generator) -> np.ndarray:
    """i.i.d. circularly-symmetric complex Gaussian channel, unit variance per entry."""
    shape = (cfg.n_ports, cfg.n_users)
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def gen_coding(cfg: SystemConfig) -> np.ndarray:
    """First K columns of the unnormalized P-point DFT matrix.

    Entries are unit modulus and the columns are orthogonal
    (C^H @ C == P * I_K) whenever K <= P.
    """
    if cfg.n_users > cfg.n_blocks:
        raise ConfigError(
            f"truncated DFT code needs n_users <= n_blocks, got "
            f"{cfg.n_users} > {cfg.n_blocks}"
        )
    p = np.arange(cfg.n_blocks)[:, None]
    k = np.arange(cfg.n_users)[None, :]
    return np.exp(-2j * np.pi * p * k / cfg.n_blocks)


def gen_symbols(cfg: SystemConfig, rng: np.random.Generator) -> np.ndarray:
    """Uniform Q-PSK data symbols with the all-ones reference in slot 1."""
    idx = rng.integers(0, cfg.mod_order, size=(cfg.n_users, cfg.n_slots))
    x = psk_alphabet(cfg.mod_order)[idx]
    x[:, 0] = 1.0
    return x


def synth_received(
    h: np.ndarray,
    c: np.ndarray,
    x: np.ndarray,
    s: np.ndarray,
    snr_db: float,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Simulate the received tensor Y[p] = S_p @ H @ D_p(C) @ X + noise.

    Noise entries are i.i.d. circularly-symmetric complex Gaussian with
    variance ``mean(|signal|^2) * 10**(-snr_db / 10)``, i.e. the SNR is
    defined against this realization's empirical signal power. An infinite
    ``snr_db`` returns the noiseless tensor and never touches ``rng``.
    """
    n_blocks, n_ant, n_ports = s.shape
    n_users = h.shape[1]
    if h.shape[0] != n_ports:
        raise ValueError(
            f"channel has {h.shape[0]} rows but the schedule selects from "
            f"{n_ports} ports"
        )
    if c.shape != (n_blocks, n_users):
        raise ValueError(
            f"coding matrix shape {c.shape} does not match "
            f"(n_blocks, n_users) = {(n_blocks, n_users)}"
        )
    if x.shape[0] != n_users:
        raise ValueError(
            f"symbol matrix has {x.shape[0]} rows for {n_users} users"
        )
    y = np.stack([s[p] @ h @ diag_row(c, p) @ x for p in range(n_blocks)])
    if math.isinf(snr_db):
        return y
    p_sig = float(np.mean(np.abs(y) ** 2))
    sigma2 = p_sig * 10.0 ** (-snr_db / 10.0)
    noise = np.sqrt(sigma2 / 2.0) * (
        rng.standard_normal(y.shape) + 1j * rng.standard_normal(y.shape)
    )
    return y + noise
