"""Estimation and detection quality measures: NMSE, PSK hard decisions, SER."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import psk_alphabet


@dataclass(frozen=True)
class TrialMetrics:
    """Scores of a single Monte Carlo trial.

    ``ser`` is ``None`` for receivers that do not decode data (the pilot
    baseline estimates the channel only).
    """

    nmse_channel: float
    ser: float | None
    iterations: int
    converged: bool


def nmse(truth: np.ndarray, estimate: np.ndarray) -> float:
    """Squared Frobenius error of ``estimate`` normalized by ``truth``'s energy."""
    t = np.asarray(truth)
    e = np.asarray(estimate)
    if t.shape != e.shape:
        raise ValueError(f"shape mismatch: truth {t.shape} vs estimate {e.shape}")
    denom = float(np.sum(np.abs(t) ** 2))
    if denom == 0.0:
        raise ValueError("truth has zero norm; NMSE is undefined")
    return float(np.sum(np.abs(e - t) ** 2)) / denom


def psk_detect(soft: np.ndarray, q: int) -> np.ndarray:
    """Nearest-constellation-point indices for Q-PSK.

    Each soft value maps to argmin_m |soft - exp(2j*pi*m/q)|; exact ties go
    to the lower index.
    """
    if q < 2:
        raise ValueError("PSK order must be at least 2")
    d = np.abs(np.asarray(soft)[..., None] - psk_alphabet(q))
    return np.argmin(d, axis=-1)


def ser(x_true: np.ndarray, soft: np.ndarray, q: int) -> float:
    """Symbol error rate over the data slots, uniform across users.

    Slot 1 is the known reference and is excluded; with fewer than two slots
    there is no data to score.
    """
    xt = np.asarray(x_true)
    xs = np.asarray(soft)
    if xt.shape != xs.shape:
        raise ValueError(f"shape mismatch: truth {xt.shape} vs soft {xs.shape}")
    if xt.shape[1] < 2:
        raise ValueError("SER needs at least one data slot beyond the reference")
    detected = psk_detect(xs[:, 1:], q)
    reference = psk_detect(xt[:, 1:], q)
    return float(np.mean(detected != reference))
