"""Alternating least-squares semi-blind receiver and the pilot-assisted baseline.

The receiver knows the block code C and the switching schedule S_p and
alternates two linear LS problems: channel given symbols (through the
stacked sensing matrix W) and symbols given channel (through the stacked
block responses Z). The per-user scaling ambiguity of the bilinear fit is
resolved afterwards with the known all-ones reference slot.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateEstimateError, IdentifiabilityError
from .linalg import pinv_counted, unvec
from .model import psk_alphabet


@dataclass(frozen=True)
class BalsOptions:
    """Controls for the alternating estimation loop.

    ``delta`` is the absolute stop threshold on successive values of the
    normalized squared reconstruction error; ``init_policy`` is
    ``"random-symbols"`` (draw the starting symbol matrix uniformly from the
    Q-PSK alphabet) or ``"ground-truth"`` (start from ``x_init``; meant for
    tests, where it makes the alternation an immediate fixed point).
    """

    delta: float = 1e-6
    max_iters: int = 500
    mod_order: int = 16
    init_policy: str = "random-symbols"
    x_init: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError("delta must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if self.init_policy not in ("random-symbols", "ground-truth"):
            raise ValueError(f"unknown init_policy {self.init_policy!r}")
        if self.init_policy == "ground-truth" and self.x_init is None:
            raise ValueError("ground-truth init requires x_init")


@dataclass
class BalsResult:
    """Joint estimate produced by :func:`bals`.

    ``x_hat`` holds pre-detection soft symbol values; the scaling ambiguity
    between ``h_hat`` and ``x_hat`` is still present (see
    :func:`remove_ambiguity`). ``cost_history[i]`` is the normalized squared
    reconstruction error after full iteration i+1 and is non-increasing up
    to roundoff. ``truncated_singvals`` counts singular values zeroed by the
    pseudoinverse across all iterations; nonzero values flag rank-deficient
    realizations (e.g. ports never selected by the schedule).
    """

    h_hat: np.ndarray
    x_hat: np.ndarray
    cost_history: list[float]
    iterations: int
    converged: bool
    truncated_singvals: int = 0


def stack_slices(y: np.ndarray) -> np.ndarray:
    """(P, M, T) received tensor -> (P*M, T) vertical stack of the slices."""
    p, m, t = y.shape
    return y.reshape(p * m, t)


def vec_slices(y: np.ndarray) -> np.ndarray:
    """(P, M, T) received tensor -> (T*M*P, 1) stack of the vectorized slices.

    Entry p*T*M + t*M + m is Y_p[m, t], i.e. each slice is column-stacked
    and the blocks are concatenated in order.
    """
    p, m, t = y.shape
    return y.transpose(0, 2, 1).reshape(p * m * t, 1)


def build_w(x: np.ndarray, c: np.ndarray, s: np.ndarray) -> np.ndarray:
    """Sensing matrix mapping vec(H) to the stacked vectorized slices.

    Block p (rows p*T*M .. (p+1)*T*M - 1) is
    (X^T kron I_M) @ (D_p(C) kron S_p), evaluated as the single product
    (X^T @ D_p(C)) kron S_p via the Kronecker mixed-product identity.
    Output shape: (T*M*P, N*K).
    """
    n_blocks, n_ant, n_ports = s.shape
    n_users, n_slots = x.shape
    if c.shape != (n_blocks, n_users):
        raise ValueError(
            f"coding matrix shape {c.shape} does not match "
            f"(n_blocks, n_users) = {(n_blocks, n_users)}"
        )
    return np.vstack(
        [np.kron(x.T * c[p][None, :], s[p]) for p in range(n_blocks)]
    )


def build_z(h: np.ndarray, c: np.ndarray, s: np.ndarray) -> np.ndarray:
    """Stack of the per-block responses S_p @ H @ D_p(C), shape (P*M, K).

    Right-multiplied by the symbol matrix it reproduces the stacked
    noiseless slices.
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
    return np.vstack([s[p] @ (h * c[p][None, :]) for p in range(n_blocks)])


def _channel_ls(w, y, n_ports, n_users):
    if w.shape[0] < w.shape[1]:
        raise IdentifiabilityError(
            f"channel LS needs TMP >= NK, got TMP={w.shape[0]} < NK={w.shape[1]}"
        )
    if w.shape[1] != n_ports * n_users:
        raise ValueError(
            f"sensing matrix has {w.shape[1]} columns, expected "
            f"N*K = {n_ports * n_users}"
        )
    w_pinv, n_trunc = pinv_counted(w)
    h_hat = unvec(w_pinv @ np.reshape(y, (-1, 1)), n_ports, n_users)
    return h_hat, n_trunc


def estimate_channel(w: np.ndarray, y: np.ndarray, n_ports: int, n_users: int) -> np.ndarray:
    """LS channel estimate: unvec of pinv(W) @ y back to N x K.

    ``y`` is the (T*M*P,)-entry stack of the vectorized received slices.
    Raises :class:`IdentifiabilityError` when W has fewer rows than columns.
    """
    return _channel_ls(np.asarray(w), y, n_ports, n_users)[0]


def _symbol_ls(z, y_stacked):
    if z.shape[0] < z.shape[1]:
        raise IdentifiabilityError(
            f"symbol LS needs PM >= K, got PM={z.shape[0]} < K={z.shape[1]}"
        )
    if y_stacked.shape[0] != z.shape[0]:
        raise ValueError(
            f"stacked slices have {y_stacked.shape[0]} rows, expected {z.shape[0]}"
        )
    z_pinv, n_trunc = pinv_counted(z)
    return z_pinv @ y_stacked, n_trunc


def estimate_symbols(z: np.ndarray, y_stacked: np.ndarray) -> np.ndarray:
    """LS symbol estimate pinv(Z) @ Y for the vertically stacked slices.

    Raises :class:`IdentifiabilityError` when Z has fewer rows than columns.
    """
    return _symbol_ls(np.asarray(z), np.asarray(y_stacked))[0]


def bals(
    y: np.ndarray,
    c: np.ndarray,
    s: np.ndarray,
    opts: BalsOptions = BalsOptions(),
    rng: np.random.Generator | None = None,
) -> BalsResult:
    """Joint channel/symbol estimation by bilinear alternating least squares.

    Each iteration rebuilds the sensing matrix from the current symbol
    estimate, solves the channel LS problem, then solves the symbol LS
    problem, and records the normalized squared reconstruction error

        cost = sum_p ||Y_p - S_p @ H_hat @ D_p(C) @ X_hat||_F^2 / sum_p ||Y_p||_F^2.

    The loop stops once two consecutive costs differ by less than
    ``opts.delta`` (converged) or after ``opts.max_iters`` iterations.

    Parameters
    ----------
    y : (P, M, T) complex array of received slices.
    c : (P, K) known block coding matrix.
    s : (P, M, N) known switching schedule.
    opts : loop controls; see :class:`BalsOptions`.
    rng : random stream for the symbol initialization (required for the
        ``random-symbols`` policy).
    """
    n_blocks, n_ant, n_slots = y.shape
    n_ports = s.shape[2]
    n_users = c.shape[1]
    if not np.all(np.isfinite(y)):
        raise ValueError("received tensor contains non-finite entries")
    tmp = n_slots * n_ant * n_blocks
    nk = n_ports * n_users
    pm = n_blocks * n_ant
    if tmp < nk:
        raise IdentifiabilityError(f"TMP >= NK required, got TMP={tmp} < NK={nk}")
    if pm < n_users:
        raise IdentifiabilityError(f"PM >= K required, got PM={pm} < K={n_users}")

    if opts.init_policy == "ground-truth":
        x_hat = np.array(opts.x_init, dtype=np.complex128)
        if x_hat.shape != (n_users, n_slots):
            raise ValueError(
                f"x_init shape {x_hat.shape} does not match (K, T) = "
                f"{(n_users, n_slots)}"
            )
    else:
        if rng is None:
            raise ValueError("random-symbols init requires an rng")
        alphabet = psk_alphabet(opts.mod_order)
        x_hat = alphabet[rng.integers(0, opts.mod_order, size=(n_users, n_slots))]

    y_vec = vec_slices(y)
    y_stk = stack_slices(y)
    y_norm2 = float(np.sum(np.abs(y) ** 2))
    history: list[float] = []
    n_trunc = 0
    converged = False
    h_hat = np.zeros((n_ports, n_users), dtype=np.complex128)
    for _ in range(opts.max_iters):
        w = build_w(x_hat, c, s)
        h_hat, t_w = _channel_ls(w, y_vec, n_ports, n_users)
        z = build_z(h_hat, c, s)
        x_hat, t_z = _symbol_ls(z, y_stk)
        n_trunc += t_w + t_z
        cost = float(np.sum(np.abs(y_stk - z @ x_hat) ** 2)) / y_norm2
        if not np.isfinite(cost):
            raise FloatingPointError(
                "reconstruction cost became non-finite; the alternation diverged"
            )
        history.append(cost)
        if len(history) >= 2 and abs(history[-1] - history[-2]) < opts.delta:
            converged = True
            break
    return BalsResult(h_hat, x_hat, history, len(history), converged, n_trunc)


def remove_ambiguity(h_hat: np.ndarray, x_hat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Resolve the per-user scaling using the known all-ones reference slot.

    Row k of the symbol estimate is divided by its slot-1 entry and column k
    of the channel estimate is multiplied by it, leaving every reconstructed
    slice S_p @ H @ D_p(C) @ X unchanged. Raises
    :class:`DegenerateEstimateError` when a slot-1 estimate is (near) zero.
    """
    lam = np.asarray(x_hat)[:, 0]
    bad = np.abs(lam) < 1e-12
    if np.any(bad):
        raise DegenerateEstimateError(
            "slot-1 symbol estimate is numerically zero for user(s) "
            f"{np.flatnonzero(bad).tolist()}; cannot normalize the scaling"
        )
    return np.asarray(h_hat) * lam[None, :], np.asarray(x_hat) / lam[:, None]


def pilot_ls(y: np.ndarray, x_known: np.ndarray, c: np.ndarray, s: np.ndarray) -> np.ndarray:
    """Pilot-assisted channel estimate: one channel LS with the symbols known.

    No alternation and no scaling ambiguity; this is the training-based
    reference the semi-blind receiver is compared against.
    """
    w = build_w(x_known, c, s)
    return estimate_channel(w, vec_slices(y), s.shape[2], c.shape[1])
