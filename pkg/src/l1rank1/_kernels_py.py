"""Pure-Python (numpy) implementations of the hot kernels.

Drop-in fallback for the compiled extension module; selected by
``l1rank1.backend`` when the extension is unavailable or explicitly
disabled.  Semantics (stop codes, recording, integer exactness of the grid
scan) match the compiled versions; floating-point rounding may differ in
the last ulp because numpy reduces sums in a different order.
"""

from __future__ import annotations

from typing import Optional

import numpy as np
from scipy.ndimage import minimum_filter

STOP_CONVERGED = 0
STOP_ZERO_SUBGRADIENT = 1
STOP_MAX_ITERS = 2


def _objective(x: np.ndarray, u: np.ndarray) -> float:
    r = np.outer(x, x) - np.outer(u, u)
    return 0.5 * float(np.abs(r).sum())


def _subgradient(x: np.ndarray, u: np.ndarray) -> np.ndarray:
    r = np.outer(x, x) - np.outer(u, u)
    return np.sign(r) @ x


def _run_loop(u, x0, max_iters, f_tol, record_every, step_fn):
    x = np.array(x0, dtype=np.float64)
    u = np.asarray(u, dtype=np.float64)
    f_hist = np.empty(max_iters + 1, dtype=np.float64)
    recorded = [] if record_every > 0 else None

    f = _objective(x, u)
    f_hist[0] = f
    if recorded is not None:
        recorded.append(x.copy())
    k = 0
    while True:
        if f <= f_tol:
            stop = STOP_CONVERGED
            break
        if k >= max_iters:
            stop = STOP_MAX_ITERS
            break
        g = _subgradient(x, u)
        gg = float(g @ g)
        if gg == 0.0:
            stop = STOP_ZERO_SUBGRADIENT
            break
        x = x - step_fn(k, f, gg) * g
        k += 1
        f = _objective(x, u)
        f_hist[k] = f
        if recorded is not None and k % record_every == 0:
            recorded.append(x.copy())

    iterates: Optional[np.ndarray] = None
    if recorded is not None:
        if k % record_every != 0:
            recorded.append(x.copy())
        iterates = np.array(recorded)
    return x, f_hist[: k + 1].copy(), stop, iterates


def polyak_loop(u, x0, max_iters: int, f_tol: float, record_every: int = 0):
    """Polyak-step subgradient iteration with known optimal value 0.

    Steps x <- x - (f/|g|^2) g until f <= f_tol, the selected subgradient
    vanishes, or max_iters.  Returns (x_final, f_history, stop_code,
    recorded_iterates).
    """
    return _run_loop(u, x0, max_iters, f_tol, record_every, lambda k, f, gg: f / gg)


def diminishing_loop(u, x0, max_iters: int, f_tol: float, step_c: float, record_every: int = 0):
    """Normalized-direction subgradient iteration with step c/sqrt(k+1)."""
    return _run_loop(
        u,
        x0,
        max_iters,
        f_tol,
        record_every,
        lambda k, f, gg: step_c / np.sqrt(k + 1.0) / np.sqrt(gg),
    )


def grid_scan(u_scaled, step_scaled: int, half_count: int):
    """Exact integer objective table and Moore local-minimum mask.

    Grid points are k*step for k in [-half_count, half_count]^n; all values
    are pre-scaled integers so that comparisons are exact.  The table holds
    T(k) = sum_{i,j} |c_i c_j - U_i U_j| with c = k*step_scaled; a cell is a
    local minimum iff no in-box neighbor within one step per coordinate has
    a strictly smaller T.  Returns (T.ravel(), mask.ravel()).
    """
    u_int = np.asarray(u_scaled, dtype=np.int64)
    n = u_int.shape[0]
    k = int(half_count)
    c = np.arange(-k, k + 1, dtype=np.int64) * np.int64(step_scaled)
    axes = [c.reshape((1,) * i + (-1,) + (1,) * (n - 1 - i)) for i in range(n)]
    side = 2 * k + 1
    table = np.zeros((side,) * n, dtype=np.int64)
    for i in range(n):
        for j in range(n):
            table = table + np.abs(axes[i] * axes[j] - np.int64(u_int[i] * u_int[j]))
    mask = minimum_filter(table, size=3, mode="nearest") == table
    return table.ravel(), mask.ravel().astype(np.uint8)
