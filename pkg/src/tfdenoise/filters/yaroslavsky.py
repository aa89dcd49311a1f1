"""Iterated Yaroslavsky (SUSAN-type) filter with frozen gray-level weights.

Each pixel needs its own spatially weighted sum, so there is no level-set
shortcut; the per-pixel loop is compiled with numba.
"""

from __future__ import annotations

import math
import time

import numba
import numpy as np

from ..quantizer import quantize
from ..tfr import TFR
from .neighborhood import level_weights
from .params import FilterParams, FilterResult, relative_change


@numba.njit(cache=True, nogil=True)
def _weighted_sums(levels, values, a, gs, radius, want_den):
    """For every pixel x: sum_y gs(|y-x|) * a[level(x), level(y)] * values[y].

    ``gs`` is indexed by the 1-D offset, the 2-D spatial weight being
    ``gs[|dy|] * gs[|dx|]``; only offsets with ``dy^2 + dx^2 <= radius^2``
    contribute.
    """
    M, N = levels.shape
    num = np.zeros((M, N))
    den = np.zeros((M, N)) if want_den else np.zeros((1, 1))
    R = int(math.floor(radius)) if radius < M + N else M + N
    r2 = radius * radius
    for m in range(M):
        dy_lo = max(-R, -m)
        dy_hi = min(R, M - 1 - m)
        for n in range(N):
            arow = a[levels[m, n]]
            acc_num = 0.0
            acc_den = 0.0
            for dy in range(dy_lo, dy_hi + 1):
                w = R if radius >= M + N else int(math.floor(math.sqrt(max(r2 - dy * dy, 0.0))))
                c_lo = max(0, n - w)
                c_hi = min(N - 1, n + w)
                row = m + dy
                rn = 0.0
                rd = 0.0
                for c in range(c_lo, c_hi + 1):
                    wk = gs[abs(c - n)] * arow[levels[row, c]]
                    rn += wk * values[row, c]
                    rd += wk
                gy = gs[abs(dy)]
                acc_num += gy * rn
                acc_den += gy * rd
            num[m, n] = acc_num
            if want_den:
                den[m, n] = acc_den
    return num, den


def yaroslavsky_step(levels: np.ndarray, values: np.ndarray, h: float, rho: float,
                     truncate: bool = True, Q: int = 255) -> np.ndarray:
    """One filter application with weights taken from ``levels``."""
    num, den = _sums(levels, values, level_weights(Q, h), rho, truncate, want_den=True)
    return num / den


def _sums(levels, values, a, rho, truncate, want_den):
    M, N = levels.shape
    d = np.arange(max(M, N), dtype=float)
    gs = np.exp(-((d / rho) ** 2))
    radius = 3.0 * rho if truncate else float(M + N)
    return _weighted_sums(levels.astype(np.int64), np.ascontiguousarray(values, dtype=float),
                          a, gs, radius, want_den)


def yaroslavsky_iterate(S0_image: TFR, params: FilterParams, n_iter: int | None = None) -> FilterResult:
    """Fixed number of iterations (the PDE step count unless ``n_iter`` is given)."""
    n_iter = params.yaroslavsky_iterations() if n_iter is None else int(n_iter)
    t0 = time.perf_counter()
    qs = quantize(S0_image, params.Q)
    a = level_weights(params.Q, params.h)
    t1 = time.perf_counter()

    current = qs.levels.astype(float)
    den = None
    changes = []
    for _ in range(n_iter):
        num, d = _sums(qs.levels, current, a, params.rho, params.truncate, want_den=den is None)
        if den is None:
            den = d
        new = num / den
        changes.append(relative_change(new, current))
        current = new
    t2 = time.perf_counter()

    return FilterResult(
        image=S0_image.with_values(current, kind="image"),
        iterations=n_iter,
        per_iter_change=changes,
        wall_time=t2 - t0,
        timings={"index": t1 - t0, "iterate": t2 - t1},
    )
