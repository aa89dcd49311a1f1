"""Iterated Neighborhood filter on the level-set partition of a quantized image.

With weights frozen at the quantized initial image, every pixel of level ``j``
receives the same value, so one iteration reduces to a (Q+1)-vector update
independent of the pixel count.
"""

from __future__ import annotations

import time

import numpy as np

from ..errors import InvalidArgumentError
from ..quantizer import LevelIndex, build_level_index, quantize
from ..tfr import TFR
from .params import FilterParams, FilterResult


def level_weights(Q: int, h: float) -> np.ndarray:
    """Gray-level affinity ``a[j, k] = exp(-((j - k)/h)^2)``."""
    k = np.arange(Q + 1, dtype=float)
    return np.exp(-(((k[:, None] - k[None, :]) / h) ** 2))


def nf_level_step(index: LevelIndex, level_sums: np.ndarray, h: float,
                  weights: np.ndarray | None = None) -> np.ndarray:
    """Filtered value of every level ``j``: ``<a(j,.), sums> / <a(j,.), counts>``.

    Empty levels are dropped from both scalar products.  A level whose
    weights underflow to zero on every occupied level gets NaN; no pixel
    carries such a level, so the result is never read.
    """
    nz = np.flatnonzero(index.counts)
    if nz.size == 0:
        raise InvalidArgumentError("level index is empty")
    a = weights if weights is not None else level_weights(index.Q, h)
    a = a[:, nz]
    num = a @ np.asarray(level_sums, dtype=float)[nz]
    den = a @ index.counts[nz].astype(float)
    with np.errstate(invalid="ignore", divide="ignore"):
        return num / den


def nf_iterate(S0_image: TFR, params: FilterParams) -> FilterResult:
    t0 = time.perf_counter()
    qs = quantize(S0_image, params.Q)
    index = build_level_index(qs)
    t1 = time.perf_counter()

    counts = index.counts.astype(float)
    occupied = counts > 0
    a = level_weights(params.Q, params.h)
    values = np.arange(params.Q + 1, dtype=float)  # S_0 is the quantized image
    changes = []
    hit_max = False
    if np.count_nonzero(index.counts) > 1:
        while True:
            new = nf_level_step(index, np.where(occupied, counts * values, 0.0), params.h,
                                weights=a)
            c, dv = counts[occupied], (new - values)[occupied]
            diff = np.sqrt(c @ dv**2)
            ref = np.sqrt(c @ values[occupied] ** 2)
            change = float(diff / ref) if ref > 0 else 0.0
            values = new
            changes.append(change)
            if change < params.tol:
                break
            if len(changes) >= params.max_iter:
                hit_max = True
                break
    t2 = time.perf_counter()
    out = values[qs.levels]
    t3 = time.perf_counter()

    return FilterResult(
        image=S0_image.with_values(out, kind="image"),
        iterations=len(changes),
        per_iter_change=changes,
        wall_time=t3 - t0,
        hit_max_iter=hit_max,
        timings={"index": t1 - t0, "iterate": t2 - t1, "relabel": t3 - t2},
    )


def nf_brute_force(S0_image: TFR, Si_image: TFR, h: float) -> TFR:
    """One literal Neighborhood-filter step over all pixel pairs, O((MN)^2).

    Weights come from ``S0_image`` as given; pass the quantized image to
    compare against :func:`nf_iterate`.
    """
    s0 = np.asarray(S0_image.values, dtype=float).ravel()
    si = np.asarray(Si_image.values, dtype=float).ravel()
    if S0_image.shape != Si_image.shape:
        raise InvalidArgumentError("S0 and Si shapes differ")
    w = np.exp(-(((s0[:, None] - s0[None, :]) / h) ** 2))
    out = (w @ si) / w.sum(axis=1)
    return Si_image.with_values(out.reshape(Si_image.shape), kind="image")
