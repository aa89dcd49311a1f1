"""Nonlocal Means on small dense matrices and the WV/spectrogram patch-distance check."""

from __future__ import annotations

import numpy as np

from ..errors import InvalidArgumentError
from ..tfr import TFR, gaussian_smooth_tfr, matched_wv_smoothing


def _patch_kernel(sigma: float) -> tuple[np.ndarray, int]:
    r = int(np.floor(3.0 * sigma))
    d = np.arange(-r, r + 1, dtype=float)
    g = np.exp(-(d[:, None] ** 2 + d[None, :] ** 2) / (2.0 * sigma**2))
    return g / g.sum(), r


def patch_distances(v: np.ndarray, sigma: float) -> np.ndarray:
    """All-pairs ``F(x, y) = sum_z G(z) (v(x+z) - v(y+z))^2`` with reflective borders."""
    g, r = _patch_kernel(sigma)
    padded = np.pad(v, r, mode="symmetric")
    patches = np.lib.stride_tricks.sliding_window_view(padded, g.shape)
    P = patches.reshape(v.size, -1)
    gw = g.ravel()
    sq = (P**2) @ gw
    F = sq[:, None] + sq[None, :] - 2.0 * (P * gw) @ P.T
    np.maximum(F, 0.0, out=F)
    np.fill_diagonal(F, 0.0)
    return F


def nlmeans(v: TFR, h: float, sigma_patch: float) -> TFR:
    """Nonlocal Means over the whole grid; memory and time are O((MN)^2)."""
    if not (h > 0 and sigma_patch > 0):
        raise InvalidArgumentError("h and sigma_patch must be positive")
    x = np.asarray(v.values, dtype=float)
    F = patch_distances(x, sigma_patch)
    w = np.exp(-F / h**2)
    out = (w @ x.ravel()) / w.sum(axis=1)
    return v.with_values(out.reshape(x.shape))


def _same_grid(a: TFR, b: TFR) -> bool:
    return (a.shape == b.shape and np.allclose(a.t_axis, b.t_axis)
            and np.allclose(a.f_axis, b.f_axis))


def f_correspondence(WV: TFR, sigma: float, S: TFR, n_pairs: int = 500,
                     region: tuple[slice, slice] | None = None, seed: int = 0,
                     pairs: np.ndarray | None = None) -> float:
    """Max relative gap between the smoothed-WV patch distance and ``(S(x) - S(y))^2``.

    ``sigma`` is the standard deviation (samples) of the Gaussian analysis
    window used for ``S``; the WV is smoothed with that window's own WV.
    Pairs are drawn uniformly from ``region`` unless given explicitly as an
    ``(n, 4)`` array of ``(row_x, col_x, row_y, col_y)``.
    """
    if WV.kind != "wigner-ville" or not _same_grid(WV, S):
        raise InvalidArgumentError("WV and S must be a Wigner-Ville/spectrogram pair on one grid")
    fs = WV.meta["fs"]
    sigma_t, sigma_f = matched_wv_smoothing(sigma, fs)
    smoothed = gaussian_smooth_tfr(WV, sigma_t, sigma_f).values
    s = np.asarray(S.values, dtype=float)
    if pairs is None:
        rows, cols = region if region is not None else (slice(None), slice(None))
        r_idx = np.arange(s.shape[0])[rows]
        c_idx = np.arange(s.shape[1])[cols]
        rng = np.random.default_rng(seed)
        pairs = np.column_stack([
            rng.choice(r_idx, n_pairs), rng.choice(c_idx, n_pairs),
            rng.choice(r_idx, n_pairs), rng.choice(c_idx, n_pairs)])
    pairs = np.asarray(pairs)
    xr, xc, yr, yc = pairs.T
    f_wv = (smoothed[xr, xc] - smoothed[yr, yc]) ** 2
    f_s = (s[xr, xc] - s[yr, yc]) ** 2
    return float(np.max(np.abs(f_wv - f_s) / (1.0 + f_s)))
