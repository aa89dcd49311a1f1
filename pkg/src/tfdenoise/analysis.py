"""Evaluation measures: relative MSE, IF lines, energy profile, spectral subtraction."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError
from .tfr import TFR


def _values(x) -> np.ndarray:
    return np.asarray(x.values if isinstance(x, TFR) else x, dtype=float)


def relative_mse(S_clean, S_filtered) -> float:
    """Frobenius-norm ratio ``||S_c - S_I|| / ||S_c||``."""
    c, f = _values(S_clean), _values(S_filtered)
    if c.shape != f.shape:
        raise InvalidArgumentError(f"shape mismatch {c.shape} vs {f.shape}")
    n = np.linalg.norm(c)
    if n == 0:
        raise InvalidArgumentError("clean image has zero norm")
    return float(np.linalg.norm(c - f) / n)


@dataclass
class IFTrack:
    """Unlinked instantaneous-frequency points, one per component per frame.

    ``n`` is the 1-based ordinal of the component within its frame, counted
    from low to high frequency before the intensity filter is applied.
    """

    t: np.ndarray
    n: np.ndarray
    freq: np.ndarray
    intensity: np.ndarray
    beta: float
    i_min: float

    def __len__(self):
        return self.t.size

    def frame_counts(self, n_frames: int, t_axis: np.ndarray) -> np.ndarray:
        idx = np.searchsorted(t_axis, self.t)
        return np.bincount(idx, minlength=n_frames)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "n", "freq_hz", "intensity"])
            for row in zip(self.t, self.n, self.freq, self.intensity):
                w.writerow([repr(float(row[0])), int(row[1]), repr(float(row[2])),
                            repr(float(row[3]))])


def extract_if_lines(S: TFR, beta="auto", i_min: float | None = None) -> IFTrack:
    """Frequency centroids of the connected runs of each thresholded frame.

    Values below ``beta`` (the image mean when ``"auto"``) are zeroed; each
    maximal run of positive bins in a column is a component whose centroid
    and mean intensity are reported.  Components with mean intensity below
    ``i_min`` (default ``0.1 * Q``) are dropped.  Bins at 0 Hz and at the
    Nyquist frequency lie outside the open band and are ignored.
    """
    v = _values(S)
    Q = S.meta.get("Q", 255)
    b = float(v.mean()) if isinstance(beta, str) and beta == "auto" else float(beta)
    i_min = 0.1 * Q if i_min is None else float(i_min)
    f = S.f_axis
    nyq = S.meta["fs"] / 2 if "fs" in S.meta else np.inf
    inside = (f > 0) & (f < nyq)

    trunc = np.where(v >= b, v, 0.0)
    trunc[~inside, :] = 0.0
    mask = trunc > 0
    # run boundaries along frequency for every column at once
    edges = np.diff(np.vstack([np.zeros((1, v.shape[1]), bool), mask,
                               np.zeros((1, v.shape[1]), bool)]).astype(np.int8), axis=0)
    s_col, s_row = np.nonzero(edges.T == 1)
    e_col, e_row = np.nonzero(edges.T == -1)  # exclusive end
    csum_v = np.vstack([np.zeros((1, v.shape[1])), np.cumsum(trunc, axis=0)])
    csum_fv = np.vstack([np.zeros((1, v.shape[1])), np.cumsum(trunc * f[:, None], axis=0)])
    mass = csum_v[e_row, e_col] - csum_v[s_row, s_col]
    moment = csum_fv[e_row, e_col] - csum_fv[s_row, s_col]
    length = e_row - s_row
    freq = moment / mass if mass.size else np.zeros(0)
    inten = mass / length if mass.size else np.zeros(0)
    # ordinal within the column: runs come out sorted by (column, start row)
    first = np.searchsorted(s_col, s_col, side="left")
    ordinal = np.arange(s_col.size) - first + 1
    keep = inten >= i_min
    return IFTrack(S.t_axis[s_col[keep]], ordinal[keep], freq[keep], inten[keep], b, i_min)


def energy_profile(S: TFR) -> tuple[np.ndarray, np.ndarray]:
    """Frequency-integrated energy per frame, ``E(t_m) = sum_n S(n, m) * df``."""
    return S.t_axis.copy(), _values(S).sum(axis=0) * S.df


def write_energy_csv(path, t: np.ndarray, energy: np.ndarray) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "energy"])
        for a, b in zip(t, energy):
            w.writerow([repr(float(a)), repr(float(b))])


def spectral_subtract(S0: TFR, Sn: TFR, alpha: float) -> TFR:
    """Zero ``S0`` wherever the filtered image ``Sn`` exceeds ``alpha``."""
    if S0.shape != Sn.shape:
        raise InvalidArgumentError("S0 and Sn shapes differ")
    out = np.where(_values(Sn) > alpha, 0.0, _values(S0))
    return S0.with_values(out, kind="image")
