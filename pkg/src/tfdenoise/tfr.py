"""Time-frequency representations: Gaussian STFT, spectrogram, pseudo Wigner-Ville.

Matrices are stored frequency-major: ``values[n, m]`` is frequency bin ``n`` at
time frame ``m``.  Only nonnegative frequencies ``k * fs / n_fft`` are kept.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy import ndimage
from scipy.signal import hilbert

from .errors import DegenerateRangeError, InvalidArgumentError
from .signal_core import Signal

KINDS = ("complex-stft", "spectrogram", "wigner-ville", "image")


@dataclass(frozen=True)
class Window:
    coefficients: np.ndarray
    sigma: float

    def __len__(self):
        return self.coefficients.size


@dataclass
class TFR:
    """Dense time-frequency matrix with its axes.

    ``meta`` carries bookkeeping such as the affine map applied by
    :func:`normalize_to_image`.
    """

    values: np.ndarray
    t_axis: np.ndarray
    f_axis: np.ndarray
    kind: str
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidArgumentError(f"unknown TFR kind {self.kind!r}")
        self.values = np.asarray(self.values)
        self.t_axis = np.asarray(self.t_axis, dtype=float)
        self.f_axis = np.asarray(self.f_axis, dtype=float)
        if self.values.shape != (self.f_axis.size, self.t_axis.size):
            raise InvalidArgumentError(
                f"values shape {self.values.shape} does not match axes "
                f"({self.f_axis.size}, {self.t_axis.size})")

    @property
    def shape(self):
        return self.values.shape

    @property
    def dt(self) -> float:
        return float(self.t_axis[1] - self.t_axis[0]) if self.t_axis.size > 1 else 1.0

    @property
    def df(self) -> float:
        return float(self.f_axis[1] - self.f_axis[0]) if self.f_axis.size > 1 else 1.0

    @property
    def cell_area(self) -> float:
        """Surface element dA = T*F/(M*N) in seconds*Hz."""
        return self.dt * self.df

    def with_values(self, values, kind=None, **meta) -> "TFR":
        return replace(self, values=values, kind=kind or self.kind, meta={**self.meta, **meta})


def gaussian_window(sigma_samples: float, length: int) -> Window:
    """Symmetric Gaussian of standard deviation ``sigma_samples``, unit L2 norm."""
    if not sigma_samples > 0:
        raise InvalidArgumentError("sigma must be positive")
    if length < 1 or length % 2 == 0:
        raise InvalidArgumentError(f"window length must be odd and positive, got {length}")
    c = (length - 1) // 2
    k = np.arange(length) - c
    w = np.exp(-(k.astype(float) ** 2) / (2.0 * sigma_samples**2))
    w /= np.linalg.norm(w)
    return Window(w, float(sigma_samples))


def _frames(x: np.ndarray, half: int, hop: int, n_frames: int) -> np.ndarray:
    """Rows are zero-padded segments ``x[m*hop - half : m*hop + half + 1]``."""
    padded = np.concatenate([np.zeros(half, dtype=x.dtype), x, np.zeros(half + hop, dtype=x.dtype)])
    view = np.lib.stride_tricks.sliding_window_view(padded, 2 * half + 1)
    return view[: n_frames * hop : hop]


def n_frames_for(n_samples: int, hop: int) -> int:
    return -(-n_samples // hop)


def stft(sig: Signal, window: Window, hop: int, n_fft: int) -> TFR:
    """Short-time Fourier transform with frames centred at ``m * hop``."""
    if hop < 1:
        raise InvalidArgumentError("hop must be at least 1")
    if len(window) > n_fft:
        raise InvalidArgumentError("window longer than n_fft")
    if len(sig) < len(window):
        raise InvalidArgumentError("signal shorter than the window")
    half = (len(window) - 1) // 2
    n_frames = n_frames_for(len(sig), hop)
    segs = _frames(sig.samples, half, hop, n_frames) * window.coefficients
    G = np.fft.rfft(segs, n=n_fft, axis=1).T
    fs = sig.sample_rate
    return TFR(
        G,
        t_axis=np.arange(n_frames) * hop / fs,
        f_axis=np.arange(G.shape[0]) * fs / n_fft,
        kind="complex-stft",
        meta={"fs": fs, "hop": hop, "n_fft": n_fft, "window_sigma": window.sigma,
              "window_length": len(window)},
    )


def spectrogram(G: TFR) -> TFR:
    if G.kind != "complex-stft":
        raise InvalidArgumentError(f"spectrogram needs a complex-stft, got {G.kind}")
    v = G.values
    return G.with_values(v.real**2 + v.imag**2, kind="spectrogram")


def full_spectrum_energy(S: TFR) -> np.ndarray:
    """Per-frame ``sum over all n_fft bins of |G|^2`` reconstructed from the stored half."""
    n_fft = S.meta["n_fft"]
    w = np.full(S.shape[0], 2.0)
    w[0] = 1.0
    if n_fft % 2 == 0:
        w[-1] = 1.0
    return w @ S.values


def normalize_to_image(S: TFR, Q: int = 255) -> TFR:
    """Affine map of ``[min S, max S]`` onto ``[0, Q]``."""
    v = np.asarray(S.values, dtype=float)
    lo, hi = float(v.min()), float(v.max())
    if not hi > 0:
        raise DegenerateRangeError("matrix has no positive value")
    if hi == lo:
        raise DegenerateRangeError("constant matrix cannot be normalized")
    scale = Q / (hi - lo)
    img = (v - lo) * scale
    np.clip(img, 0.0, Q, out=img)
    return S.with_values(img, kind="image", scale=scale, offset=lo, Q=Q)


def image_to_values(img: TFR) -> np.ndarray:
    """Invert :func:`normalize_to_image` using the stored scale and offset."""
    return img.values / img.meta["scale"] + img.meta["offset"]


def pseudo_wigner_ville(sig: Signal, max_lag: int, n_fft: int, hop: int = 1) -> TFR:
    """Discrete pseudo Wigner-Ville distribution on the STFT frequency grid.

    Computed on the positive-frequency part ``z/2`` of the analytic signal
    ``z``, so that Gaussian smoothing of the result approximates the
    spectrogram of the real input.  ``max_lag`` is the odd number of lags
    ``tau in [-L, L]``; the product ``z[n+tau] z*[n-tau]`` spans a lag of
    ``2*tau`` samples, which is why the lag transform has length ``n_fft/2``.
    """
    if max_lag < 1 or max_lag % 2 == 0:
        raise InvalidArgumentError(f"max_lag must be odd and positive, got {max_lag}")
    if max_lag > len(sig):
        raise InvalidArgumentError("max_lag exceeds the signal length")
    if n_fft % 2:
        raise InvalidArgumentError("n_fft must be even")
    L = (max_lag - 1) // 2
    half_n = n_fft // 2
    z = hilbert(sig.samples) / 2.0
    n_frames = n_frames_for(len(sig), hop)
    segs = _frames(z, L, hop, n_frames)
    kernel = segs * np.conj(segs[:, ::-1])  # tau = -L..L
    folded = np.zeros((n_frames, half_n), dtype=complex)
    taus = np.arange(-L, L + 1) % half_n
    for col, t in enumerate(taus):
        folded[:, t] += kernel[:, col]
    W = 2.0 * np.fft.fft(folded, axis=1)
    W = np.concatenate([W, W[:, :1]], axis=1).T  # bin n_fft/2 aliases onto bin 0
    scale = max(np.abs(W).max(), np.finfo(float).tiny)
    if np.abs(W.imag).max() > 1e-9 * scale:
        raise ArithmeticError("Wigner-Ville imaginary residue above tolerance")
    fs = sig.sample_rate
    return TFR(
        W.real.copy(),
        t_axis=np.arange(n_frames) * hop / fs,
        f_axis=np.arange(half_n + 1) * fs / n_fft,
        kind="wigner-ville",
        meta={"fs": fs, "hop": hop, "n_fft": n_fft, "max_lag": max_lag},
    )


def gaussian_smooth_tfr(W: TFR, sigma_t: float, sigma_f: float) -> TFR:
    """Separable Gaussian smoothing, sigmas in seconds and Hz, reflective edges."""
    if not (sigma_t > 0 and sigma_f > 0):
        raise InvalidArgumentError("smoothing sigmas must be positive")
    v = ndimage.gaussian_filter1d(np.asarray(W.values, dtype=float), sigma_f / W.df,
                                  axis=0, mode="reflect", truncate=4.0)
    v = ndimage.gaussian_filter1d(v, sigma_t / W.dt, axis=1, mode="reflect", truncate=4.0)
    return W.with_values(v)


def matched_wv_smoothing(sigma_samples: float, fs: float) -> tuple[float, float]:
    """(sigma_t [s], sigma_f [Hz]) of the Wigner-Ville of a Gaussian window.

    For a Gaussian window of standard deviation ``s`` samples, WV(window) is a 2-D
    Gaussian with time spread ``s/sqrt 2`` samples and angular-frequency
    spread ``1/(s sqrt 2)`` rad/sample.
    """
    s = sigma_samples
    return s / (np.sqrt(2.0) * fs), fs / (2.0 * np.sqrt(2.0) * np.pi * s)


def spectrogram_image(sig: Signal, window_sigma: float, window_length: int, hop: int,
                      n_fft: int, Q: int = 255) -> tuple[TFR, TFR]:
    """Convenience pipeline: returns (raw spectrogram, [0, Q] image)."""
    S = spectrogram(stft(sig, gaussian_window(window_sigma, window_length), hop, n_fft))
    return S, normalize_to_image(S, Q)


def as_image(values, Q: int = 255, **meta) -> TFR:
    """Wrap a bare [0, Q] array as an image TFR on a unit grid."""
    v = np.asarray(values, dtype=float)
    if v.ndim != 2:
        raise InvalidArgumentError("image must be two-dimensional")
    return TFR(v, np.arange(v.shape[1], dtype=float), np.arange(v.shape[0], dtype=float),
               kind="image", meta={"Q": Q, **meta})
