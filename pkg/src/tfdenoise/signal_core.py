"""Test-signal generation, noise mixing and recorded-signal conditioning."""

from __future__ import annotations

import wave
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import signal as sps

from .errors import InvalidArgumentError, UnsupportedEncodingError, WavFormatError

DEFAULT_SEED = 7


@dataclass(frozen=True)
class Signal:
    """Uniformly sampled real 1-D signal."""

    samples: np.ndarray
    sample_rate: float

    def __post_init__(self):
        if not self.sample_rate > 0:
            raise InvalidArgumentError(f"sample_rate must be positive, got {self.sample_rate}")
        x = np.asarray(self.samples, dtype=float)
        if x.ndim != 1:
            raise InvalidArgumentError("samples must be one-dimensional")
        object.__setattr__(self, "samples", x)

    def __len__(self):
        return self.samples.size

    @property
    def duration(self) -> float:
        return self.samples.size / self.sample_rate

    @property
    def t(self) -> np.ndarray:
        return np.arange(self.samples.size) / self.sample_rate

    def norm(self) -> float:
        return float(np.linalg.norm(self.samples))


def _unit_norm(x: np.ndarray) -> np.ndarray:
    n = np.linalg.norm(x)
    if n == 0:
        raise InvalidArgumentError("cannot normalize a zero signal")
    return x / n


def gen_tone_chirp_mix(duration_s: float, fs: float) -> Signal:
    """Two pure tones (500, 700 Hz) plus a quadratic and a cubic chirp, unit L2 norm.

    ``fs`` must exceed twice the highest instantaneous frequency reached
    within ``duration_s`` so that no component aliases.
    """
    if not duration_s > 0 or not fs > 0:
        raise InvalidArgumentError("duration and sample rate must be positive")
    f_max = max(700.0, 2000.0 * duration_s, 1800.0 * duration_s**2)
    if fs <= 2 * f_max:
        raise InvalidArgumentError(
            f"fs={fs} Hz aliases the mix; need more than {2 * f_max:g} Hz for {duration_s} s")
    n = int(round(duration_s * fs))
    if n < 1:
        raise InvalidArgumentError("duration too short for the sample rate")
    t = np.arange(n) / fs
    x = (
        np.sin(2 * np.pi * 500 * t)
        + np.sin(2 * np.pi * 700 * t)
        + np.sin(2 * np.pi * 1000 * t**2)
        + np.sin(2 * np.pi * 600 * t**3)
    )
    return Signal(_unit_norm(x), fs)


def gen_uniform_noise(n_samples: int, seed: int = DEFAULT_SEED, fs: float = 1.0) -> Signal:
    """I.i.d. uniform noise on [-1, 1], rescaled to unit L2 norm."""
    if n_samples < 1:
        raise InvalidArgumentError("n_samples must be positive")
    rng = np.random.default_rng(seed)
    return Signal(_unit_norm(rng.uniform(-1.0, 1.0, n_samples)), fs)


def mix_at_snr(clean: Signal, noise: Signal, snr_db: float) -> Signal:
    """Return ``clean + g*noise`` with g chosen so the clean/noise ratio is ``snr_db``."""
    if len(clean) != len(noise):
        raise InvalidArgumentError("clean and noise lengths differ")
    if clean.sample_rate != noise.sample_rate:
        raise InvalidArgumentError("clean and noise sample rates differ")
    nn = noise.norm()
    if nn == 0:
        raise InvalidArgumentError("noise has zero norm")
    g = clean.norm() / (nn * 10.0 ** (snr_db / 20.0))
    return Signal(clean.samples + g * noise.samples, clean.sample_rate)


def experiment1_signals(duration_s: float = 1.0, fs: float = 4096.0, seed: int = DEFAULT_SEED):
    """Clean tone/chirp mix and its 0 dB uniform-noise corrupted version."""
    clean = gen_tone_chirp_mix(duration_s, fs)
    noise = gen_uniform_noise(len(clean), seed=seed, fs=fs)
    return clean, mix_at_snr(clean, noise, 0.0)


# -- WAV / CSV I/O ---------------------------------------------------------

def load_wav(path) -> Signal:
    """Read a 16-bit PCM WAV file; stereo is averaged to mono."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such file: {path}")
    try:
        with wave.open(str(path), "rb") as fh:
            nch, width, rate, nframes = (
                fh.getnchannels(), fh.getsampwidth(), fh.getframerate(), fh.getnframes())
            raw = fh.readframes(nframes)
    except wave.Error as exc:
        msg = str(exc)
        if "unknown format" in msg:
            raise UnsupportedEncodingError(msg) from exc
        raise WavFormatError(msg) from exc
    except EOFError as exc:
        raise WavFormatError(f"truncated WAV header in {path}") from exc
    if width != 2:
        raise UnsupportedEncodingError(f"expected 16-bit PCM, got {8 * width}-bit samples")
    if nch not in (1, 2):
        raise UnsupportedEncodingError(f"unsupported channel count {nch}")
    data = np.frombuffer(raw, dtype="<i2")
    if data.size % nch:
        raise WavFormatError("truncated sample data")
    x = data.reshape(-1, nch).astype(float).mean(axis=1) / 32768.0
    return Signal(x, float(rate))


def write_wav(path, sig: Signal) -> None:
    """Write a mono 16-bit PCM WAV, clipping to the representable range."""
    q = np.clip(np.round(sig.samples * 32768.0), -32768, 32767).astype("<i2")
    with wave.open(str(path), "wb") as fh:
        fh.setnchannels(1)
        fh.setsampwidth(2)
        fh.setframerate(int(round(sig.sample_rate)))
        fh.writeframes(q.tobytes())


def write_signal_csv(path, sig: Signal) -> None:
    np.savetxt(path, sig.samples, fmt="%.17g")


def load_signal_csv(path, sample_rate: float) -> Signal:
    return Signal(np.loadtxt(path, ndmin=1), sample_rate)


# -- conditioning ------------------------------------------------------------

def _decimation_factor(fs: float, target_fs: float) -> int:
    fs_int = int(round(fs))
    q = max(1, int(np.ceil(fs / target_fs - 1e-9)))
    while fs_int % q:
        q += 1
    return q


def bandpass_downsample(sig: Signal, f_lo: float, f_hi: float, target_fs: float) -> Signal:
    """Zero-phase Hamming FIR bandpass followed by integer-factor decimation.

    The decimation factor is the smallest divisor of the input rate that brings
    it to at most ``target_fs``.
    """
    fs = sig.sample_rate
    if not (0 <= f_lo < f_hi <= target_fs / 2 <= fs / 2):
        raise InvalidArgumentError(
            f"need 0 <= f_lo < f_hi <= target_fs/2 <= fs/2, got {f_lo}, {f_hi}, {target_fs}, {fs}")
    numtaps = 4095 if f_lo == 0 else min(4095, int(np.ceil(4 * fs / f_lo)) | 1)
    if f_lo == 0:
        taps = sps.firwin(numtaps, f_hi, window="hamming", fs=fs)
    else:
        taps = sps.firwin(numtaps, [f_lo, f_hi], window="hamming", pass_zero=False, fs=fs)
    x = sig.samples
    padlen = min(3 * numtaps, x.size - 1)
    y = sps.filtfilt(taps, [1.0], x, padlen=padlen)
    q = _decimation_factor(fs, target_fs)
    return Signal(y[::q], fs / q)
