"""End-to-end experiment pipelines shared by the CLI and the acceptance tests."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import analysis, tfr
from .filters import FilterParams, FilterResult, nf_iterate, tv_transport_denoise, yaroslavsky_iterate
from .signal_core import DEFAULT_SEED, Signal, experiment1_signals

FILTERS = {
    "nf": nf_iterate,
    "yaroslavsky": yaroslavsky_iterate,
    "tv": tv_transport_denoise,
}


@dataclass
class STFTConfig:
    window_sigma: float
    window_length: int
    hop: int
    n_fft: int

    def image(self, sig: Signal, Q: int = 255) -> tuple[tfr.TFR, tfr.TFR]:
        return tfr.spectrogram_image(sig, self.window_sigma, self.window_length, self.hop,
                                     self.n_fft, Q)


# 1 s at 4096 Hz with hop 2 gives 2048 frames; n_fft 1022 gives 512 frequency rows.
EXPERIMENT1_FS = 4096.0
EXPERIMENT1_STFT = STFTConfig(window_sigma=204.0, window_length=1021, hop=2, n_fft=1022)
EXPERIMENT1_PARAMS = dict(h=10.0, rho=10.0, tol=0.04, eps=0.02, dtau=2.5)
EXPERIMENT2_PARAMS = dict(h=10.0, rho=10.0, tol=0.01, eps=0.2, dtau=0.25)


@dataclass
class ExperimentRun:
    clean_image: tfr.TFR | None
    noisy_image: tfr.TFR
    results: dict = field(default_factory=dict)

    def mse(self, name: str) -> float | None:
        if self.clean_image is None:
            return None
        return analysis.relative_mse(self.clean_image, self.results[name].image)

    def table_rows(self) -> dict:
        rows = {}
        for name, res in self.results.items():
            rows[name] = {"mse": self.mse(name), "wall_time": res.wall_time,
                          "iterations": res.iterations}
        return rows


def run_filters(image: tfr.TFR, params: FilterParams, names=("nf", "yaroslavsky", "tv")) -> dict:
    return {name: FILTERS[name](image, params) for name in names}


def experiment1(seed: int = DEFAULT_SEED, names=("nf", "yaroslavsky", "tv"),
                stft_cfg: STFTConfig = EXPERIMENT1_STFT, fs: float = EXPERIMENT1_FS,
                Q: int = 255, **overrides) -> ExperimentRun:
    clean, noisy = experiment1_signals(1.0, fs, seed)
    _, clean_img = stft_cfg.image(clean, Q)
    _, noisy_img = stft_cfg.image(noisy, Q)
    params = FilterParams(Q=Q, **{**EXPERIMENT1_PARAMS, **overrides})
    return ExperimentRun(clean_img, noisy_img, run_filters(noisy_img, params, names))


# -- Experiment 3 surrogate -------------------------------------------------

@dataclass
class BurstSurrogate:
    """Persistent spectral line + broadband burst + strong noise segment."""

    clean: Signal
    noisy: Signal
    burst: tuple[float, float]
    noise: tuple[float, float]


def burst_surrogate(fs: float = 250.0, duration: float = 64.0, burst=(30.0, 36.0),
                    noise_seg=(10.0, 24.0), line_hz: float = 8.0, seed: int = DEFAULT_SEED,
                    burst_amp: float = 0.5, noise_amp: float = 2.0,
                    interference_hz=(50.0, 100.0)) -> BurstSurrogate:
    """Desk-scale stand-in for an ECG segment with an arrhythmia episode.

    The clean part is a constant-amplitude line at ``line_hz`` (the regular
    beat) plus band-limited random energy inside ``burst``.  The noisy
    version adds strong narrowband interference (mains hum and a harmonic)
    during ``noise_seg``, which carries more energy per frame than the burst.
    """
    rng = np.random.default_rng(seed)
    n = int(round(fs * duration))
    t = np.arange(n) / fs
    line = np.sin(2 * np.pi * line_hz * t)
    burst_env = _smooth_gate(t, *burst, ramp=0.5)
    burst_sig = burst_amp * burst_env * _band_noise(rng, n, fs, 15.0, 90.0)
    hum = sum(np.sin(2 * np.pi * f * t + rng.uniform(0, 2 * np.pi)) / (i + 1)
              for i, f in enumerate(interference_hz))
    noise_sig = noise_amp * _smooth_gate(t, *noise_seg, ramp=0.5) * hum
    clean = line + burst_sig
    return BurstSurrogate(Signal(clean, fs), Signal(clean + noise_sig, fs), tuple(burst),
                          tuple(noise_seg))


def _smooth_gate(t, t0, t1, ramp):
    up = np.clip((t - t0) / ramp, 0, 1)
    down = np.clip((t1 - t) / ramp, 0, 1)
    return np.sin(0.5 * np.pi * np.minimum(up, down)) ** 2


def _band_noise(rng, n, fs, f_lo, f_hi):
    spec = np.fft.rfft(rng.standard_normal(n))
    f = np.fft.rfftfreq(n, 1 / fs)
    spec[(f < f_lo) | (f > f_hi)] = 0
    x = np.fft.irfft(spec, n)
    return x / x.std()


EXPERIMENT3_STFT = STFTConfig(window_sigma=32.0, window_length=253, hop=25, n_fft=254)


@dataclass
class Experiment3Run:
    S0: tfr.TFR
    Sn: tfr.TFR
    subtracted: tfr.TFR
    nf_result: FilterResult
    profiles: dict

    def argmax_time(self, which: str) -> float:
        t, e = self.profiles[which]
        return float(t[int(np.argmax(e))])


def experiment3(sig: Signal, alpha: float = 1.0, stft_cfg: STFTConfig = EXPERIMENT3_STFT,
                Q: int = 255, **overrides) -> Experiment3Run:
    """NF-filter the noisy spectrogram and remove from it every pixel the filter keeps above alpha."""
    _, S0 = stft_cfg.image(sig, Q)
    params = FilterParams(Q=Q, **{**EXPERIMENT1_PARAMS, **overrides})
    res = nf_iterate(S0, params)
    sub = analysis.spectral_subtract(S0, res.image, alpha)
    return Experiment3Run(S0, res.image, sub, res, {
        "original": analysis.energy_profile(S0),
        "subtracted": analysis.energy_profile(sub),
    })
