import math
import wave

import numpy as np
import pytest
from hypothesis import given, strategies as st

from tfdenoise.errors import InvalidArgumentError, UnsupportedEncodingError, WavFormatError
from tfdenoise.signal_core import (
    Signal, bandpass_downsample, experiment1_signals, gen_tone_chirp_mix, gen_uniform_noise,
    load_signal_csv, load_wav, mix_at_snr, write_signal_csv, write_wav,
)


def _write_raw_wav(path, samples, fs, channels=1, width=2):
    with wave.open(str(path), "wb") as fh:
        fh.setnchannels(channels)
        fh.setsampwidth(width)
        fh.setframerate(fs)
        fh.writeframes(np.asarray(samples).astype(f"<i{width}").tobytes())


class TestToneChirpMix:
    def test_unit_norm(self):
        assert abs(gen_tone_chirp_mix(1.0, 8000).norm() - 1) <= 1e-12

    def test_starts_at_zero(self):
        assert gen_tone_chirp_mix(1.0, 8000).samples[0] == 0.0

    def test_tone_peaks(self):
        fs, dur = 16000, 0.5
        t = np.arange(int(dur * fs)) / fs
        freqs = np.fft.rfftfreq(t.size, 1 / fs)
        for f0 in (500, 700):
            spec = np.abs(np.fft.rfft(np.sin(2 * np.pi * f0 * t)))
            assert freqs[np.argmax(spec)] == pytest.approx(f0, abs=fs / t.size)
        # the mix itself carries both tones
        mix = np.abs(np.fft.rfft(gen_tone_chirp_mix(dur, fs).samples))
        for f0 in (500, 700):
            k = int(round(f0 * t.size / fs))
            assert mix[k] > 10 * np.median(mix)

    @pytest.mark.parametrize("dur,fs", [(0, 8000), (-1, 8000), (1, 0), (1, -5)])
    def test_rejects_nonpositive(self, dur, fs):
        with pytest.raises(InvalidArgumentError):
            gen_tone_chirp_mix(dur, fs)

    def test_rejects_aliasing_rate(self):
        # the quadratic chirp reaches 2000 Hz after one second
        with pytest.raises(InvalidArgumentError):
            gen_tone_chirp_mix(1.0, 4000)
        gen_tone_chirp_mix(1.0, 4096)


class TestUniformNoise:
    def test_unit_norm(self):
        assert abs(gen_uniform_noise(8000, seed=7).norm() - 1) <= 1e-12

    def test_deterministic(self):
        a = gen_uniform_noise(8000, seed=7).samples
        b = gen_uniform_noise(8000, seed=7).samples
        assert a.tobytes() == b.tobytes()

    def test_zero_mean_before_scaling(self):
        raw = np.random.default_rng(3).uniform(-1, 1, 100_000)
        x = gen_uniform_noise(100_000, seed=3).samples
        assert np.allclose(x * np.linalg.norm(raw), raw)
        assert -0.02 < raw.mean() < 0.02

    def test_rejects_empty(self):
        with pytest.raises(InvalidArgumentError):
            gen_uniform_noise(0)


class TestMix:
    def setup_method(self):
        self.x1 = gen_tone_chirp_mix(1.0, 8000)
        self.x2 = gen_uniform_noise(8000, seed=7, fs=8000)

    def test_zero_db_is_plain_sum(self):
        out = mix_at_snr(self.x1, self.x2, 0.0)
        # both norms are 1 only up to rounding, so g is 1 up to a few ulp
        assert np.max(np.abs(out.samples - self.x1.samples - self.x2.samples)) <= 1e-15

    def test_zero_db_equal_norms_exact(self):
        neg = Signal(-self.x1.samples, 8000)
        assert not mix_at_snr(self.x1, neg, 0.0).samples.any()

    def test_large_snr_vanishing_noise(self):
        out = mix_at_snr(self.x1, self.x2, 300.0)
        assert np.allclose(out.samples, self.x1.samples, atol=1e-14)

    def test_half_amplitude(self):
        out = mix_at_snr(self.x1, self.x2, 20 * math.log10(2))
        noise = out.samples - self.x1.samples
        assert abs(np.linalg.norm(noise) - 0.5 * self.x1.norm()) <= 1e-9

    @given(st.floats(-40, 40))
    def test_snr_achieved(self, snr):
        out = mix_at_snr(self.x1, self.x2, snr)
        noise = out.samples - self.x1.samples
        got = 20 * math.log10(self.x1.norm() / np.linalg.norm(noise))
        assert got == pytest.approx(snr, abs=1e-9)

    def test_mismatches(self):
        with pytest.raises(InvalidArgumentError):
            mix_at_snr(self.x1, gen_uniform_noise(10, fs=8000), 0)
        with pytest.raises(InvalidArgumentError):
            mix_at_snr(self.x1, gen_uniform_noise(8000, fs=4000), 0)
        with pytest.raises(InvalidArgumentError):
            mix_at_snr(self.x1, Signal(np.zeros(8000), 8000), 0)

    def test_experiment_pair(self):
        clean, noisy = experiment1_signals(1.0, 4096, seed=7)
        assert len(clean) == len(noisy) == 4096
        assert np.linalg.norm(noisy.samples - clean.samples) == pytest.approx(1.0, abs=1e-12)


class TestWav:
    def test_zeros(self, tmp_path):
        p = tmp_path / "z.wav"
        _write_raw_wav(p, np.zeros(44100, dtype=np.int16), 44100)
        sig = load_wav(p)
        assert sig.sample_rate == 44100 and len(sig) == 44100 and not sig.samples.any()

    def test_full_scale(self, tmp_path):
        p = tmp_path / "m.wav"
        _write_raw_wav(p, np.full(100, 32767, dtype=np.int16), 8000)
        assert np.all(load_wav(p).samples == 32767 / 32768)

    def test_stereo_averaged(self, tmp_path):
        p = tmp_path / "s.wav"
        _write_raw_wav(p, np.array([100, 300, -200, 0], dtype=np.int16), 8000, channels=2)
        assert np.allclose(load_wav(p).samples, np.array([200, -100]) / 32768)

    def test_round_trip(self, tmp_path):
        p = tmp_path / "rt.wav"
        x = gen_tone_chirp_mix(1.0, 8000)
        scaled = Signal(x.samples / np.abs(x.samples).max() * 0.9, 8000)
        write_wav(p, scaled)
        back = load_wav(p)
        assert back.sample_rate == 8000
        assert np.max(np.abs(back.samples - scaled.samples)) <= 2 / 32768

    def test_missing(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_wav(tmp_path / "nope.wav")

    def test_malformed_header(self, tmp_path):
        p = tmp_path / "bad.wav"
        p.write_bytes(b"RIFX0000WAVEjunk")
        with pytest.raises(WavFormatError) as exc:
            load_wav(p)
        assert not isinstance(exc.value, UnsupportedEncodingError)

    def test_unsupported_width(self, tmp_path):
        p = tmp_path / "w8.wav"
        _write_raw_wav(p, np.zeros(10, dtype=np.uint8), 8000, width=1)
        with pytest.raises(UnsupportedEncodingError):
            load_wav(p)

    def test_csv_round_trip(self, tmp_path):
        x = gen_uniform_noise(50, seed=1, fs=100)
        write_signal_csv(tmp_path / "x.csv", x)
        back = load_signal_csv(tmp_path / "x.csv", 100)
        assert np.array_equal(back.samples, x.samples)


class TestBandpass:
    fs = 44100

    def _tone(self, f, dur=1.0):
        t = np.arange(int(dur * self.fs)) / self.fs
        return Signal(np.sin(2 * np.pi * f * t), self.fs)

    def test_rate(self):
        out = bandpass_downsample(self._tone(1000), 200, 3000, 8820)
        assert out.sample_rate == 8820
        assert len(out) == 8820

    def test_passband_amplitude(self):
        out = bandpass_downsample(self._tone(1000), 200, 3000, 8820)
        mid = out.samples[1000:-1000]
        t = np.arange(mid.size)
        # least-squares amplitude of the 1 kHz component
        basis = np.column_stack([np.sin(2 * np.pi * 1000 * t / 8820), np.cos(2 * np.pi * 1000 * t / 8820)])
        coef = np.linalg.lstsq(basis, mid, rcond=None)[0]
        assert np.hypot(*coef) == pytest.approx(1.0, rel=0.01)

    def test_stopband(self):
        x = self._tone(5000)
        out = bandpass_downsample(x, 200, 3000, 8820)
        rms_in = np.sqrt(np.mean(x.samples**2))
        rms_out = np.sqrt(np.mean(out.samples[1000:-1000] ** 2))
        assert rms_out <= 0.05 * rms_in

    @pytest.mark.parametrize("band,target", [((200, 5000), 8820), ((3000, 200), 8820),
                                             ((-1, 100), 8820), ((200, 3000), 50000)])
    def test_bad_band(self, band, target):
        with pytest.raises(InvalidArgumentError):
            bandpass_downsample(self._tone(1000, 0.1), *band, target)
