import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from tfdenoise import analysis, tfr
from tfdenoise.errors import InvalidArgumentError
from tfdenoise.signal_core import Signal


def _image(values, fs=None, df=1.0, dt=1.0):
    v = np.asarray(values, float)
    meta = {"Q": 255}
    if fs is not None:
        meta["fs"] = fs
    return tfr.TFR(v, np.arange(v.shape[1]) * dt, np.arange(v.shape[0]) * df, "image", meta)


def _tone_image(freqs, fs=4096.0, n=4096, sigma=64, L=511, hop=32, n_fft=1024):
    t = np.arange(n) / fs
    x = sum(np.sin(2 * np.pi * f * t) for f in freqs)
    return tfr.spectrogram_image(Signal(x, fs), sigma, L, hop, n_fft)[1]


class TestRelativeMSE:
    def test_identity_and_double(self, rng):
        S = rng.uniform(0, 255, (10, 10))
        assert analysis.relative_mse(S, S) == 0
        assert analysis.relative_mse(S, 2 * S) == 1.0
        assert analysis.relative_mse(S, np.zeros_like(S)) == 1.0

    def test_errors(self):
        with pytest.raises(InvalidArgumentError):
            analysis.relative_mse(np.ones((2, 2)), np.ones((2, 3)))
        with pytest.raises(InvalidArgumentError):
            analysis.relative_mse(np.zeros((2, 2)), np.ones((2, 2)))


class TestIFLines:
    def test_pure_tone(self):
        img = _tone_image([500])
        track = analysis.extract_if_lines(img)
        interior = (track.t > 0.1) & (track.t < 0.9)
        counts = track.frame_counts(img.shape[1], img.t_axis)
        frames = (img.t_axis > 0.1) & (img.t_axis < 0.9)
        assert np.all(counts[frames] == 1)
        assert np.all(np.abs(track.freq[interior] - 500) <= 4096 / 1024)

    def test_symmetric_bump(self):
        col = np.zeros((21, 1))
        col[8:13, 0] = [40, 90, 200, 90, 40]
        track = analysis.extract_if_lines(_image(col, df=10.0), beta=1.0, i_min=0)
        assert track.freq.tolist() == [100.0]
        assert track.intensity[0] == pytest.approx(92.0)

    def test_two_tones(self):
        img = _tone_image([500, 700])
        track = analysis.extract_if_lines(img)
        frames = (img.t_axis > 0.1) & (img.t_axis < 0.9)
        assert np.all(track.frame_counts(img.shape[1], img.t_axis)[frames] == 2)
        for tm in img.t_axis[frames]:
            f = track.freq[track.t == tm]
            assert f[0] < f[1]
            assert abs(f[0] - 500) <= 4 and abs(f[1] - 700) <= 4

    def test_intensity_threshold_and_ordinals(self):
        col = np.zeros((12, 1))
        col[2:4, 0] = 5.0
        col[7:9, 0] = 100.0
        track = analysis.extract_if_lines(_image(col), beta=1.0, i_min=50)
        assert track.n.tolist() == [2]
        assert np.all(track.intensity >= 50)

    def test_edge_rows_ignored(self):
        v = np.zeros((8, 2))
        v[0] = v[-1] = 200.0
        img = _image(v, fs=14.0, df=1.0)
        assert len(analysis.extract_if_lines(img, beta=1.0, i_min=0)) == 0

    def test_empty(self, tmp_path):
        track = analysis.extract_if_lines(_image(np.zeros((5, 5))), beta=1.0)
        assert len(track) == 0
        track.to_csv(tmp_path / "e.csv")
        assert (tmp_path / "e.csv").read_text() == "t,n,freq_hz,intensity\n"

    def test_rescale_invariance(self, rng):
        img = _tone_image([500, 700])
        a = analysis.extract_if_lines(img, i_min=20)
        scaled = img.with_values(0.5 * img.values)
        b = analysis.extract_if_lines(scaled, i_min=10)
        assert np.array_equal(a.t, b.t) and np.allclose(a.freq, b.freq, rtol=1e-12)


class TestEnergy:
    def test_constant(self):
        t, e = analysis.energy_profile(_image(np.full((6, 4), 3.0), df=2.5))
        assert np.allclose(e, 3.0 * 6 * 2.5)
        assert t.tolist() == [0, 1, 2, 3]

    def test_zero(self):
        assert not analysis.energy_profile(_image(np.zeros((3, 3))))[1].any()

    def test_burst(self, rng):
        v = rng.uniform(0, 5, (30, 50))
        v[:, 31:34] += np.array([20.0, 60.0, 25.0])
        t, e = analysis.energy_profile(_image(v, dt=0.1))
        assert abs(t[np.argmax(e)] - 3.2) <= 0.1 + 1e-12

    @given(arrays(np.float64, (4, 5), elements=st.floats(0, 255)),
           arrays(np.float64, (4, 5), elements=st.floats(0, 255)),
           st.floats(0, 10), st.floats(0, 10))
    def test_linear(self, s1, s2, a, b):
        e = lambda v: analysis.energy_profile(_image(v, df=0.7))[1]
        assert np.allclose(e(a * s1 + b * s2), a * e(s1) + b * e(s2), rtol=1e-10, atol=1e-8)


class TestSubtract:
    def test_all_removed(self, rng):
        S0 = _image(rng.uniform(0, 255, (4, 4)))
        assert not analysis.spectral_subtract(S0, _image(np.full((4, 4), 9.0)), 1.0).values.any()

    def test_nothing_removed(self, rng):
        S0 = _image(rng.uniform(0, 255, (4, 4)))
        out = analysis.spectral_subtract(S0, _image(np.zeros((4, 4))), 1.0)
        assert np.array_equal(out.values, S0.values)

    def test_alpha_q(self, rng):
        S0 = _image(rng.uniform(0, 255, (4, 4)))
        out = analysis.spectral_subtract(S0, S0, 255.0)
        assert np.array_equal(out.values, S0.values)

    @given(arrays(np.float64, (5, 5), elements=st.floats(0, 255)),
           arrays(np.float64, (5, 5), elements=st.floats(0, 255)), st.floats(0, 255))
    def test_idempotent(self, s0, sn, alpha):
        once = analysis.spectral_subtract(_image(s0), _image(sn), alpha)
        twice = analysis.spectral_subtract(once, _image(sn), alpha)
        assert np.array_equal(once.values, twice.values)

    def test_shape_mismatch(self):
        with pytest.raises(InvalidArgumentError):
            analysis.spectral_subtract(_image(np.ones((2, 2))), _image(np.ones((2, 3))), 1)
