import numpy as np
import pytest

from nilmedge.signals import (
    CalibrationCoefficients,
    LengthMismatchError,
    RawSampleBlock,
    SampleStream,
    SampleWindow,
    calibrate_raw,
    decimate_average,
    decimate_stream,
    default_calibration,
    window_stream,
)

BIPOLAR = CalibrationCoefficients(gain_v=2.5 / 16384, offset_v=-1.25,
                                  gain_i=2.5 / 16384, offset_i=-1.25)


class TestCalibrate:
    def test_zero_code(self):
        block = RawSampleBlock(codes_v=[0], codes_i=[0])
        out = calibrate_raw(block, BIPOLAR)
        assert out.v[0] == -1.25
        assert out.i[0] == -1.25

    def test_mid_scale_code_reads_zero(self):
        block = RawSampleBlock(codes_v=[8192], codes_i=[8192])
        out = calibrate_raw(block, BIPOLAR)
        assert out.v[0] == 0.0
        assert out.i[0] == 0.0

    def test_matches_scalar_oracle_elementwise(self, rng):
        codes = rng.integers(0, 16384, size=64)
        block = RawSampleBlock(codes_v=codes, codes_i=codes[::-1].copy())
        coeffs = default_calibration()
        out = calibrate_raw(block, coeffs)
        for k in range(64):
            assert out.v[k] == codes[k] * coeffs.gain_v + coeffs.offset_v
            assert out.i[k] == codes[::-1][k] * coeffs.gain_i + coeffs.offset_i

    def test_affine_scaling_property(self, rng):
        codes = rng.integers(0, 4096, size=50)
        no_offset = CalibrationCoefficients(gain_v=0.01, offset_v=0.0,
                                            gain_i=0.01, offset_i=0.0)
        tripled = CalibrationCoefficients(gain_v=0.03, offset_v=0.0,
                                          gain_i=0.03, offset_i=0.0)
        block = RawSampleBlock(codes_v=codes, codes_i=codes)
        np.testing.assert_allclose(calibrate_raw(block, tripled).v,
                                   3 * calibrate_raw(block, no_offset).v, rtol=1e-15)

    def test_mismatched_lengths_rejected(self):
        with pytest.raises(LengthMismatchError):
            RawSampleBlock(codes_v=[1, 2], codes_i=[1])

    def test_code_range_enforced(self):
        with pytest.raises(ValueError):
            RawSampleBlock(codes_v=[16384], codes_i=[0])

    def test_gain_must_be_positive(self):
        with pytest.raises(ValueError):
            CalibrationCoefficients(gain_v=0.0, offset_v=0.0, gain_i=1.0, offset_i=0.0)


class TestDecimate:
    def test_pair_means(self):
        np.testing.assert_array_equal(decimate_average([1, 3, 5, 7]), [2, 6])

    def test_constant_stream_unchanged(self):
        np.testing.assert_array_equal(decimate_average([4.2] * 10), [4.2] * 5)

    def test_odd_length_rejected(self):
        with pytest.raises(ValueError):
            decimate_average([1, 2, 3])

    def test_noise_variance_halves(self):
        noise = np.random.default_rng(42).normal(0, 1.0, size=10**6)
        out = decimate_average(noise)
        assert out.size == noise.size // 2
        assert abs(out.var() / noise.var() - 0.5) < 0.05 * 0.5

    def test_mean_preserved(self, rng):
        x = rng.normal(3.0, 1.0, size=2000)
        assert np.isclose(decimate_average(x).mean(), x.mean(), rtol=1e-12)

    def test_stream_rate_halved(self, rng):
        s = SampleStream(v=rng.normal(size=400), i=rng.normal(size=400), rate_hz=20000)
        out = decimate_stream(s)
        assert out.rate_hz == 10000 and len(out) == 200


class TestWindowing:
    def test_discards_trailing_partial(self, rng):
        s = SampleStream(v=rng.normal(size=3500), i=rng.normal(size=3500))
        windows = list(window_stream(s))
        assert len(windows) == 3

    def test_single_exact_window(self, rng):
        v = rng.normal(size=1000)
        i = rng.normal(size=1000)
        (w,) = window_stream(SampleStream(v=v, i=i))
        assert w.index == 0
        np.testing.assert_array_equal(w.v, v)
        np.testing.assert_array_equal(w.i, i)

    def test_windows_are_ramp_slices(self):
        ramp = np.arange(4096, dtype=float)
        s = SampleStream(v=ramp, i=ramp)
        for k, w in enumerate(window_stream(s)):
            assert w.index == k
            np.testing.assert_array_equal(w.v, ramp[1000 * k : 1000 * k + 1000])

    def test_empty_stream_yields_nothing(self):
        s = SampleStream(v=np.array([]), i=np.array([]))
        assert list(window_stream(s)) == []

    def test_window_size_enforced(self):
        with pytest.raises(ValueError):
            SampleWindow(v=np.zeros(999), i=np.zeros(999))

    def test_wrong_rate_rejected(self):
        s = SampleStream(v=np.zeros(2000), i=np.zeros(2000), rate_hz=20000)
        with pytest.raises(ValueError):
            list(window_stream(s))
