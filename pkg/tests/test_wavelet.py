"""Decomposition, thresholding and reconstruction of the coefficient pyramid."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aqicast.errors import (
    LevelDepthError,
    NumericInputError,
    PyramidShapeError,
    SigmaEstimationError,
)
from aqicast.wavelet import (
    FILTERS,
    CoeffPyramid,
    DenoiseConfig,
    _highpass,
    denoise_series,
    dwt_decompose,
    dwt_reconstruct,
    max_decomposition_levels,
    threshold_coeffs,
    universal_threshold,
)

ROOT2 = np.sqrt(2.0)


def random_signal_strategy(max_len=128):
    return st.lists(
        st.floats(min_value=-1e6, max_value=1e6, allow_nan=False, width=64),
        min_size=2, max_size=max_len)


class TestFilters:
    @pytest.mark.parametrize("name", sorted(FILTERS))
    def test_orthonormal_filter_bank(self, name):
        low = FILTERS[name]
        high = _highpass(low)
        assert np.sum(low * low) == pytest.approx(1.0, abs=1e-12)
        assert np.sum(high * high) == pytest.approx(1.0, abs=1e-12)
        assert np.sum(low * high) == pytest.approx(0.0, abs=1e-12)
        # orthogonality across the even shift, relevant for the 4-tap filter
        if len(low) == 4:
            assert low[0] * low[2] + low[1] * low[3] == pytest.approx(0.0, abs=1e-12)

    def test_config_validation(self):
        with pytest.raises(ValueError):
            DenoiseConfig(filter="sym4")
        with pytest.raises(ValueError):
            DenoiseConfig(levels=0)
        with pytest.raises(ValueError):
            DenoiseConfig(threshold_rule="bayes")


class TestDecompose:
    def test_haar_hand_example(self):
        pyramid = dwt_decompose([4.0, 2.0, 6.0, 2.0], DenoiseConfig("haar", 1, "none"))
        np.testing.assert_allclose(pyramid.approx, [6.0 / ROOT2, 8.0 / ROOT2], atol=1e-12)
        np.testing.assert_allclose(pyramid.details[0], [2.0 / ROOT2, 4.0 / ROOT2], atol=1e-12)

    def test_constant_signal_has_zero_details(self):
        pyramid = dwt_decompose(np.full(16, 3.7), DenoiseConfig("haar", 4, "none"))
        for detail in pyramid.details:
            assert np.all(detail == 0.0)

    def test_impulse_energy_is_one(self):
        signal = np.zeros(8)
        signal[0] = 1.0
        pyramid = dwt_decompose(signal, DenoiseConfig("haar", 3, "none"))
        energy = pyramid.approx @ pyramid.approx + sum(d @ d for d in pyramid.details)
        assert energy == pytest.approx(signal @ signal, rel=1e-12)

    def test_level_lengths_follow_ceil_law(self):
        pyramid = dwt_decompose(np.arange(11.0), DenoiseConfig("haar", 3, "none"))
        assert [len(d) for d in pyramid.details] == [6, 3, 2]
        assert len(pyramid.approx) == 2
        assert pyramid.level_lengths() == [11, 6, 3, 2]

    def test_non_finite_rejected(self):
        with pytest.raises(NumericInputError):
            dwt_decompose([1.0, np.nan, 2.0, 0.0], DenoiseConfig("haar", 1, "none"))
        with pytest.raises(NumericInputError):
            dwt_decompose([1.0, np.inf], DenoiseConfig("haar", 1, "none"))

    def test_too_many_levels_rejected(self):
        with pytest.raises(LevelDepthError):
            dwt_decompose([1.0, 2.0, 3.0, 4.0], DenoiseConfig("haar", 3, "none"))

    def test_max_decomposition_levels(self):
        assert {n: max_decomposition_levels(n) for n in (1, 2, 3, 4, 5, 8, 1024)} == {
            1: 0, 2: 1, 3: 2, 4: 2, 5: 3, 8: 3, 1024: 10}


class TestReconstruct:
    def test_round_trip_hand_example(self):
        signal = np.array([4.0, 2.0, 6.0, 2.0])
        pyramid = dwt_decompose(signal, DenoiseConfig("haar", 1, "none"))
        np.testing.assert_allclose(dwt_reconstruct(pyramid), signal, atol=1e-9)

    def test_constant_reconstructs_exactly(self):
        signal = np.full(32, 5.5)
        pyramid = dwt_decompose(signal, DenoiseConfig("haar", 3, "none"))
        np.testing.assert_allclose(dwt_reconstruct(pyramid), signal, atol=1e-12)

    def test_zero_pyramid_gives_zero_signal(self):
        pyramid = dwt_decompose(np.zeros(10), DenoiseConfig("db2", 2, "none"))
        assert np.all(dwt_reconstruct(pyramid) == 0.0)

    def test_inconsistent_lengths_rejected(self):
        pyramid = CoeffPyramid(1, np.zeros(2), (np.zeros(3),), 4, "haar")
        with pytest.raises(PyramidShapeError):
            dwt_reconstruct(pyramid)

    def test_unknown_filter_rejected(self):
        pyramid = CoeffPyramid(1, np.zeros(2), (np.zeros(2),), 4, "sym4")
        with pytest.raises(PyramidShapeError):
            dwt_reconstruct(pyramid)

    @settings(max_examples=60, deadline=None)
    @given(data=st.data())
    def test_perfect_reconstruction_and_energy(self, data):
        raw = data.draw(random_signal_strategy())
        filt = data.draw(st.sampled_from(sorted(FILTERS)))
        levels = data.draw(st.integers(1, max_decomposition_levels(len(raw))))
        signal = np.array(raw)
        pyramid = dwt_decompose(signal, DenoiseConfig(filt, levels, "none"))
        restored = dwt_reconstruct(pyramid)
        scale = max(1.0, float(np.max(np.abs(signal))))
        assert np.max(np.abs(restored - signal)) / scale < 1e-9
        energy = pyramid.approx @ pyramid.approx + sum(d @ d for d in pyramid.details)
        reference = signal @ signal
        assert abs(energy - reference) <= 1e-9 * max(reference, 1e-30)


class TestThreshold:
    def _pyramid(self, details, original_length=6):
        approx = np.ones(len(details))
        return CoeffPyramid(1, approx, (np.asarray(details, dtype=float),),
                            original_length, "haar")

    def test_none_is_identity(self):
        pyramid = self._pyramid([3.0, -0.5, 0.2])
        out = threshold_coeffs(pyramid, "none")
        np.testing.assert_array_equal(out.details[0], pyramid.details[0])
        np.testing.assert_array_equal(out.approx, pyramid.approx)

    @pytest.mark.parametrize("rule", ["universal_soft", "universal_hard"])
    def test_zero_details_are_a_fixed_point(self, rule):
        pyramid = self._pyramid([0.0, 0.0, 0.0])
        out = threshold_coeffs(pyramid, rule, sigma_estimate=1.0)
        assert np.all(out.details[0] == 0.0)

    def test_soft_shrinkage_hand_example(self):
        pyramid = self._pyramid([3.0, -0.5, 0.2], original_length=6)
        # sigma chosen so the universal threshold is exactly 1
        sigma = 1.0 / np.sqrt(2.0 * np.log(6))
        assert universal_threshold(pyramid, sigma) == pytest.approx(1.0, rel=1e-12)
        out = threshold_coeffs(pyramid, "universal_soft", sigma_estimate=sigma)
        np.testing.assert_allclose(out.details[0], [2.0, 0.0, 0.0], atol=1e-12)

    def test_hard_rule_keeps_or_zeroes(self):
        pyramid = self._pyramid([3.0, -0.5, 0.2], original_length=6)
        sigma = 1.0 / np.sqrt(2.0 * np.log(6))
        out = threshold_coeffs(pyramid, "universal_hard", sigma_estimate=sigma)
        np.testing.assert_allclose(out.details[0], [3.0, 0.0, 0.0], atol=1e-12)

    def test_sigma_estimated_from_finest_detail_level(self):
        pyramid = self._pyramid([1.0, -2.0, 4.0], original_length=6)
        expected_sigma = 2.0 / 0.6745  # median of |details| over the MAD scale
        assert universal_threshold(pyramid) == pytest.approx(
            expected_sigma * np.sqrt(2.0 * np.log(6)), rel=1e-12)

    def test_approx_is_never_modified(self):
        pyramid = self._pyramid([5.0, 5.0, 5.0])
        out = threshold_coeffs(pyramid, "universal_soft", sigma_estimate=100.0)
        np.testing.assert_array_equal(out.approx, pyramid.approx)

    def test_empty_finest_detail_without_sigma_fails(self):
        pyramid = CoeffPyramid(1, np.array([]), (np.array([]),), 0, "haar")
        with pytest.raises(SigmaEstimationError):
            threshold_coeffs(pyramid, "universal_soft")

    def test_unknown_rule_rejected(self):
        with pytest.raises(ValueError):
            threshold_coeffs(self._pyramid([1.0]), "bayes")

    @settings(max_examples=60, deadline=None)
    @given(details=st.lists(st.floats(-1e4, 1e4, allow_nan=False), min_size=1, max_size=16),
           rule=st.sampled_from(["universal_soft", "universal_hard"]),
           sigma=st.floats(0.0, 100.0, allow_nan=False))
    def test_thresholding_is_non_expansive(self, details, rule, sigma):
        pyramid = self._pyramid(details, original_length=2 * len(details))
        out = threshold_coeffs(pyramid, rule, sigma_estimate=sigma)
        assert np.all(np.abs(out.details[0]) <= np.abs(pyramid.details[0]) + 1e-15)


class TestDenoiseSeries:
    def test_reduces_mse_on_slow_noisy_sinusoid(self):
        rng = np.random.default_rng(42)
        t = np.arange(512)
        clean = 30.0 + 10.0 * np.sin(2.0 * np.pi * t / 512.0)
        noisy = clean + rng.normal(0.0, 0.5, 512)
        out = denoise_series(noisy, DenoiseConfig("haar", 3, "universal_soft"))
        assert np.mean((out - clean) ** 2) < np.mean((noisy - clean) ** 2)

    def test_rule_none_is_identity(self):
        rng = np.random.default_rng(1)
        signal = rng.normal(size=100)
        out = denoise_series(signal, DenoiseConfig("db2", 3, "none"))
        np.testing.assert_allclose(out, signal, atol=1e-9)
