"""AQI arithmetic, normalization and the bucket mapping."""

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aqicast.aqi import (
    AqiConfig,
    BucketLabel,
    bucket_of_score,
    compute_aqi,
    normalize_aqi,
)
from aqicast.errors import MissingPollutantError, NumericInputError
from aqicast.schema import AQI_MEAN_POLLUTANTS, AQI_POLLUTANTS

FULL_READING = {"PM2.5": 50.0, "PM10": 100.0, "SO2": 10.0, "NOx": 20.0,
                "NH3": 5.0, "CO": 1.0, "O3": 30.0}

nonneg = st.floats(min_value=0.0, max_value=1e6, allow_nan=False)


class TestComputeAqi:
    def test_all_zero_reading(self):
        assert compute_aqi({name: 0.0 for name in AQI_POLLUTANTS}) == 0.0

    def test_hand_arithmetic(self):
        # mean(50, 100, 10, 20, 5) + max(1, 30) = 37 + 30
        assert compute_aqi(FULL_READING) == pytest.approx(67.0)

    def test_swapping_co_and_o3_changes_nothing(self):
        swapped = dict(FULL_READING, CO=FULL_READING["O3"], O3=FULL_READING["CO"])
        assert compute_aqi(swapped) == compute_aqi(FULL_READING)

    @pytest.mark.parametrize("missing", AQI_POLLUTANTS)
    def test_missing_pollutant_named_in_error(self, missing):
        reading = {k: v for k, v in FULL_READING.items() if k != missing}
        with pytest.raises(MissingPollutantError) as excinfo:
            compute_aqi(reading)
        assert missing in str(excinfo.value)

    def test_nan_counts_as_missing(self):
        with pytest.raises(MissingPollutantError):
            compute_aqi(dict(FULL_READING, CO=float("nan")))

    def test_negative_value_rejected(self):
        with pytest.raises(NumericInputError):
            compute_aqi(dict(FULL_READING, SO2=-1.0))

    @settings(max_examples=100, deadline=None)
    @given(base=st.fixed_dictionaries({name: nonneg for name in AQI_POLLUTANTS}),
           pollutant=st.sampled_from(AQI_POLLUTANTS),
           bump=st.floats(min_value=0.0, max_value=1e6, allow_nan=False))
    def test_monotone_in_every_input(self, base, pollutant, bump):
        bumped = dict(base)
        bumped[pollutant] = bumped[pollutant] + bump
        assert compute_aqi(bumped) >= compute_aqi(base)

    @settings(max_examples=50, deadline=None)
    @given(base=st.fixed_dictionaries({name: nonneg for name in AQI_POLLUTANTS}))
    def test_bucket_invariant_under_permuting_averaged_pollutants(self, base):
        reference = bucket_of_score(normalize_aqi(compute_aqi(base)))
        values = [base[name] for name in AQI_MEAN_POLLUTANTS]
        for perm in itertools.islice(itertools.permutations(values), 8):
            permuted = dict(base)
            permuted.update(zip(AQI_MEAN_POLLUTANTS, perm))
            assert bucket_of_score(normalize_aqi(compute_aqi(permuted))) == reference


class TestNormalize:
    def test_zero(self):
        assert normalize_aqi(0.0) == 0.0

    def test_normalizer_maps_to_one(self):
        assert normalize_aqi(400.0) == 1.0

    def test_division(self):
        assert normalize_aqi(67.0) == pytest.approx(0.1675)

    def test_custom_normalizer(self):
        assert normalize_aqi(100.0, AqiConfig(normalizer=200.0)) == 0.5

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            normalize_aqi(-1.0)


class TestBucketOfScore:
    @pytest.mark.parametrize("score,expected", [
        (0.0, BucketLabel.GOOD),
        (1.5, BucketLabel.SEVERE),
        (0.3, BucketLabel.MODERATE),
        (0.25, BucketLabel.SATISFACTORY),  # upper-closed boundary
        (0.5, BucketLabel.MODERATE),
        (0.75, BucketLabel.POOR),
        (1.0, BucketLabel.VERY_POOR),
        (1.0000001, BucketLabel.SEVERE),
    ])
    def test_mapping(self, score, expected):
        assert bucket_of_score(score) == expected

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            bucket_of_score(-0.1)

    def test_total_order_of_labels(self):
        assert (BucketLabel.GOOD < BucketLabel.SATISFACTORY < BucketLabel.MODERATE
                < BucketLabel.POOR < BucketLabel.VERY_POOR < BucketLabel.SEVERE)

    def test_display_round_trip(self):
        for label in BucketLabel:
            assert BucketLabel.from_display(label.display) == label
        with pytest.raises(ValueError):
            BucketLabel.from_display("Hazardous")

    def test_custom_bounds(self):
        config = AqiConfig(bounds=(0.0, 0.1, 0.2, 0.3, 0.4))
        assert bucket_of_score(0.35, config) == BucketLabel.VERY_POOR
        assert bucket_of_score(0.45, config) == BucketLabel.SEVERE

    def test_bounds_must_ascend(self):
        with pytest.raises(ValueError):
            AqiConfig(bounds=(0.0, 0.5, 0.25, 0.75, 1.0))
        with pytest.raises(ValueError):
            AqiConfig(normalizer=0.0)

    @settings(max_examples=200, deadline=None)
    @given(a=st.floats(0.0, 2.0, allow_nan=False), b=st.floats(0.0, 2.0, allow_nan=False))
    def test_total_and_monotone(self, a, b):
        low, high = sorted((a, b))
        assert bucket_of_score(low) <= bucket_of_score(high)
