import json
from datetime import datetime
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from sidelux.errors import DataError
from sidelux.solar import (
    EfficacyModel,
    GeoLocation,
    SolarState,
    WeatherRecord,
    reconstruct_illuminance,
    sun_position,
)

FIXTURES = Path(__file__).parent / "data" / "solar_noaa.json"


def azimuth_diff(a, b):
    return abs((a - b + 180.0) % 360.0 - 180.0)


class TestSunPosition:
    def test_equator_equinox_noon_overhead(self):
        loc = GeoLocation(latitude=0.0, longitude=0.0, timezone=0.0)
        best = max(
            sun_position(datetime(2009, 3, 20, h, m), loc).altitude
            for h in range(11, 14)
            for m in range(0, 60, 2)
        )
        assert best == pytest.approx(90.0, abs=0.5)

    def test_tropical_site_equinox_noon(self):
        loc = GeoLocation(latitude=-21.34, longitude=55.48, timezone=4.0)
        best = max(
            sun_position(datetime(2009, 3, 20, h, m), loc).altitude
            for h in range(11, 14)
            for m in range(0, 60, 2)
        )
        assert best == pytest.approx(68.7, abs=0.5)

    def test_midnight_below_horizon(self):
        loc = GeoLocation(latitude=45.0, longitude=7.0, timezone=1.0)
        assert sun_position(datetime(2010, 6, 15, 0, 0), loc).altitude < 0.0

    def test_noaa_reference_cases(self):
        cases = json.loads(FIXTURES.read_text())
        assert len(cases) == 20
        for c in cases:
            loc = GeoLocation(latitude=c["lat"], longitude=c["lon"], timezone=c["tz"])
            s = sun_position(datetime.fromisoformat(c["timestamp"]), loc)
            assert s.altitude == pytest.approx(c["altitude"], abs=0.5)
            assert azimuth_diff(s.azimuth, c["azimuth"]) <= 0.5

    def test_year_range_enforced(self):
        loc = GeoLocation(0.0, 0.0, 0.0)
        with pytest.raises(ValueError):
            sun_position(datetime(1900, 1, 1), loc)

    def test_direction_consistent_with_angles(self):
        s = SolarState.from_angles(30.0, 135.0)
        assert s.direction[2] == pytest.approx(-0.5, abs=1e-12)
        # sun in the south-east: light travels toward north-west
        assert s.direction[0] < 0.0 and s.direction[1] > 0.0


class TestGeoLocation:
    def test_bad_latitude(self):
        with pytest.raises(ValueError):
            GeoLocation(latitude=95.0, longitude=0.0, timezone=0.0)

    def test_bad_albedo(self):
        with pytest.raises(ValueError):
            GeoLocation(latitude=0.0, longitude=0.0, timezone=0.0, albedo=1.5)


class TestWeatherRecord:
    def test_diffuse_exceeding_global_rejected(self):
        with pytest.raises(DataError):
            WeatherRecord(datetime(2009, 1, 1), 100.0, 500.0)

    def test_small_excess_tolerated(self):
        rec = WeatherRecord(datetime(2009, 1, 1), 100.0, 101.0)
        assert rec.dh == 101.0

    def test_irradiance_cap(self):
        with pytest.raises(DataError):
            WeatherRecord(datetime(2009, 1, 1), 1600.0, 100.0)


HIGH_SUN = SolarState.from_angles(60.0, 0.0)
NIGHT_SUN = SolarState.from_angles(-10.0, 0.0)
EFF = EfficacyModel()


class TestReconstruct:
    def test_zero_inputs(self):
        out = reconstruct_illuminance(WeatherRecord(datetime(2009, 1, 1, 12), 0.0, 0.0), HIGH_SUN, EFF)
        assert (out.e_global, out.e_diffuse, out.e_direct) == (0.0, 0.0, 0.0)

    def test_constant_efficacies(self):
        rec = WeatherRecord(datetime(2009, 1, 1, 12), 500.0, 100.0)
        out = reconstruct_illuminance(rec, HIGH_SUN, EFF)
        assert out.e_diffuse == pytest.approx(12000.0)
        assert out.e_direct == pytest.approx(37200.0)
        assert out.e_global == pytest.approx(49200.0)

    def test_passthrough_overcast(self):
        rec = WeatherRecord(datetime(2009, 1, 1, 12), 200.0, 200.0, 10000.0, 10000.0)
        out = reconstruct_illuminance(rec, HIGH_SUN, EfficacyModel(mode="passthrough"))
        assert out.e_direct == 0.0
        assert out.e_global == pytest.approx(10000.0)

    def test_passthrough_without_measurements_falls_back(self):
        rec = WeatherRecord(datetime(2009, 1, 1, 12), 500.0, 100.0)
        out = reconstruct_illuminance(rec, HIGH_SUN, EfficacyModel(mode="passthrough"))
        assert out.e_global == pytest.approx(49200.0)

    def test_night_zero(self):
        rec = WeatherRecord(datetime(2009, 1, 1, 0), 500.0, 100.0)
        out = reconstruct_illuminance(rec, NIGHT_SUN, EFF)
        assert out.e_global == 0.0

    def test_clamp_small_diffuse_excess(self):
        rec = WeatherRecord(datetime(2009, 1, 1, 12), 100.0, 101.0)
        out = reconstruct_illuminance(rec, HIGH_SUN, EFF)
        assert out.e_direct == 0.0
        assert out.e_diffuse == pytest.approx(12120.0)


class TestEfficacyModel:
    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            EfficacyModel(kd=30.0)

    def test_unknown_mode(self):
        with pytest.raises(ValueError):
            EfficacyModel(mode="perez")


@settings(max_examples=80, deadline=None)
@given(
    st.floats(0.0, 1200.0),
    st.floats(0.0, 1.0),
    st.floats(1.0, 89.0),
)
def test_additivity_property(gh, frac, alt):
    rec = WeatherRecord(datetime(2009, 6, 1, 12), gh, gh * frac)
    out = reconstruct_illuminance(rec, SolarState.from_angles(alt, 180.0), EFF)
    assert out.e_global == out.e_diffuse + out.e_direct


@settings(max_examples=40, deadline=None)
@given(st.floats(0.0, 1200.0), st.floats(0.0, 1.0), st.floats(-89.0, 0.0))
def test_night_monotonicity_property(gh, frac, alt):
    rec = WeatherRecord(datetime(2009, 6, 1, 2), gh, gh * frac)
    out = reconstruct_illuminance(rec, SolarState.from_angles(alt, 0.0), EFF)
    assert out.e_global == 0.0 and out.e_diffuse == 0.0 and out.e_direct == 0.0


@settings(max_examples=40, deadline=None)
@given(st.floats(10.0, 1200.0), st.floats(0.1, 0.9), st.floats(0.01, 5.0))
def test_continuity_in_irradiance(gh, frac, delta):
    """The conversion is linear, so small input changes bound output changes."""
    sun = SolarState.from_angles(45.0, 180.0)
    dh = gh * frac
    a = reconstruct_illuminance(WeatherRecord(datetime(2009, 6, 1, 12), gh, dh), sun, EFF)
    gh2 = min(gh + delta, 1500.0)
    b = reconstruct_illuminance(WeatherRecord(datetime(2009, 6, 1, 12), gh2, dh), sun, EFF)
    assert abs(b.e_global - a.e_global) <= 200.0 * (gh2 - gh) + 1e-9
