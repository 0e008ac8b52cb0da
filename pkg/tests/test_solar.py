import math
from datetime import datetime, timedelta, timezone

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hapsopt import solar

CTX = solar.SolarContext(39.1047, 22.3095, 0.29)
PANEL = solar.PanelConfig()


def test_julian_day_of_solstice_dates():
    assert solar.julian_day(datetime(2021, 12, 21)) == 2459569.5
    assert solar.julian_day(datetime(2021, 6, 21)) == 2459386.5


def test_julian_day_respects_timezone():
    local = datetime(2021, 6, 21, 3, tzinfo=timezone(timedelta(hours=3)))
    assert solar.julian_day(local) == 2459386.5


def test_day_of_year():
    assert solar.day_of_year(datetime(2021, 1, 1)) == 1.0
    assert solar.day_of_year(datetime(2021, 12, 21, 12)) == pytest.approx(355.5)


def test_eccentricity_extremes():
    assert solar.eccentricity_factor(0) == pytest.approx(1.034)
    assert solar.eccentricity_factor(182.5) == pytest.approx(0.966)


def test_elevation_agrees_with_pysolar():
    pysolar = pytest.importorskip("pysolar.solar")
    rng = np.random.default_rng(1)
    worst = 0.0
    for minutes in rng.integers(0, 365 * 1440, 400):
        t = datetime(2021, 1, 1, tzinfo=timezone.utc) + timedelta(minutes=int(minutes))
        ref = pysolar.get_altitude(CTX.latitude, CTX.longitude, t)
        if ref > 10:
            worst = max(worst, abs(solar.solar_elevation(CTX, t) - ref))
    # pysolar adds refraction, a few hundredths of a degree at these elevations
    assert worst < 0.15


def test_subsolar_point_near_tropic_in_june():
    # at 22.3 N the June sun passes within about one degree of the zenith
    best = max(solar.solar_elevation(CTX, datetime(2021, 6, 21, 9, m, tzinfo=timezone.utc)) for m in range(60))
    assert 88.5 < best <= 90.0


def test_air_mass():
    assert solar.relative_air_mass(0.0) == pytest.approx(1.0, abs=1e-3)
    assert solar.relative_air_mass(60.0) == pytest.approx(2.0, rel=5e-3)
    assert solar.relative_air_mass(90.0) == math.inf


def test_no_power_at_night():
    night = datetime(2021, 12, 21, 21, tzinfo=timezone.utc)
    assert solar.solar_elevation(CTX, night) < 0
    assert solar.harvested_power(18_000, night, CTX, PANEL) == 0.0


def test_harvest_is_panel_times_irradiance():
    t = datetime(2021, 12, 21, 9, tzinfo=timezone.utc)
    assert solar.harvested_power(18_000, t, CTX, PANEL) == pytest.approx(
        0.2 * 95 * solar.irradiance_at(18_000, t, CTX))


@given(st.floats(11_000, 31_000), st.floats(1.0, 90.0))
def test_attenuation_weakens_with_altitude(h, elev):
    lo = solar.attenuation_factor(h, elev, CTX)
    hi = solar.attenuation_factor(h + 1000, elev, CTX)
    assert 0 < lo <= hi < 1


@given(st.floats(0.5, 89.0))
def test_attenuation_strengthens_toward_horizon(elev):
    assert solar.attenuation_factor(18_000, elev, CTX) <= solar.attenuation_factor(18_000, elev + 1, CTX)


@pytest.mark.parametrize("kw", [dict(latitude=91), dict(longitude=-181), dict(alpha_ext=0)])
def test_context_validation(kw):
    base = dict(longitude=0.0, latitude=0.0, alpha_ext=0.3)
    base.update(kw)
    with pytest.raises(ValueError):
        solar.SolarContext(**base)


def test_panel_validation():
    with pytest.raises(ValueError):
        solar.PanelConfig(efficiency=1.5)
