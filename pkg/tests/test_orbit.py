# tests/test_orbit.py

import math

import pytest
from pydantic import ValidationError

from spares.schemas import ContactGeometry, OrbitGeometry
from spares.analysis.orbit import (
    contact_periods, contact_periods_from_drift, quantize_contact_periods, raan_drift_rate
)
from spares.exceptions.custom_exceptions import GeometryException, InvalidParameterException

def test_baseline_contact_periods_from_drift():
    drift = 2 * math.pi / (40 * 15)
    t_plane, t_park = contact_periods_from_drift(drift, n_planes=40, n_park=3)
    assert t_plane == pytest.approx(200.0, rel=1e-12)
    assert t_park == pytest.approx(15.0, rel=1e-12)

def test_single_parking_orbit_period():
    t_plane, _ = contact_periods_from_drift(2 * math.pi / 360, n_planes=10, n_park=1)
    assert t_plane == pytest.approx(360.0, rel=1e-12)

def test_symmetric_counts_give_equal_periods():
    t_plane, t_park = contact_periods_from_drift(0.01, n_planes=6, n_park=6)
    assert t_plane == t_park

def test_drift_sign_does_not_matter():
    assert contact_periods_from_drift(-0.02, 8, 2) == contact_periods_from_drift(0.02, 8, 2)

def test_zero_drift_is_infeasible():
    with pytest.raises(GeometryException) as exc:
        contact_periods_from_drift(0.0, 40, 3)
    assert exc.value.exit_code == 2

def test_sun_synchronous_drift_rate():
    orbit = OrbitGeometry(semi_major_axis=7078.137, inclination=math.radians(98.19))
    assert raan_drift_rate(orbit) == pytest.approx(2 * math.pi / 365.2422, rel=2e-3)

def test_prograde_orbit_regresses():
    orbit = OrbitGeometry(semi_major_axis=6928.137, inclination=math.radians(53.0))
    assert raan_drift_rate(orbit) < 0.0

def test_polar_orbit_has_no_drift():
    orbit = OrbitGeometry(semi_major_axis=6928.137, inclination=math.pi / 2)
    assert raan_drift_rate(orbit) == pytest.approx(0.0, abs=1e-15)

def test_drift_matches_closed_form():
    a, inc = 7178.0, math.radians(53.0)
    mean_motion = math.sqrt(398600.4418 / a**3)
    expected = -1.5 * 1.08263e-3 * (6378.137 / a) ** 2 * mean_motion * math.cos(inc) * 86400.0
    assert raan_drift_rate(OrbitGeometry(semi_major_axis=a, inclination=inc)) == pytest.approx(expected, rel=1e-12)
    assert math.degrees(expected) == pytest.approx(-3.9657, abs=1e-4)

def test_equatorial_and_retrograde_drift_mirror():
    prograde = raan_drift_rate(OrbitGeometry(semi_major_axis=7178.0, inclination=0.0))
    retrograde = raan_drift_rate(OrbitGeometry(semi_major_axis=7178.0, inclination=math.pi))
    assert prograde < 0.0 < retrograde
    assert retrograde == pytest.approx(-prograde, rel=1e-12)

def test_drift_magnitude_falls_with_altitude():
    rates = [abs(raan_drift_rate(OrbitGeometry(semi_major_axis=a, inclination=math.radians(53.0))))
             for a in (6678.0, 6928.0, 7178.0, 7678.0, 8378.0)]
    assert all(lower > higher for lower, higher in zip(rates, rates[1:]))

def test_lower_parking_orbit_drifts_faster():
    plane = OrbitGeometry(semi_major_axis=6928.137, inclination=math.radians(53.0))
    park = OrbitGeometry(semi_major_axis=6728.137, inclination=math.radians(53.0))
    assert abs(raan_drift_rate(park)) > abs(raan_drift_rate(plane))

def test_geometry_periods_satisfy_identity():
    geometry = ContactGeometry(
        n_planes=40, n_park=3,
        plane_orbit=OrbitGeometry(semi_major_axis=6928.137, inclination=math.radians(53.0)),
        park_orbit=OrbitGeometry(semi_major_axis=6728.137, inclination=math.radians(53.0)),
    )
    t_plane, t_park = contact_periods(geometry)
    assert t_plane * 3 == pytest.approx(t_park * 40, rel=1e-12)

def test_geometry_requires_shared_inclination():
    with pytest.raises(ValidationError):
        ContactGeometry(
            n_planes=4, n_park=1,
            plane_orbit=OrbitGeometry(semi_major_axis=6928.137, inclination=0.9),
            park_orbit=OrbitGeometry(semi_major_axis=6728.137, inclination=1.0),
        )

def test_geometry_requires_distinct_altitudes():
    orbit = OrbitGeometry(semi_major_axis=6928.137, inclination=0.9)
    with pytest.raises(ValidationError):
        ContactGeometry(n_planes=4, n_park=1, plane_orbit=orbit, park_orbit=orbit)

def test_orbit_inside_earth_rejected():
    with pytest.raises(ValidationError):
        OrbitGeometry(semi_major_axis=6000.0, inclination=0.5)

def test_invalid_counts_rejected():
    with pytest.raises(InvalidParameterException):
        contact_periods_from_drift(0.01, n_planes=0, n_park=1)

class TestQuantization:
    def test_rounds_onto_grid_and_keeps_identity(self):
        t_plane, t_park = quantize_contact_periods(15.3, n_planes=40, n_park=3, t_mc=1.0)
        assert (t_plane, t_park) == (200.0, 15.0)
        assert t_plane * 3 == t_park * 40

    def test_exact_periods_unchanged(self):
        assert quantize_contact_periods(15.0, n_planes=40, n_park=3, t_mc=1.0) == (200.0, 15.0)

    def test_short_period_clamped_to_one_granule(self):
        t_plane, t_park = quantize_contact_periods(0.2, n_planes=4, n_park=2, t_mc=1.0)
        assert (t_plane, t_park) == (2.0, 1.0)

    @pytest.mark.parametrize("n_planes,n_park", [(40, 3), (12, 8), (7, 7), (24, 1)])
    def test_plane_period_is_whole_steps(self, n_planes, n_park):
        t_plane, t_park = quantize_contact_periods(13.7, n_planes=n_planes, n_park=n_park, t_mc=1.0)
        assert float(t_plane).is_integer() and float(t_park).is_integer()
        assert t_plane * n_park == t_park * n_planes
