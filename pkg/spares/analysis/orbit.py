# spares/analysis/orbit.py

import math
import logging

import numpy as np

from spares.config import settings
from spares.schemas import ContactGeometry, OrbitGeometry
from spares.exceptions.custom_exceptions import GeometryException, InvalidParameterException

logger = logging.getLogger(__name__)

def raan_drift_rate(orbit: OrbitGeometry) -> float:
    """
    Secular J2 drift of the ascending node of a circular orbit [rad/day].
    """
    a = orbit.semi_major_axis
    if a <= orbit.earth_radius:
        raise InvalidParameterException(f"Semi-major axis {a} km is inside the Earth (R = {orbit.earth_radius} km).")
    mean_motion = np.sqrt(orbit.mu_earth / a**3) # rad/s
    rate = -1.5 * mean_motion * orbit.j2 * (orbit.earth_radius / a) ** 2 * np.cos(orbit.inclination)
    return float(rate * settings.SECONDS_PER_DAY)

def contact_periods_from_drift(relative_drift: float, n_planes: int, n_park: int) -> tuple[float, float]:
    """
    Contact periods [day] for a given relative RAAN drift [rad/day] between the
    constellation planes and the parking orbits.
    """
    if n_planes < 1 or n_park < 1:
        raise InvalidParameterException("n_planes and n_park must be at least 1.")
    delta = abs(relative_drift)
    if delta == 0.0 or not math.isfinite(delta):
        raise GeometryException()
    t_plane = 2.0 * math.pi / (n_park * delta)
    t_park = 2.0 * math.pi / (n_planes * delta)
    return t_plane, t_park

def contact_periods(geom: ContactGeometry) -> tuple[float, float]:
    """
    (t_plane, t_park) [day]: how often a plane meets the next parking orbit, and
    how often a parking orbit meets the next plane.
    """
    relative = raan_drift_rate(geom.plane_orbit) - raan_drift_rate(geom.park_orbit)
    t_plane, t_park = contact_periods_from_drift(relative, geom.n_planes, geom.n_park)
    logger.debug(f"Relative RAAN drift {relative:.6e} rad/day -> T_plane {t_plane:.3f} d, T_park {t_park:.3f} d")
    return t_plane, t_park

def quantize_contact_periods(t_park: float, n_planes: int, n_park: int, t_mc: float) -> tuple[float, float]:
    """
    Rounds geometry-derived periods onto the Markov time grid.

    The parking period is rounded to a multiple of n_park/gcd(n_planes, n_park) steps,
    so the plane period k_p*n_planes/n_park is a whole number of steps and
    t_plane*n_park == t_park*n_planes still holds.
    """
    granule = n_park // math.gcd(n_planes, n_park)
    k_p = max(granule, int(round(t_park / t_mc / granule)) * granule)
    k_i = k_p * n_planes // n_park
    quantized = (k_i * t_mc, k_p * t_mc)
    if not math.isclose(quantized[1], t_park, rel_tol=1e-9):
        logger.warning(f"Contact periods quantized to the {t_mc} d grid: T_park {t_park:.4f} -> {quantized[1]} d, "
                       f"T_plane -> {quantized[0]} d")
    return quantized
