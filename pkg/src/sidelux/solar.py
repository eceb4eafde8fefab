"""Solar position and reconstruction of outdoor illuminance from
irradiance-only weather records.

The position algorithm follows the Astronomical Almanac's low-precision
form: the sun's mean longitude and anomaly give the ecliptic longitude,
from which declination and the equation of time follow; the hour angle then
comes from true solar time. Accuracy is a few hundredths of a degree over
1950-2100. Azimuth is measured clockwise from North, altitude above the
horizon. Local axes everywhere are x=East, y=North, z=up.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import datetime

import numpy as np

from .errors import DataError

DH_GH_TOL = 0.02  # tolerated diffuse excess over global before data is rejected


@dataclass(frozen=True)
class GeoLocation:
    """Site coordinates; longitude positive east, timezone in hours from UTC."""

    latitude: float
    longitude: float
    timezone: float
    albedo: float = 0.2

    def __post_init__(self):
        if not -90.0 <= self.latitude <= 90.0:
            raise ValueError(f"latitude {self.latitude} out of [-90, 90]")
        if not -180.0 <= self.longitude <= 180.0:
            raise ValueError(f"longitude {self.longitude} out of [-180, 180]")
        if not 0.0 <= self.albedo <= 1.0:
            raise ValueError(f"albedo {self.albedo} out of [0, 1]")


def _sun_direction(altitude: float, azimuth: float) -> tuple[float, float, float]:
    """Unit vector pointing from the sun toward the ground."""
    h = math.radians(altitude)
    a = math.radians(azimuth)
    ch = math.cos(h)
    return (-math.sin(a) * ch, -math.cos(a) * ch, -math.sin(h))


@dataclass(frozen=True, eq=False, slots=True)
class SolarState:
    """Sun altitude/azimuth in degrees plus the matching unit direction
    (from the sun toward the ground)."""

    altitude: float
    azimuth: float
    direction: np.ndarray

    def __post_init__(self):
        if not -90.0 <= self.altitude <= 90.0:
            raise ValueError(f"altitude {self.altitude} out of [-90, 90]")
        if not 0.0 <= self.azimuth < 360.0:
            raise ValueError(f"azimuth {self.azimuth} out of [0, 360)")
        dx, dy, dz = _sun_direction(self.altitude, self.azimuth)
        d = self.direction
        if max(abs(d[0] - dx), abs(d[1] - dy), abs(d[2] - dz)) > 1e-9:
            raise ValueError("direction vector inconsistent with altitude/azimuth")

    @classmethod
    def from_angles(cls, altitude: float, azimuth: float) -> "SolarState":
        azimuth = azimuth % 360.0
        return cls(altitude, azimuth, np.array(_sun_direction(altitude, azimuth)))


_J2000 = datetime(2000, 1, 1, 12, 0, 0)


def sun_position(when: datetime, loc: GeoLocation) -> SolarState:
    """Sun altitude/azimuth for a local civil timestamp.

    Standard geometry: declination and the equation of time from the sun's
    low-precision mean elements, hour angle from true solar time.
    """
    if not 1950 <= when.year <= 2100:
        raise ValueError(f"timestamp year {when.year} outside supported range 1950-2100")
    days = (when - _J2000).total_seconds() / 86400.0 - loc.timezone / 24.0
    mean_long = math.radians((280.460 + 0.9856474 * days) % 360.0)
    mean_anom = math.radians((357.528 + 0.9856003 * days) % 360.0)
    ecl_long = mean_long + math.radians(
        1.915 * math.sin(mean_anom) + 0.020 * math.sin(2.0 * mean_anom)
    )
    obliq = math.radians(23.439 - 0.0000004 * days)
    decl = math.asin(math.sin(obliq) * math.sin(ecl_long))
    ra = math.atan2(math.cos(obliq) * math.sin(ecl_long), math.cos(ecl_long))
    # equation of time in minutes: mean longitude minus right ascension
    eqtime = 4.0 * math.degrees(
        (mean_long - ra + math.pi) % (2.0 * math.pi) - math.pi
    )
    hours = when.hour + when.minute / 60.0 + when.second / 3600.0 + when.microsecond / 3.6e9
    tst = hours * 60.0 + eqtime + 4.0 * loc.longitude - 60.0 * loc.timezone
    ha = math.radians(tst / 4.0 - 180.0)
    phi = math.radians(loc.latitude)
    sin_alt = math.sin(phi) * math.sin(decl) + math.cos(phi) * math.cos(decl) * math.cos(ha)
    sin_alt = min(1.0, max(-1.0, sin_alt))
    altitude = math.degrees(math.asin(sin_alt))
    azimuth = (
        math.degrees(
            math.atan2(
                math.sin(ha) * math.cos(decl),
                math.cos(ha) * math.cos(decl) * math.sin(phi) - math.sin(decl) * math.cos(phi),
            )
        )
        + 180.0
    )
    return SolarState.from_angles(altitude, azimuth)


@dataclass(frozen=True, slots=True)
class WeatherRecord:
    """One weather sample: local civil timestamp, global and diffuse
    horizontal irradiance in W/m^2, optional measured horizontal
    illuminances in lux."""

    timestamp: datetime
    gh: float
    dh: float
    ev_global: float | None = None
    ev_diffuse: float | None = None

    def __post_init__(self):
        if not 0.0 <= self.gh <= 1500.0:
            raise DataError(f"global irradiance {self.gh} W/m^2 out of [0, 1500]")
        if self.dh < 0.0:
            raise DataError(f"diffuse irradiance {self.dh} W/m^2 negative")
        if self.dh > self.gh * (1.0 + DH_GH_TOL) + 1e-9:
            raise DataError(
                f"diffuse irradiance {self.dh} exceeds global {self.gh} by more than "
                f"{DH_GH_TOL:.0%}"
            )
        for name, v in (("ev_global", self.ev_global), ("ev_diffuse", self.ev_diffuse)):
            if v is not None and v < 0.0:
                raise DataError(f"{name} {v} lux negative")


@dataclass(frozen=True)
class EfficacyModel:
    """How outdoor illuminance is obtained from a weather record.

    ``constant`` converts irradiance with fixed luminous efficacies
    (kd for the diffuse part, kb for the beam part, lm/W); ``passthrough``
    prefers measured illuminance fields when a record carries them and
    falls back to the constant conversion otherwise.
    """

    mode: str = "constant"
    kd: float = 120.0
    kb: float = 93.0
    kg: float | None = None

    def __post_init__(self):
        if self.mode not in ("constant", "passthrough"):
            raise ValueError(f"unknown efficacy mode {self.mode!r}")
        if self.mode == "constant":
            for name, v in (("kd", self.kd), ("kb", self.kb), ("kg", self.kg)):
                if v is not None and not 50.0 <= v <= 200.0:
                    raise ValueError(f"efficacy {name}={v} lm/W out of [50, 200]")


@dataclass(frozen=True, slots=True)
class OutdoorIlluminance:
    """Horizontal outdoor illuminances in lux: global, diffuse and the
    direct (sun) part, with global = diffuse + direct by construction."""

    e_global: float
    e_diffuse: float
    e_direct: float

    def __post_init__(self):
        if min(self.e_global, self.e_diffuse, self.e_direct) < 0.0:
            raise DataError("illuminances must be non-negative")
        if abs(self.e_global - (self.e_diffuse + self.e_direct)) > 1e-6 * max(1.0, self.e_global):
            raise DataError("global illuminance must equal diffuse + direct")

    @classmethod
    def from_components(cls, diffuse: float, direct: float) -> "OutdoorIlluminance":
        return cls(diffuse + direct, diffuse, direct)

    def scaled(self, factor: float) -> "OutdoorIlluminance":
        return OutdoorIlluminance.from_components(self.e_diffuse * factor, self.e_direct * factor)


def reconstruct_illuminance(
    rec: WeatherRecord, sun: SolarState, eff: EfficacyModel
) -> OutdoorIlluminance:
    """Outdoor illuminance for one record.

    Below the horizon everything is zero. In passthrough mode measured
    illuminances are used directly when present; otherwise the beam
    horizontal irradiance max(0, Gh - Dh) and the diffuse irradiance are
    converted with the configured efficacies.
    """
    if sun.altitude <= 0.0:
        return OutdoorIlluminance.from_components(0.0, 0.0)
    if eff.mode == "passthrough" and rec.ev_global is not None and rec.ev_diffuse is not None:
        diffuse = rec.ev_diffuse
        direct = max(0.0, rec.ev_global - rec.ev_diffuse)
        return OutdoorIlluminance.from_components(diffuse, direct)
    if rec.dh > rec.gh * (1.0 + DH_GH_TOL) + 1e-9:
        raise DataError(
            f"diffuse irradiance {rec.dh} exceeds global {rec.gh} by more than {DH_GH_TOL:.0%}"
        )
    beam = max(0.0, rec.gh - rec.dh)
    return OutdoorIlluminance.from_components(eff.kd * rec.dh, eff.kb * beam)
