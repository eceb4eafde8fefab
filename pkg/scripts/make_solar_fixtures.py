#!/usr/bin/env python3
"""Generate frozen sun-position reference values for the test suite.

Implements the NOAA solar-calculator spreadsheet equations (Julian-century
polynomials for the sun's mean elements, apparent longitude, obliquity,
equation of time) independently of the package's own algorithm, and writes
20 random (location, time) pairs with their geometric altitude/azimuth to
tests/data/solar_noaa.json. Run from the repository root:

    python scripts/make_solar_fixtures.py
"""

import json
import math
import random
from datetime import datetime, timedelta
from pathlib import Path


def julian_day(when: datetime, tz_hours: float) -> float:
    y, m = when.year, when.month
    d = (
        when.day
        + when.hour / 24.0
        + when.minute / 1440.0
        + when.second / 86400.0
        - tz_hours / 24.0
    )
    if m <= 2:
        y -= 1
        m += 12
    a = y // 100
    b = 2 - a + a // 4
    return math.floor(365.25 * (y + 4716)) + math.floor(30.6001 * (m + 1)) + d + b - 1524.5


def noaa_sun_position(when: datetime, lat: float, lon: float, tz: float):
    jd = julian_day(when, tz)
    jc = (jd - 2451545.0) / 36525.0

    l0 = (280.46646 + jc * (36000.76983 + jc * 0.0003032)) % 360.0
    m = 357.52911 + jc * (35999.05029 - 0.0001537 * jc)
    ecc = 0.016708634 - jc * (0.000042037 + 0.0000001267 * jc)
    mr = math.radians(m)
    c = (
        math.sin(mr) * (1.914602 - jc * (0.004817 + 0.000014 * jc))
        + math.sin(2 * mr) * (0.019993 - 0.000101 * jc)
        + math.sin(3 * mr) * 0.000289
    )
    true_long = l0 + c
    omega = math.radians(125.04 - 1934.136 * jc)
    app_long = true_long - 0.00569 - 0.00478 * math.sin(omega)
    mean_obliq = 23.0 + (26.0 + (21.448 - jc * (46.815 + jc * (0.00059 - jc * 0.001813))) / 60.0) / 60.0
    obliq = mean_obliq + 0.00256 * math.cos(omega)

    obr = math.radians(obliq)
    alr = math.radians(app_long)
    decl = math.asin(math.sin(obr) * math.sin(alr))

    var_y = math.tan(obr / 2.0) ** 2
    l0r = math.radians(l0)
    eqtime = 4.0 * math.degrees(
        var_y * math.sin(2 * l0r)
        - 2.0 * ecc * math.sin(mr)
        + 4.0 * ecc * var_y * math.sin(mr) * math.cos(2 * l0r)
        - 0.5 * var_y * var_y * math.sin(4 * l0r)
        - 1.25 * ecc * ecc * math.sin(2 * mr)
    )

    minutes = when.hour * 60.0 + when.minute + when.second / 60.0
    tst = (minutes + eqtime + 4.0 * lon - 60.0 * tz) % 1440.0
    ha = tst / 4.0 - 180.0
    if ha < -180.0:
        ha += 360.0

    phi = math.radians(lat)
    har = math.radians(ha)
    cos_zen = math.sin(phi) * math.sin(decl) + math.cos(phi) * math.cos(decl) * math.cos(har)
    cos_zen = min(1.0, max(-1.0, cos_zen))
    zen = math.acos(cos_zen)
    altitude = 90.0 - math.degrees(zen)

    denom = math.cos(phi) * math.sin(zen)
    if abs(denom) < 1e-12:
        azimuth = 0.0
    else:
        cos_az = (math.sin(phi) * math.cos(zen) - math.sin(decl)) / denom
        cos_az = min(1.0, max(-1.0, cos_az))
        az = math.degrees(math.acos(cos_az))
        azimuth = (az + 180.0) % 360.0 if ha > 0.0 else (540.0 - az) % 360.0
    return altitude, azimuth


def main() -> None:
    rng = random.Random(20090321)
    cases = []
    while len(cases) < 20:
        lat = rng.uniform(-65.0, 65.0)
        lon = rng.uniform(-180.0, 180.0)
        tz = round(lon / 15.0)
        when = datetime(rng.randint(1995, 2035), 1, 1) + timedelta(
            days=rng.randint(0, 364), hours=rng.randint(0, 23), minutes=rng.randint(0, 59)
        )
        alt, az = noaa_sun_position(when, lat, lon, tz)
        if abs(alt) > 80.0:  # azimuth is ill-conditioned near the zenith
            continue
        cases.append(
            {
                "lat": round(lat, 6),
                "lon": round(lon, 6),
                "tz": tz,
                "timestamp": when.isoformat(),
                "altitude": round(alt, 6),
                "azimuth": round(az, 6),
            }
        )
    out = Path(__file__).resolve().parents[1] / "tests" / "data" / "solar_noaa.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(cases, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {len(cases)} cases to {out}")


if __name__ == "__main__":
    main()
