#!/usr/bin/env python3
"""Time a full-year minute-step simulation on the reference grid.

Daylight-factor precomputation is reported separately from the stepping
loop, since it runs once per geometry.

    python scripts/benchmark_year.py [--cell 0.1] [--step 1]
"""

import argparse
import math
import sys
import time
from datetime import datetime, timedelta
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from sidelux.daylight import Simulator  # noqa: E402
from sidelux.io import parse_building  # noqa: E402
from sidelux.solar import WeatherRecord  # noqa: E402


def year_records(year=2009):
    daytime = [0.0] * 1440
    for minute in range(1440):
        x = (minute - 360) / 720.0
        if 0.0 <= x <= 1.0:
            daytime[minute] = math.sin(math.pi * x)
    records = []
    t = datetime(year, 1, 1)
    one = timedelta(minutes=1)
    for _ in range(525_600):
        gh = 900.0 * daytime[t.hour * 60 + t.minute]
        records.append(WeatherRecord(t, gh, 0.35 * gh))
        t += one
    return records


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--building", default=str(Path(__file__).parent / "test_cell.json"))
    parser.add_argument("--cell", type=float, default=0.1)
    parser.add_argument("--step", type=int, default=1)
    args = parser.parse_args()

    building = parse_building(args.building)
    t0 = time.perf_counter()
    sim = Simulator(
        room=building.room,
        location=building.location,
        cell=args.cell,
        workplane_height=building.workplane_height,
        efficacy=building.efficacy,
        patch_scope=building.patch_scope,
    )
    t_df = time.perf_counter() - t0
    print(f"daylight-factor precompute: {sim.grid.n_points} points in {t_df:.2f} s")

    records = year_records()
    probes = [(1.95, 3.27), (1.95, 2.77), (1.95, 2.27), (1.95, 1.77), (1.95, 1.27)]
    t0 = time.perf_counter()
    result = sim.run(records, step_minutes=args.step, probes=probes)
    elapsed = time.perf_counter() - t0
    n = len(result.timestamps)
    print(f"{n} steps on {sim.grid.n_points} points: {elapsed:.1f} s "
          f"({n / elapsed:.0f} steps/s)")


if __name__ == "__main__":
    main()
