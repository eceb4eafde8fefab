#!/usr/bin/env python3
"""Simulate one clear day and one overcast day in the reference test cell.

Synthesizes minute-step weather, runs the simulation with five probe points
on the window centerline (first 0.23 m from the aperture, then every 0.5 m),
and writes summary CSVs, a noon field file, the daylight-factor map, plus a
per-probe series CSV ready for `sidelux validate`.

    python scripts/run_test_cell_day.py --out out/
"""

import argparse
import math
import sys
from datetime import datetime, timedelta
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from sidelux.daylight import Simulator  # noqa: E402
from sidelux.io import parse_building, write_field_file, write_probe_series_csv, \
    write_results  # noqa: E402
from sidelux.solar import WeatherRecord  # noqa: E402

PROBES = [(1.95, 3.27), (1.95, 2.77), (1.95, 2.27), (1.95, 1.77), (1.95, 1.27)]


def day_records(day: datetime, peak_gh: float, diffuse_fraction: float):
    records = []
    for minute in range(1440):
        t = day + timedelta(minutes=minute)
        x = (minute - 360) / 720.0
        f = math.sin(math.pi * x) if 0.0 <= x <= 1.0 else 0.0
        gh = peak_gh * max(0.0, f)
        records.append(WeatherRecord(t, gh, diffuse_fraction * gh))
    return records


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--building", default=str(Path(__file__).parent / "test_cell.json"))
    parser.add_argument("--out", default="out", help="output directory")
    parser.add_argument("--day", default="2009-07-15", help="simulated date (winter: sun north)")
    args = parser.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    building = parse_building(args.building)
    sim = Simulator(
        room=building.room,
        location=building.location,
        cell=building.workplane_cell,
        workplane_height=building.workplane_height,
        efficacy=building.efficacy,
        patch_scope=building.patch_scope,
    )
    print(f"grid: {sim.grid.nu} x {sim.grid.nv} cells, {sim.grid.n_points} points")
    write_field_file(out / "df_map.txt", sim.grid, sim.df * 100.0, "DF_pct")

    day = datetime.fromisoformat(args.day)
    noon = day + timedelta(hours=12)
    cases = {
        "clear": day_records(day, peak_gh=900.0, diffuse_fraction=0.3),
        "overcast": day_records(day, peak_gh=350.0, diffuse_fraction=1.0),
    }
    for name, records in cases.items():
        result = sim.run(records, probes=PROBES, field_at=[noon])
        write_results(result, out / name)
        write_probe_series_csv(result, 0, out / f"{name}_probe1.csv")
        hourly = result.hourly()
        peak = hourly.probe_global.max(axis=0)
        print(f"{name}: patch area at noon {result.fields[noon].patch_area:.3f} m^2; "
              f"hourly probe peaks [lux]: " + ", ".join(f"{v:.0f}" for v in peak))
    print(f"outputs in {out}/")


if __name__ == "__main__":
    main()
