#!/usr/bin/env python3
"""Regenerate the bundled test cases under tests/cases/.

Everything is closed-form (trig shapes, no RNG), so reruns are
reproducible. The cases are sized for fast tests: a 3-bus triangle that
congests at peak, a PJM-style 5-bus system with a wind unit, and a ~30-bus
ring with chords, radial spurs, a parallel line pair, transformers, and a
long ineligible line.
"""

import csv
import math
from pathlib import Path

BASE = Path(__file__).resolve().parent.parent / "tests" / "cases"
HOURS = [f"2016-07-01T{h:02d}:00:00Z" for h in range(24)]


def write(path, header, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def shape(h):
    """Daily demand shape in [0.6, 1.0], peaking mid-afternoon."""
    return 0.6 + 0.4 * math.sin(math.pi * h / 23.0)


def weather_rows(cells, n_hours=24, base_temp=295.0, temp_amp=8.0, speed_base=4.5,
                 speed_amp=2.5):
    rows = []
    for h in range(n_hours):
        for i, (lat, lon) in enumerate(cells):
            temp = base_temp + temp_amp * math.sin(2 * math.pi * (h - 14) / 24.0) + \
                (i % 3) - 1.0
            speed = speed_base + speed_amp * math.sin(2 * math.pi * h / 24.0 + i)
            theta = 2 * math.pi * h / 24.0 + 0.7 * i
            rows.append((HOURS[h], f"{lat:.4f}", f"{lon:.4f}", f"{temp:.3f}",
                         f"{speed * math.cos(theta):.4f}", f"{speed * math.sin(theta):.4f}"))
    return rows


def case3():
    d = BASE / "case3"
    write(d / "bus.csv", ["id", "lat", "lon", "base_kv"], [
        (1, 31.00, -99.00, 115.0),
        (2, 31.25, -99.25, 115.0),
        (3, 31.30, -98.80, 115.0),
    ])
    write(d / "branch.csv",
          ["id", "from_bus", "to_bus", "reactance_pu", "rating_mva", "kind",
           "length_km", "diameter_m"], [
        (1, 1, 2, 0.1, 60.0, "line", "", ""),
        (2, 2, 3, 0.1, 60.0, "line", "", ""),
        (3, 1, 3, 0.1, 60.0, "line", "", ""),
    ])
    write(d / "gen.csv", ["id", "bus", "fuel", "p_min_mw", "p_max_mw",
                          "seg1_mw", "seg1_cost", "seg2_mw", "seg2_cost"], [
        (1, 1, "natural_gas", 0.0, 200.0, 100.0, 12.0, 100.0, 18.0),
        (2, 3, "natural_gas", 0.0, 150.0, 150.0, 35.0, "", ""),
    ])
    rows = []
    for h in range(24):
        rows.append((HOURS[h], 2, f"{62.0 * shape(h):.3f}"))
        rows.append((HOURS[h], 3, f"{30.0 * shape(h):.3f}"))
    write(d / "demand.csv", ["time", "bus_id", "mw"], rows)
    cells = [(30.9, -99.1), (30.9, -98.8), (31.3, -99.1), (31.3, -98.8)]
    write(BASE / "weather_case3.csv",
          ["time", "lat", "lon", "temp_k", "wind_u_ms", "wind_v_ms"],
          weather_rows(cells))


def case5():
    d = BASE / "case5"
    write(d / "bus.csv", ["id", "lat", "lon", "base_kv"], [
        (1, 32.00, -100.00, 230.0),
        (2, 32.30, -100.00, 230.0),
        (3, 32.30, -99.60, 230.0),
        (4, 32.00, -99.60, 230.0),
        (5, 31.80, -99.80, 230.0),
    ])
    write(d / "branch.csv",
          ["id", "from_bus", "to_bus", "reactance_pu", "rating_mva", "kind",
           "length_km", "diameter_m"], [
        (1, 1, 2, 0.0281, 250.0, "line", "", ""),
        (2, 1, 4, 0.0304, 150.0, "line", "", ""),
        (3, 1, 5, 0.0064, 400.0, "line", "", 0.0281),   # explicit diameter
        (4, 2, 3, 0.0108, 350.0, "line", "", ""),
        (5, 3, 4, 0.0297, 240.0, "transformer", 150.0, ""),  # explicit length
        (6, 4, 5, 0.0297, 240.0, "line", "", ""),
    ])
    write(d / "gen.csv", ["id", "bus", "fuel", "p_min_mw", "p_max_mw",
                          "seg1_mw", "seg1_cost", "seg2_mw", "seg2_cost"], [
        (1, 1, "natural_gas", 0.0, 170.0, 100.0, 12.0, 70.0, 16.0),
        (2, 1, "wind", 0.0, 110.0, 110.0, 0.5, "", ""),
        (3, 3, "coal", 0.0, 520.0, 300.0, 26.0, 220.0, 34.0),
        (4, 4, "nuclear", 0.0, 200.0, 200.0, 8.0, "", ""),
        (5, 5, "natural_gas", 0.0, 600.0, 300.0, 30.0, 300.0, 40.0),
    ])
    demand = []
    for h in range(24):
        s = shape(h)
        demand.append((HOURS[h], 2, f"{270.0 * s:.3f}"))
        demand.append((HOURS[h], 3, f"{280.0 * s:.3f}"))
        demand.append((HOURS[h], 4, f"{360.0 * s:.3f}"))
    write(d / "demand.csv", ["time", "bus_id", "mw"], demand)
    avail = []
    for h in range(24):
        mw = 30.0 + 80.0 * (0.5 + 0.5 * math.sin(2 * math.pi * (h - 2) / 24.0))
        avail.append((HOURS[h], 2, f"{mw:.3f}"))
    write(d / "availability.csv", ["time", "gen_id", "mw"], avail)
    cells = [(31.8, -100.1), (31.8, -99.5), (32.3, -100.1), (32.3, -99.5)]
    write(BASE / "weather_case5.csv",
          ["time", "lat", "lon", "temp_k", "wind_u_ms", "wind_v_ms"],
          weather_rows(cells))


def case30():
    d = BASE / "case30"
    center_lat, center_lon = 31.5, -100.0
    ring = 28
    buses = []
    for i in range(ring):
        angle = 2 * math.pi * i / ring
        buses.append((i + 1, round(center_lat + 0.55 * math.sin(angle), 4),
                      round(center_lon + 0.62 * math.cos(angle), 4), 138.0))
    # radial spur buses hang off the ring
    buses.append((29, 31.5 + 0.75, -100.0 + 0.70, 138.0))
    buses.append((30, 31.5 - 0.75, -100.0 - 0.70, 138.0))
    write(d / "bus.csv", ["id", "lat", "lon", "base_kv"], buses)

    branches = []
    bid = 1
    for i in range(ring):  # the ring itself
        a, b = i + 1, (i + 1) % ring + 1
        branches.append((bid, a, b, 0.06, 260.0, "line", "", ""))
        bid += 1
    # parallel identical pair alongside ring branch 1-2
    branches.append((bid, 1, 2, 0.06, 260.0, "line", "", "")); bid += 1
    # chords: one long (ineligible), two mid-length, one transformer
    branches.append((bid, 1, 15, 0.18, 220.0, "line", "", "")); bid += 1   # >100 km
    branches.append((bid, 4, 10, 0.12, 220.0, "line", "", "")); bid += 1
    branches.append((bid, 18, 24, 0.12, 220.0, "line", "", "")); bid += 1
    branches.append((bid, 8, 22, 0.20, 200.0, "transformer", "", "")); bid += 1
    # radial spurs (bridges)
    branches.append((bid, 4, 29, 0.08, 120.0, "line", "", "")); bid += 1
    branches.append((bid, 18, 30, 0.08, 120.0, "line", "", "")); bid += 1
    write(d / "branch.csv",
          ["id", "from_bus", "to_bus", "reactance_pu", "rating_mva", "kind",
           "length_km", "diameter_m"], branches)

    gens = [
        (1, 3, "nuclear", 0.0, 300.0, 300.0, 8.0, "", ""),
        (2, 7, "coal", 0.0, 400.0, 250.0, 22.0, 150.0, 28.0),
        (3, 21, "coal", 0.0, 350.0, 200.0, 24.0, 150.0, 30.0),
        (4, 12, "natural_gas", 0.0, 300.0, 150.0, 32.0, 150.0, 40.0),
        (5, 25, "natural_gas", 0.0, 300.0, 150.0, 34.0, 150.0, 44.0),
        (6, 17, "wind", 0.0, 400.0, 400.0, 0.5, "", ""),
        (7, 9, "wind", 0.0, 200.0, 200.0, 0.5, "", ""),
        (8, 23, "solar", 0.0, 150.0, 150.0, 0.1, "", ""),
    ]
    write(d / "gen.csv", ["id", "bus", "fuel", "p_min_mw", "p_max_mw",
                          "seg1_mw", "seg1_cost", "seg2_mw", "seg2_cost"], gens)

    load_buses = {1: 120, 2: 90, 5: 110, 6: 80, 11: 130, 13: 90, 14: 120,
                  16: 80, 19: 110, 20: 90, 26: 100, 27: 90, 29: 60, 30: 50}
    demand = []
    for h in range(24):
        s = shape(h)
        for bus, peak in load_buses.items():
            demand.append((HOURS[h], bus, f"{peak * s:.3f}"))
    write(d / "demand.csv", ["time", "bus_id", "mw"], demand)

    avail = []
    for h in range(24):
        wind_shape = 0.35 + 0.55 * (0.5 + 0.5 * math.sin(2 * math.pi * (h - 1) / 24.0))
        solar_shape = max(0.0, math.sin(math.pi * (h - 6) / 12.0)) if 6 <= h <= 18 else 0.0
        avail.append((HOURS[h], 6, f"{400.0 * wind_shape:.3f}"))
        avail.append((HOURS[h], 7, f"{200.0 * wind_shape:.3f}"))
        avail.append((HOURS[h], 8, f"{150.0 * solar_shape:.3f}"))
    write(d / "availability.csv", ["time", "gen_id", "mw"], avail)

    cells = [(30.8 + 0.35 * r, -101.0 + 0.5 * c) for r in range(4) for c in range(5)]
    write(BASE / "weather_case30.csv",
          ["time", "lat", "lon", "temp_k", "wind_u_ms", "wind_v_ms"],
          weather_rows(cells, speed_base=5.0, speed_amp=3.0))


if __name__ == "__main__":
    case3()
    case5()
    case30()
    print(f"cases written under {BASE}")
