#!/usr/bin/env python3
"""Regenerate data/demo: a small synthetic city with seasonal fire counts."""
import csv
import json
import math
import pathlib
import random

OUT = pathlib.Path(__file__).resolve().parent.parent / "data" / "demo"
ORIGIN = (30.10, 120.00)  # south-west corner
CELL_KM = 3.0
ROWS = COLS = 10
KM_PER_DEG = 111.32


def to_geo(east, north):
    lat = ORIGIN[0] + north / KM_PER_DEG
    lng = ORIGIN[1] + east / (KM_PER_DEG * math.cos(math.radians(ORIGIN[0])))
    return round(lat, 6), round(lng, 6)


STATIONS = [
    ("S1", 6.0, 7.5, "2008-05-01"),
    ("S2", 21.0, 9.0, "2010-09-15"),
    ("S3", 12.0, 22.5, "2012-03-01"),
    ("S4", 25.5, 25.5, "2015-06-01"),
]

# Hot spots: (east km, north km, spread km, weight)
HOTSPOTS = [(9.0, 10.0, 3.0, 3.0), (24.0, 20.0, 2.5, 2.0), (16.0, 27.0, 2.0, 1.0), (4.0, 25.0, 2.0, 1.0)]


def main():
    rng = random.Random(20140101)
    OUT.mkdir(parents=True, exist_ok=True)

    with open(OUT / "stations.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["id", "lat", "lng", "commissioned", "staffing"])
        for sid, e, n, c in STATIONS:
            w.writerow([sid, *to_geo(e, n), c, rng.randint(12, 30)])

    temps = {}
    rows = []
    serial = 0
    for year in (2014, 2015, 2016):
        for month in range(1, 13):
            ym = f"{year}-{month:02d}"
            temp = 17.0 + 11.0 * math.sin(2 * math.pi * (month - 4) / 12) + rng.gauss(0, 1)
            temps[ym] = round(temp, 2)
            n = max(0, int(round(28 + 0.6 * (temp - 17) + rng.gauss(0, 3))))
            for _ in range(n):
                hs = rng.choices(HOTSPOTS, weights=[h[3] for h in HOTSPOTS])[0]
                e = min(max(rng.gauss(hs[0], hs[2]), 0.2), COLS * CELL_KM - 0.2)
                nn = min(max(rng.gauss(hs[1], hs[2]), 0.2), ROWS * CELL_KM - 0.2)
                lat, lng = to_geo(e, nn)
                day = rng.randint(1, 28)
                ts = f"{ym}-{day:02d}T{rng.randint(0, 23):02d}:{rng.randint(0, 59):02d}:00"
                live = [s for s in STATIONS if s[3] <= f"{ym}-{day:02d}"]
                ranked = sorted(live, key=lambda s: math.hypot(s[1] - e, s[2] - nn))
                serial += 1
                fid = f"F{serial:05d}"
                for role, st in zip(("primary", "backup"), ranked[: 1 + (rng.random() < 0.3)]):
                    d = math.hypot(st[1] - e, st[2] - nn) * 1.4
                    resp = round(d / 40.0 * 60.0 + rng.uniform(0.5, 3.0), 2)
                    rows.append([fid, lat, lng, ts, resp, st[0], role])
    with open(OUT / "fires.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["id", "lat", "lng", "alarm_time", "response_time_min", "station_id", "role"])
        w.writerows(rows)

    with open(OUT / "features.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["feature", "granularity", "cell_i", "cell_j", "month", "value"])
        for ym, t in temps.items():
            w.writerow(["temperature", "per_month_global", "", "", ym, t])
        for i in range(ROWS):
            for j in range(COLS):
                e, n = (j + 0.5) * CELL_KM, (i + 0.5) * CELL_KM
                dens = sum(h[3] * math.exp(-((e - h[0]) ** 2 + (n - h[1]) ** 2) / (2 * (2 * h[2]) ** 2)) for h in HOTSPOTS)
                w.writerow(["population", "per_cell_static", i, j, "", round(1000 * dens, 1)])

    config = {
        "data": {"fires": "fires.csv", "stations": "stations.csv", "features": "features.csv"},
        "grid": {"origin": {"lat": ORIGIN[0], "lng": ORIGIN[1]}, "cell_size_km": CELL_KM, "rows": ROWS, "cols": COLS},
        "window": {"start": "2014-01", "end": "2016-12"},
        "travel": {"speed_kmh": 40.0, "detour_factor": 1.4},
        "k_minutes": 9.0,
        "include_existing": True,
        "forecast": {"enabled": True, "history": 3, "horizon": 1, "ridge": 1.0},
        "simulate": {"bucketing": "quarter", "transfer_backup": False},
        "ga": {"population": 40, "generations": 30, "seed": 7},
        "service": {"host": "127.0.0.1", "port": 8080, "workers": 2},
    }
    (OUT / "config.json").write_text(json.dumps(config, indent=2) + "\n")

    area = {"polygon": [[120.0, 30.1], [120.31, 30.1], [120.31, 30.37], [120.0, 30.37], [120.0, 30.1]]}
    (OUT / "area.json").write_text(json.dumps(area, indent=2) + "\n")


if __name__ == "__main__":
    main()
