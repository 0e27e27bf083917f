"""Great-circle distances and a closed-form arc-length position on the tiny fixture.

geo_cases.json holds:
  haversine: point pairs with their distance (R = 6371 km)
  snapshot:  vehicle A flying P1 only (min-consumption cruise, 3000 ft), position and fuel
             300 s into its return leg, worked out from the leg lengths and speeds
"""
import json
import math
import os
import sys

HERE = os.path.dirname(os.path.abspath(__file__))
ROOT = os.path.dirname(os.path.dirname(HERE))
R_EARTH = 6371000.0
FT = 0.3048
KT = 1852.0 / 3600.0


def haversine(a, b):
    p1, p2 = math.radians(a[0]), math.radians(b[0])
    dp = math.radians(b[0] - a[0])
    dl = math.radians(b[1] - a[1])
    h = math.sin(dp / 2) ** 2 + math.cos(p1) * math.cos(p2) * math.sin(dl / 2) ** 2
    return 2 * R_EARTH * math.asin(math.sqrt(h))


def main():
    pairs = [
        ((36.80, -2.396), (36.80, -2.174)),
        ((36.05, -2.95), (36.25, -2.9)),
        ((36.76, -2.396), (36.85, -2.174)),
        ((0.0, 0.0), (0.0, 1.0)),
        ((0.0, 0.0), (1.0, 0.0)),
        ((51.5, -0.12), (48.85, 2.35)),
    ]
    hv = [{"a": list(a), "b": list(b), "m": haversine(a, b)} for a, b in pairs]

    catalog = json.load(open(os.path.join(ROOT, "data", "catalog.json")))
    vt = catalog["vehicleTypes"]["URAV"]["profiles"]
    cruise_v = vt["min_consumption"]["speed"] * KT
    cruise_f = vt["min_consumption"]["fuelRate"] / 3600.0
    alt = vt["min_consumption"]["altitude"] * FT
    climb_v = vt["climb"]["speed"] * KT
    climb_f = vt["climb"]["fuelRate"] / 3600.0
    ramp = alt / math.tan(math.radians(vt["climb"]["angle"]))
    ramp_down = alt / math.tan(math.radians(vt["descent"]["angle"]))

    home, p1 = (36.05, -2.95), (36.25, -2.9)
    L = haversine(home, p1)
    assert ramp < L
    t_arrive = ramp / climb_v + (L - ramp) / cruise_v
    fuel = ramp / climb_v * climb_f + (L - ramp) / cruise_v * cruise_f
    t_leave = t_arrive + 60.0
    fuel += 60.0 * cruise_f
    into = 300.0
    s = cruise_v * into
    assert s < L - ramp_down  # still cruising, before the descent ramp
    f = s / L
    pos = [p1[0] + (home[0] - p1[0]) * f, p1[1] + (home[1] - p1[1]) * f, alt]
    fuel += into * cruise_f
    snap = {"time": t_leave + into, "lat": pos[0], "lon": pos[1], "alt": pos[2],
            "fuelLeft": 40.0 - fuel, "arrival": t_arrive, "arcFromP1": s}

    out = {"haversine": hv, "snapshot": snap}
    path = sys.argv[1] if len(sys.argv) > 1 else os.path.join(HERE, "geo_cases.json")
    with open(path, "w") as fh:
        json.dump(out, fh, indent=1)
        fh.write("\n")


if __name__ == "__main__":
    main()
