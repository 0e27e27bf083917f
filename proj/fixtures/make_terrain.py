"""Writes the EGRID terrain used by the coastal fixtures (deterministic)."""
import math
import sys

LAT0, LON0, LAT1, LON1 = 36.76, -2.396, 36.85, -2.174
ARC = 7.5


def height(lat, lon):
    # Coast in the south rising inland, plus a hill north-west of the search area.
    inland = max(0.0, (lat - 36.765) / (LAT1 - 36.765)) * 260.0
    hill = 180.0 * math.exp(-(((lat - 36.845) / 0.008) ** 2 + ((lon + 2.37) / 0.012) ** 2))
    return round(inland + hill, 1)


def main(path):
    rows = round((LAT1 - LAT0) * 3600 / ARC) + 1
    cols = round((LON1 - LON0) * 3600 / ARC) + 1
    with open(path, "w") as f:
        f.write(f"EGRID 1 {LAT0} {LON0} {LAT1} {LON1} {ARC} {rows} {cols}\n")
        for r in range(rows):
            lat = LAT1 - r * (LAT1 - LAT0) / (rows - 1)
            row = [height(lat, LON0 + c * (LON1 - LON0) / (cols - 1)) for c in range(cols)]
            f.write(" ".join(f"{h:g}" for h in row) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "coast.egrid")
