"""Plain-text log-log plot of a sweep record CSV.

Usage: python demos/plot_csv.py RECORDS.CSV

Draws one character column per step size with the worst-over-eps error on a
log axis, plus per-eps curves as rows; no graphics dependencies.
"""

import math
import sys

from stiffrelax.sweeps import load_records


def main(path):
    records = [r for r in load_records(path) if r.ok]
    if not records:
        print("no successful records in", path)
        return 1
    eps_set = sorted({r.eps for r in records})
    dt_set = sorted({r.dt for r in records}, reverse=True)
    table = {(r.eps, r.dt): r.error for r in records}

    print(f"{path}: error table (rows: eps, columns: dt descending)")
    header = "eps \\ dt " + " ".join(f"{dt:10.3e}" for dt in dt_set)
    print(header)
    for eps in eps_set:
        row = " ".join(f"{table.get((eps, dt), float('nan')):10.3e}" for dt in dt_set)
        print(f"{eps:9.1e} {row}")

    errs = [max(table.get((e, dt), 0.0) for e in eps_set) for dt in dt_set]
    lo = min(math.log10(e) for e in errs if e > 0)
    hi = max(math.log10(e) for e in errs if e > 0)
    span = max(hi - lo, 1e-12)
    height = 16
    print("\nworst-over-eps error vs dt (log-log, left = largest dt):")
    grid = [[" "] * len(errs) for _ in range(height + 1)]
    for j, e in enumerate(errs):
        level = round((math.log10(e) - lo) / span * height)
        grid[height - level][j] = "*"
    for i, row in enumerate(grid):
        ordinate = 10 ** (hi - span * i / height)
        print(f"{ordinate:9.1e} |" + "  ".join(row))
    if len(errs) >= 2:
        slope = (math.log(errs[0]) - math.log(errs[-1])) / (
            math.log(dt_set[0]) - math.log(dt_set[-1])
        )
        print(f"end-to-end slope: {slope:.3f}")
    return 0


if __name__ == "__main__":
    if len(sys.argv) != 2:
        print(__doc__)
        sys.exit(2)
    sys.exit(main(sys.argv[1]))
