#!/usr/bin/env python3
"""Hyper-ring benchmark sweeps: thickness, box size, and dimension.

Condensed version of the shipped sweep configs (specs/ring_*.json);
pass --full to run them at their full sample counts and repeats.
Prints the acceptance-rate tables and writes CSV reports next to this
script under demos/output/.
"""

import argparse
import json
from pathlib import Path

import shapegen as sg
from shapegen.bench import bench_to_csv

HERE = Path(__file__).resolve().parent
SPECS = HERE.parent / "specs"
OUT = HERE / "output"
OUT.mkdir(exist_ok=True)

ap = argparse.ArgumentParser()
ap.add_argument("--full", action="store_true",
                help="run at the config sample counts (slower)")
args = ap.parse_args()


def load(name):
    return json.loads((SPECS / name).read_text())


def run_sweep(title, cfg, rings, variants, samples, repeats):
    print(f"\n== {title} ==")
    rows = []
    for label, ring in rings:
        results = sg.run_bench(ring, variants, samples=samples,
                               repeats=repeats, seed=0, burn_in=500)
        rows.extend((label, r) for r in results)
        cells = ", ".join(f"{r.variant}={r.acceptance_rate:.2%}" for r in results)
        print(f"{label:>10}: {cells}")
    return rows


# thickness sweep: thinner rings favor shrinking more and more
cfg = load("ring_thickness.json")
samples = cfg["samples"] if args.full else 300
repeats = cfg["repeats"] if args.full else 2
rings = [(f"c2={c2}", sg.RingSpec(cfg["dims"], cfg["c1"], c2, cfg["box"]))
         for c2 in cfg["c2_sweep"]]
rows = run_sweep("acceptance vs ring thickness", cfg, rings,
                 ["rejection", "hr", "hr_shrink"], samples, repeats)
(OUT / "thickness.csv").write_text(bench_to_csv([r for _, r in rows]))

# box sweep: a huge bounding box starves plain chord rejection
cfg = load("ring_boxsize.json")
samples = cfg["samples"] if args.full else 300
repeats = cfg["repeats"] if args.full else 2
rings = [(f"c={c}", sg.RingSpec(cfg["dims"], cfg["c1"], cfg["c2"], float(c)))
         for c in cfg["box_sweep"]]
rows = run_sweep("acceptance vs bounding-box size", cfg, rings,
                 ["hr", "hr_shrink"], samples, repeats)
(OUT / "boxsize.csv").write_text(bench_to_csv([r for _, r in rows]))

# dimension sweep on the unit ball; rejection only while it is viable
cfg = load("ring_dims.json")
samples = cfg["samples"] if args.full else 50
repeats = cfg["repeats"] if args.full else 2
dims = cfg["dims_sweep"] if args.full else [2, 3, 10, 50, 100]
print("\n== wall time vs dimension (unit ball) ==")
for n in dims:
    ring = sg.RingSpec(n, cfg["c1"], cfg["c2"], cfg["box"])
    variants = ["cdhr_shrink"]
    if n <= cfg["rejection_max_dims"]:
        variants.insert(0, "rejection")
    results = sg.run_bench(ring, variants, samples=samples, repeats=repeats,
                           seed=0, burn_in=500)
    cells = ", ".join(f"{r.variant}: {r.wall_time:.2f}s "
                      f"({r.acceptance_rate:.2%})" for r in results)
    print(f"n={n:>3}: {cells}")
