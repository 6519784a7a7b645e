#!/usr/bin/env python3
"""Full two-stage pipeline on the pulse train: ten random behaviors.

Each output draws a fresh shape word (Boltzmann, mean length 15), runs
a hit-and-run chain over the 13 free constraint dimensions, and renders
the piecewise signal.  Writes demos/output/pulse_signals.png.
"""

from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

import shapegen as sg
from shapegen.pso import PsoConfig, find_initial

SPEC = Path(__file__).resolve().parent.parent / "specs" / "pulse.sexp"
OUT = Path(__file__).resolve().parent / "output"
OUT.mkdir(exist_ok=True)

spec = sg.parse_spec(SPEC.read_text())
g = sg.generating_function(spec.regex)
z = sg.tune_z(g, 15.0).z
oracle = sg.build_oracle(spec.regex, z)
space = sg.compile_spec(spec, eps=1e-3)
print(f"{len(space.dims)} free dimensions, pinned {sorted(space.pinned)}")

word_rng = np.random.default_rng(0)
fig, axes = plt.subplots(5, 2, figsize=(12, 10), sharey=True)

for i, ax in enumerate(axes.flat):
    word = sg.sample_word(oracle, word_rng)
    x0 = find_initial(space, PsoConfig(seed=100 + i))
    cfg = sg.SamplerConfig(variant="hr_shrink", burn_in=1000, thin=1, seed=200 + i)
    points, stats = sg.run_chain(space, cfg, 1, x0=x0)
    valuation = space.reinstate(points[0])
    signal = sg.render(spec.decl_map, word, valuation, dt=0.02)
    jumps = sg.boundary_jumps(spec.decl_map, word, valuation)
    ax.plot(signal.times, signal.values, lw=0.9)
    ax.set_title(f"{len(word)} segments, worst joint gap {max(jumps):.1e}",
                 fontsize=8)
    print(f"signal {i}: word {' '.join(word.atoms)}, "
          f"duration {signal.total_duration:.1f}s, "
          f"acceptance {stats.acceptance_rate:.1%}")

fig.tight_layout()
fig.savefig(OUT / "pulse_signals.png", dpi=120)
print(f"wrote {OUT / 'pulse_signals.png'}")
