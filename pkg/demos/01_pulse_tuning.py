#!/usr/bin/env python3
"""Counting series of the pulse-train spec and Boltzmann tuning.

Walks through the first stage of the pipeline: parse the spec, check
the regular expression is unambiguous, compute its counting series
(the coefficient of z^n is the number of shape words with n segments),
and solve for the parameter z that yields a chosen mean word length.
"""

from pathlib import Path

import shapegen as sg

SPEC = Path(__file__).resolve().parent.parent / "specs" / "pulse.sexp"

spec = sg.parse_spec(SPEC.read_text())
print(f"parsed {SPEC.name}: {len(spec.decls)} shapes, "
      f"regex {sg.print_spec(spec).splitlines()[-2]}")

report = sg.check_ambiguity(spec.regex)
print(f"ambiguous: {report.ambiguous}")

g = sg.generating_function(spec.regex)
print(f"\ngenerating function: num={[str(c) for c in g.num.coeffs]} "
      f"den={[str(c) for c in g.den.coeffs]}")
print(f"word counts by length 0..14: {sg.taylor_coefficients(g, 14)}")
print(f"convergence radius: {sg.convergence_radius(g):.5f}")

nz = sg.mean_length_function(g)
print(f"mean-length function: num={[str(c) for c in nz.num.coeffs]} "
      f"den={[str(c) for c in nz.den.coeffs]}")
print(f"mean length at z=0 (shortest word): {nz(0.0):g}")

print("\ntuning z for target mean lengths:")
print(f"{'target':>8} {'z':>10} {'N(z)':>10}")
for target in (5.0, 6.0, 8.0, 15.0, 30.0, 60.0):
    tuned = sg.tune_z(g, target)
    print(f"{target:8.1f} {tuned.z:10.5f} {tuned.mean_length_at_z:10.4f}")

print("\nmean lengths below the shortest word (5) are unreachable:")
try:
    sg.tune_z(g, 4.0)
except sg.TuneError as e:
    print(f"  TuneError: {e}")
