#!/usr/bin/env python3
"""Boltzmann word sampling: the length law and same-length uniformity.

Draws shape words at the z tuned for mean length 15 and compares the
empirical length histogram with the law c_n z^n / g(z).  Words of the
same length must come out equally often; the two length-10 words make
that easy to eyeball.
"""

import random
from pathlib import Path

import shapegen as sg

SPEC = Path(__file__).resolve().parent.parent / "specs" / "pulse.sexp"
N = 50_000

spec = sg.parse_spec(SPEC.read_text())
g = sg.generating_function(spec.regex)
tuned = sg.tune_z(g, 15.0)
print(f"z = {tuned.z:.5f} for mean length 15")

oracle = sg.build_oracle(spec.regex, tuned.z)
rng = random.Random(0)
ws = sg.WordStats()
for _ in range(N):
    ws.add(sg.sample_word(oracle, rng))

print(f"\n{N} draws, empirical mean length {ws.mean_length:.3f}")

coeffs = sg.taylor_coefficients(g, 24)
gz = g(tuned.z)
print(f"\n{'len':>4} {'words':>6} {'expected':>9} {'observed':>9}")
for n in range(5, 25):
    if coeffs[n] == 0:
        continue
    expected = coeffs[n] * tuned.z ** n / gz
    print(f"{n:4d} {coeffs[n]:6d} {expected:9.4f} {ws.length_hist.get(n, 0) / N:9.4f}")

p = sg.same_length_test(ws, 10, spec.regex)
ten = [w for w in sg.enumerate_words(spec.regex, 10) if len(w) == 10]
print(f"\nlength-10 words: {[' '.join(w) for w in ten]}")
print(f"counts: {[ws.word_freq[w] for w in ten]}")
print(f"same-length chi-square p = {p:.3f} (uniform null not rejected)" if p
      else "not enough data for the same-length test")
