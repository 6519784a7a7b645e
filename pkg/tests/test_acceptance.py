"""Acceptance suite: one test per release criterion, at the stated
tolerances and runtime budgets.  Run with `pytest tests/test_acceptance.py -v`
to get one pass/fail line per criterion.

Known red: test_c8b_rejection_budget_at_4_dims encodes the claim that
rejection sampling already exhausts a 1e6-trial budget on the 4-D unit
ball in its unit box.  The analytic acceptance rate there is
pi^2/2 / 2^4 ~ 30.8%, so 100 samples cost ~325 trials and the budget
cannot be exhausted; the check is kept as stated and fails honestly.
See README "Known issues".
"""

import json
import math
import random
import time
from collections import Counter

import numpy as np
import pytest
from scipy import stats as sps

import shapegen as sg
from shapegen.bench import (RingSpec, ball_volume, make_ring_space,
                            ring_acceptance_ratio, run_bench, uniformity_report)
from shapegen.cli import main as cli_main
from shapegen.hitrun import ChainState, ChainStats, SamplerConfig, hr_step, \
    rejection_sample, run_chain
from shapegen.pso import PsoConfig, find_initial
from shapegen.signals import boundary_jumps

from test_lang import random_regex

Z15 = 0.78631


def _report(name: str, detail: str):
    print(f"[acceptance] {name}: {detail}")


# --- 1: pulse generating function --------------------------------------------

def test_c1_pulse_generating_function(pulse_spec):
    t0 = time.perf_counter()
    g = sg.generating_function(pulse_spec.regex)
    assert [int(c) for c in g.num.coeffs] == [0, 0, 0, 0, 0, 1, 1]
    assert [int(c) for c in g.den.coeffs] == [1, 0, 0, 0, -1, -1]
    rconv = sg.convergence_radius(g)
    assert abs(rconv - 0.85667) <= 1e-4
    tuned = sg.tune_z(g, 15.0)
    assert abs(tuned.z - 0.78631) <= 1e-4
    elapsed = time.perf_counter() - t0
    assert elapsed < 1.0
    _report("C1", f"g=(z^5+z^6)/(1-z^4-z^5), Rconv={rconv:.5f}, "
                  f"z(N=15)={tuned.z:.5f}, {elapsed * 1000:.0f} ms")


# --- 2: Boltzmann law ---------------------------------------------------------

def test_c2_boltzmann_law(pulse_spec):
    t0 = time.perf_counter()
    oracle = sg.build_oracle(pulse_spec.regex, Z15)
    rng = random.Random(20250811)
    n = 100_000
    hist = Counter()
    for _ in range(n):
        hist[len(sg.sample_word(oracle, rng))] += 1
    mean = sum(k * v for k, v in hist.items()) / n
    assert abs(mean - 15.0) <= 0.5

    # length histogram against c_n z^n / g(z), lumping the tail
    g = sg.generating_function(pulse_spec.regex)
    coeffs = sg.taylor_coefficients(g, 120)
    gz = g(Z15)
    probs = [c * Z15 ** k / gz for k, c in enumerate(coeffs)]
    observed, expected = [], []
    for k, p in enumerate(probs):
        if p * n >= 5:
            observed.append(hist.get(k, 0))
            expected.append(p * n)
    tail_p = 1.0 - sum(p for p in probs if p * n >= 5)
    observed.append(n - sum(observed))
    expected.append(tail_p * n)
    res = sps.chisquare(observed, f_exp=np.array(expected) / sum(expected) * sum(observed))
    assert res.pvalue > 0.01

    small = sg.build_oracle(pulse_spec.regex, 1e-6)
    hits = sum(sg.sample_word(small, rng).atoms == tuple("ABCFA")
               for _ in range(10_000))
    assert hits / 10_000 > 0.999
    elapsed = time.perf_counter() - t0
    assert elapsed < 30.0
    _report("C2", f"mean={mean:.3f}, length-law p={res.pvalue:.3f}, "
                  f"ABCFA@1e-6={hits / 10_000:.4f}, {elapsed:.1f} s")


# --- 3: counting oracle --------------------------------------------------------

def test_c3_counting_oracle():
    t0 = time.perf_counter()
    rng = random.Random(20250811)
    done = 0
    while done < 10:
        regex = random_regex(rng, atoms="ABCDEF", max_depth=4)
        if sg.check_ambiguity(regex).ambiguous:
            continue
        g = sg.generating_function(regex)
        assert sg.taylor_coefficients(g, 10) == sg.count_words_by_length(regex, 10)
        done += 1
    elapsed = time.perf_counter() - t0
    assert elapsed < 10.0
    _report("C3", f"10 random unambiguous regexes verified, {elapsed:.1f} s")


# --- 4: hit-and-run correctness -------------------------------------------------

def _pulse_space(pulse_spec):
    return sg.compile_spec(pulse_spec, 1e-3)


def _ecg_space(ecg_spec):
    return sg.compile_spec(ecg_spec, 0.03)


def test_c4_membership_and_shrinking(pulse_spec, ecg_spec):
    ring2 = make_ring_space(RingSpec(2, 1.0, 0.9, 1.0))
    ring3 = make_ring_space(RingSpec(3, 1.0, 0.99, 1.0))
    ball3 = make_ring_space(RingSpec(3, 1.0, 0.0, 1.0))
    pulse = _pulse_space(pulse_spec)
    ecg = _ecg_space(ecg_spec)

    plan = [
        (ring2, [0.95, 0.0], {"rejection": 15_000, "hr": 10_000,
                              "hr_shrink": 10_000, "cdhr": 10_000,
                              "cdhr_shrink": 10_000}),
        (ring3, [0.0, 0.0, 0.995], {"hr": 4_000, "hr_shrink": 8_000,
                                    "cdhr": 4_000, "cdhr_shrink": 8_000}),
        (ball3, None, {"rejection": 5_000}),
        (pulse, None, {"hr_shrink": 8_000, "cdhr_shrink": 4_000}),
        (ecg, None, {"hr_shrink": 4_000, "cdhr_shrink": 4_000}),
    ]
    emitted = 0
    violations = 0
    for space, x0, variants in plan:
        if x0 is None and any(v != "rejection" for v in variants):
            x0 = find_initial(space, PsoConfig(seed=20250811))
        for variant, count in variants.items():
            cfg = SamplerConfig(variant=variant, burn_in=100, thin=1,
                                seed=20250811)
            out, _ = run_chain(space, cfg, count,
                               x0=None if variant == "rejection" else np.array(x0))
            emitted += len(out)
            violations += sum(not space.contains(row) for row in out)
    assert emitted >= 100_000
    assert violations == 0

    # shrinking interval strictly decreases across in-step rejections
    cfg = SamplerConfig(variant="hr_shrink", burn_in=0, thin=1, seed=7)
    rng = np.random.default_rng(7)
    state = ChainState(np.array([0.0, 0.0, 0.995]), 0, rng, ChainStats())
    rejections = 0
    for _ in range(500):
        trace: list = []
        hr_step(ring3, state, cfg, trace=trace)
        widths = [hi - lo for lo, hi in trace]
        assert all(b < a for a, b in zip(widths, widths[1:]))
        rejections += len(trace)
    assert rejections > 500
    _report("C4", f"{emitted} samples, 0 violations; "
                  f"{rejections} shrink steps all monotone")


# --- 5: uniformity ---------------------------------------------------------------

def test_c5_ring_uniformity():
    t0 = time.perf_counter()
    ring = RingSpec(2, 1.0, 0.9, 1.0)
    space = make_ring_space(ring)
    x0 = find_initial(space, PsoConfig(seed=1))
    cfg = SamplerConfig(variant="hr_shrink", burn_in=1000, thin=10, seed=2)
    out, _ = run_chain(space, cfg, 1000, x0=x0)
    rng = np.random.default_rng(3)
    ref = np.array([rejection_sample(space, rng) for _ in range(10_000)])
    rep = uniformity_report(out, ring, bins=36, reference=ref)
    assert rep["chi_square_p"] > 0.01
    assert all(k < rep["ks_critical_1pct"] for k in rep["per_dim_ks"])
    elapsed = time.perf_counter() - t0
    assert elapsed < 60.0
    _report("C5", f"angular p={rep['chi_square_p']:.3f}, "
                  f"KS={max(rep['per_dim_ks']):.4f} < crit {rep['ks_critical_1pct']:.4f}, "
                  f"{elapsed:.1f} s")


# --- 6: thin-ring acceptance ------------------------------------------------------

def test_c6_thin_ring_acceptance():
    t0 = time.perf_counter()
    rates = {}
    for c2 in (0.5, 0.75, 0.9, 0.99):
        results = run_bench(RingSpec(3, 1.0, c2, 1.0), ["hr", "hr_shrink"],
                            samples=1000, repeats=5, seed=20250811,
                            burn_in=1000)
        by = {r.variant: r.acceptance_rate for r in results}
        rates[c2] = by
        assert by["hr_shrink"] >= by["hr"], f"shrink < vanilla at c2={c2}"
    assert rates[0.99]["hr_shrink"] > 0.10
    elapsed = time.perf_counter() - t0
    assert elapsed < 300.0
    detail = ", ".join(f"c2={c2}: {v['hr']:.3f}/{v['hr_shrink']:.3f}"
                       for c2, v in rates.items())
    _report("C6", f"vanilla/shrink {detail}; {elapsed:.0f} s")


# --- 7: box-size sweep -------------------------------------------------------------

def test_c7_box_size_sweep():
    t0 = time.perf_counter()
    shrink_rates = {}
    for c in (1.0, 5.0, 10.0, 20.0):
        ring = RingSpec(3, 1.0, 0.9, c)
        results = run_bench(ring, ["hr_shrink"], samples=1000, repeats=5,
                            seed=20250811, burn_in=1000)
        shrink_rates[c] = results[0].acceptance_rate

        # rejection against the analytic volume ratio
        p = ring_acceptance_ratio(ring)
        space = make_ring_space(ring)
        rng = np.random.default_rng(int(c))
        stats = ChainStats()
        target = 1000 if c == 1.0 else 60
        for _ in range(target):
            rejection_sample(space, rng, budget=50_000_000, stats=stats)
        se = math.sqrt(p * (1 - p) / stats.proposals)
        assert abs(stats.acceptance_rate - p) <= 3 * se, \
            f"c={c}: rejection {stats.acceptance_rate:.3g} vs analytic {p:.3g}"
    assert shrink_rates[20.0] > 0.10
    elapsed = time.perf_counter() - t0
    assert elapsed < 300.0
    _report("C7", f"hr_shrink at c=20: {shrink_rates[20.0]:.3f}; "
                  f"rejection within 3 SE at all box sizes; {elapsed:.0f} s")


# --- 8: dimension scaling ------------------------------------------------------------

def test_c8a_100d_ball_timing():
    t0 = time.perf_counter()
    space = make_ring_space(RingSpec(100, 1.0, 0.0, 1.0))
    x0 = find_initial(space, PsoConfig(seed=5))
    cfg = SamplerConfig(variant="cdhr_shrink", burn_in=1000, thin=1, seed=6)
    out, _ = run_chain(space, cfg, 100, x0=x0)
    elapsed = time.perf_counter() - t0
    assert len(out) == 100
    assert elapsed < 120.0
    _report("C8a", f"100 samples from the 100-D ball in {elapsed:.1f} s")


def test_c8b_rejection_budget_at_4_dims():
    """As stated, rejection must exceed a 1e6-trial budget at n=4.

    This cannot happen: the 4-D unit ball fills pi^2/2 / 16 ~ 30.8% of
    its bounding box, so 100 samples need ~325 trials.  The assertion
    is kept as written and is expected to fail; see README.
    """
    space = make_ring_space(RingSpec(4, 1.0, 0.0, 1.0))
    rng = np.random.default_rng(7)
    stats = ChainStats()
    exhausted = False
    try:
        for _ in range(100):
            rejection_sample(space, rng, budget=1_000_000 - stats.proposals,
                             stats=stats)
    except sg.RejectionBudgetError:
        exhausted = True
    _report("C8b", f"4-D ball: 100 samples took {stats.proposals} of 1e6 trials "
                   f"(analytic acceptance {ball_volume(4, 1.0) / 16:.3f})")
    assert exhausted, (
        f"rejection finished 100 samples in {stats.proposals} trials; "
        f"the 1e6-trial budget is not exceedable at n=4 "
        f"(acceptance ~{ball_volume(4, 1.0) / 16:.1%})")


# --- 9: end-to-end pipelines -----------------------------------------------------------

def test_c9_pulse_pipeline(pulse_spec, pulse_path, tmp_path):
    t0 = time.perf_counter()
    out_dir = tmp_path / "pulse"
    code = cli_main(["sample", "--spec", str(pulse_path),
                     "--mean-length", "15", "--count", "10",
                     "--seed", "20250811", "--out", str(out_dir)])
    assert code == 0
    space = sg.compile_spec(pulse_spec, 1e-3)
    records = [json.loads(l) for l in
               (out_dir / "samples.jsonl").read_text().splitlines()]
    assert len(records) == 10
    worst = 0.0
    for rec in records:
        v = np.array([rec["valuation"][name] for name in space.dims])
        assert space.contains(v)
        jumps = boundary_jumps(pulse_spec.decl_map, tuple(rec["word"]),
                               rec["valuation"])
        worst = max(worst, max(jumps))
        assert all(j < 2e-3 for j in jumps)
    elapsed = time.perf_counter() - t0
    _report("C9-pulse", f"10 signals, worst joint jump {worst:.2e} < 2e-3, "
                        f"{elapsed:.0f} s")


def test_c9_ecg_pipeline(ecg_path, tmp_path):
    t0 = time.perf_counter()
    out_dir = tmp_path / "ecg"
    code = cli_main(["sample", "--spec", str(ecg_path),
                     "--mean-length", "7", "--count", "100",
                     "--burn-in", "1000", "--epsilon", "0.03",
                     "--seed", "20250811", "--dt", "0.002",
                     "--out", str(out_dir)])
    elapsed = time.perf_counter() - t0
    assert code == 0
    records = (out_dir / "samples.jsonl").read_text().splitlines()
    assert len(records) == 100
    assert elapsed < 600.0
    _report("C9-ecg", f"100 heart-beat signals in {elapsed:.0f} s")
