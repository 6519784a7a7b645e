"""Hyper-ring benchmark: acceptance rate and wall time across sampler
variants, ring thickness, bounding-box size and dimension, plus
uniformity diagnostics.

The test set is c2^2 < x1^2 + ... + xn^2 < c1^2 inside the box
[-c, c]^n: polynomial, non-convex, arbitrarily thin, any dimension.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy import stats as sps

from .constraints import ParamSpace, compile_constraint
from .hitrun import (ChainError, RejectionBudgetError, SamplerConfig,
                     rejection_sample, run_chain, ChainStats)
from .pso import InitializationError, PsoConfig, find_initial
from .sexpr import Add, And, Cmp, Const, In, Mul, Param

__all__ = ["RingSpec", "RepeatResult", "BenchResult",
           "make_ring_space", "run_bench", "uniformity_report",
           "ball_volume", "ring_acceptance_ratio",
           "bench_to_csv", "bench_to_json"]


@dataclass(frozen=True)
class RingSpec:
    n: int       # dimensions
    c1: float    # outer radius
    c2: float    # inner radius (0 gives a ball)
    c: float     # box half-width

    def __post_init__(self):
        if not (self.c >= self.c1 > self.c2 >= 0):
            raise ValueError(f"need c >= c1 > c2 >= 0, got c={self.c}, "
                             f"c1={self.c1}, c2={self.c2}")
        if self.n < 1:
            raise ValueError("dimension must be >= 1")


def ball_volume(n: int, r: float) -> float:
    """Volume of the n-ball of radius r."""
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1) * r ** n


def ring_acceptance_ratio(ring: RingSpec) -> float:
    """Analytic ring volume over box volume: the expected rejection rate."""
    vol = ball_volume(ring.n, ring.c1) - ball_volume(ring.n, ring.c2)
    return vol / (2.0 * ring.c) ** ring.n


def make_ring_space(ring: RingSpec) -> ParamSpace:
    names = [f"x{i + 1}" for i in range(ring.n)]
    sq = Mul(Param(names[0]), Param(names[0]))
    for name in names[1:]:
        sq = Add(sq, Mul(Param(name), Param(name)))
    terms = [In(name, -ring.c, ring.c) for name in names]
    terms.append(Cmp("<", sq, Const(ring.c1 ** 2)))
    terms.append(Cmp(">", sq, Const(ring.c2 ** 2)))
    return compile_constraint(And(tuple(terms)), params=names)


@dataclass
class RepeatResult:
    repeat: int
    samples: int
    wall_time: float
    acceptance_rate: float
    trials: int = 0
    init_failed: bool = False
    budget_exhausted: bool = False
    error: str | None = None

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in
                ("repeat", "samples", "wall_time", "acceptance_rate",
                 "trials", "init_failed", "budget_exhausted", "error")}


@dataclass
class BenchResult:
    variant: str
    samples: int
    wall_time: float          # mean over repeats
    acceptance_rate: float    # mean over repeats
    wall_time_std: float = 0.0
    acceptance_std: float = 0.0
    repeats: list[RepeatResult] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {"variant": self.variant, "samples": self.samples,
                "wall_time": self.wall_time, "wall_time_std": self.wall_time_std,
                "acceptance_rate": self.acceptance_rate,
                "acceptance_std": self.acceptance_std,
                "repeats": [r.as_dict() for r in self.repeats]}


def _run_rejection(space: ParamSpace, samples: int, seed: int,
                   budget: int) -> RepeatResult:
    rng = np.random.default_rng(seed)
    stats = ChainStats()
    t0 = time.perf_counter()
    emitted = 0
    exhausted = False
    try:
        for _ in range(samples):
            rejection_sample(space, rng, budget - stats.proposals, stats)
            emitted += 1
    except RejectionBudgetError:
        exhausted = True
    wall = time.perf_counter() - t0
    return RepeatResult(0, emitted, wall, stats.acceptance_rate,
                        trials=stats.proposals, budget_exhausted=exhausted)


def _run_chain_variant(space: ParamSpace, variant: str, samples: int,
                       seed: int, burn_in: int, thin: int,
                       pso: PsoConfig | None) -> RepeatResult:
    cfg = SamplerConfig(variant=variant, burn_in=burn_in, thin=thin, seed=seed)
    pso_cfg = pso or PsoConfig(seed=seed)
    t0 = time.perf_counter()
    try:
        x0 = find_initial(space, pso_cfg)
    except InitializationError as e:
        return RepeatResult(0, 0, time.perf_counter() - t0, 0.0,
                            init_failed=True, error=str(e))
    try:
        _, stats = run_chain(space, cfg, samples, x0=x0)
    except ChainError as e:
        wall = time.perf_counter() - t0
        return RepeatResult(0, 0, wall, e.stats.acceptance_rate if e.stats else 0.0,
                            error=str(e))
    wall = time.perf_counter() - t0
    return RepeatResult(0, samples, wall, stats.acceptance_rate,
                        trials=stats.proposals)


def run_bench(ring: RingSpec, variants, samples: int, repeats: int = 5,
              seed: int = 0, burn_in: int = 1000, thin: int = 1,
              rejection_budget: int = 10_000_000) -> list[BenchResult]:
    """Per-variant, per-repeat acceptance and timing on one ring.

    Repeats use seeds derived from (seed, variant index, repeat), so a
    sweep is reproducible and repeats are independent.  Initialization
    failures and exhausted rejection budgets are recorded per repeat
    rather than aborting the suite.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    space = make_ring_space(ring)
    results = []
    for vi, variant in enumerate(variants):
        reps = []
        for rep in range(repeats):
            child = np.random.SeedSequence([seed, vi, rep])
            s = int(child.generate_state(1)[0])
            if variant == "rejection":
                r = _run_rejection(space, samples, s, rejection_budget)
            else:
                r = _run_chain_variant(space, variant, samples, s, burn_in,
                                       thin, PsoConfig(seed=s))
            r.repeat = rep
            reps.append(r)
        ok = [r for r in reps if r.error is None and not r.init_failed]
        acc = [r.acceptance_rate for r in ok]
        wt = [r.wall_time for r in ok]
        results.append(BenchResult(
            variant=variant, samples=samples,
            wall_time=float(np.mean(wt)) if wt else float("nan"),
            acceptance_rate=float(np.mean(acc)) if acc else float("nan"),
            wall_time_std=float(np.std(wt, ddof=1)) if len(wt) > 1 else 0.0,
            acceptance_std=float(np.std(acc, ddof=1)) if len(acc) > 1 else 0.0,
            repeats=reps))
    return results


def bench_to_csv(results: list[BenchResult]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(["variant", "repeat", "samples", "wall_time",
                "acceptance_rate", "trials", "init_failed", "budget_exhausted"])
    for res in results:
        for r in res.repeats:
            w.writerow([res.variant, r.repeat, r.samples, f"{r.wall_time:.6g}",
                        f"{r.acceptance_rate:.6g}", r.trials,
                        int(r.init_failed), int(r.budget_exhausted)])
    return buf.getvalue()


def bench_to_json(results: list[BenchResult], extra: dict | None = None) -> str:
    doc = {"results": [r.as_dict() for r in results]}
    if extra:
        doc.update(extra)
    return json.dumps(doc, indent=2)


# ---------------------------------------------------------------------------
# Uniformity diagnostics
# ---------------------------------------------------------------------------

def _radius_cdf(ring: RingSpec):
    n, c1, c2 = ring.n, ring.c1, ring.c2
    den = c1 ** n - c2 ** n

    def cdf(r):
        r = np.clip(r, c2, c1)
        return (r ** n - c2 ** n) / den

    return cdf


def ks_critical(n: int, m: int, alpha: float = 0.01) -> float:
    """Two-sample Kolmogorov-Smirnov critical value (asymptotic)."""
    c_alpha = math.sqrt(-0.5 * math.log(alpha / 2.0))
    return c_alpha * math.sqrt((n + m) / (n * m))


def uniformity_report(samples, ring: RingSpec, bins: int = 36,
                      reference=None) -> dict:
    """Quantify how uniform a batch of ring samples looks.

    For 2-D rings the angular bins have exactly equal measure, giving
    an exact chi-square test; higher dimensions use the analytic radius
    law r^(n-1) on [c2, c1] instead.  When an independent reference
    batch is supplied (typically rejection-sampler output), each
    coordinate is compared with a two-sample KS statistic.
    """
    x = np.asarray(samples, dtype=float)
    if x.ndim != 2 or x.shape[1] != ring.n:
        raise ValueError(f"samples must be (k, {ring.n})")
    if x.shape[0] < 10 * bins and ring.n == 2:
        raise ValueError(f"need at least {10 * bins} samples for {bins} bins")
    out: dict = {"n_samples": int(x.shape[0])}

    if ring.n == 2:
        angles = np.arctan2(x[:, 1], x[:, 0])
        hist, _ = np.histogram(angles, bins=bins, range=(-math.pi, math.pi))
        out["chi_square_p"] = float(sps.chisquare(hist).pvalue)
    else:
        out["chi_square_p"] = None

    radii = np.linalg.norm(x, axis=1)
    out["radius_ks_p"] = float(sps.kstest(radii, _radius_cdf(ring)).pvalue)

    if reference is not None:
        ref = np.asarray(reference, dtype=float)
        ks = []
        for d in range(ring.n):
            stat = float(sps.ks_2samp(x[:, d], ref[:, d]).statistic)
            ks.append(stat)
        out["per_dim_ks"] = ks
        out["ks_critical_1pct"] = ks_critical(x.shape[0], ref.shape[0], 0.01)
    else:
        out["per_dim_ks"] = None
    return out
