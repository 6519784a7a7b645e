"""Point samplers over a ParamSpace.

Variants: classical rejection from the bounding box (the baseline),
hit-and-run with plain 1-D chord rejection, hit-and-run with the
shrinking acceleration, and coordinate-direction versions of both.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .constraints import ParamSpace

__all__ = ["SamplerConfig", "ChainStats", "ChainState", "ChainError",
           "RejectionBudgetError", "VARIANTS",
           "rejection_sample", "line_box_intersection", "hr_step", "run_chain"]

VARIANTS = ("rejection", "hr", "hr_shrink", "cdhr", "cdhr_shrink")

_REJECTION_BATCH = 4096


class ChainError(RuntimeError):
    """A chain step exhausted max_line_rejects (pathologically thin set)."""

    def __init__(self, message, stats=None):
        super().__init__(message)
        self.stats = stats


class RejectionBudgetError(RuntimeError):
    """Rejection sampling used up its trial budget; acceptance too low."""

    def __init__(self, message, trials):
        super().__init__(message)
        self.trials = trials


@dataclass
class SamplerConfig:
    variant: str = "hr_shrink"
    burn_in: int = 1000
    thin: int = 1
    max_line_rejects: int = 100_000
    seed: int = 0
    rejection_budget: int = 10_000_000

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}; pick one of {VARIANTS}")
        if self.thin < 1:
            raise ValueError("thin must be >= 1")
        if self.burn_in < 0:
            raise ValueError("burn_in must be >= 0")


@dataclass
class ChainStats:
    proposals: int = 0
    accepted: int = 0
    line_rejections: int = 0
    steps: int = 0
    wall_time: float = 0.0

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.proposals if self.proposals else 0.0

    def as_dict(self) -> dict:
        return {"proposals": self.proposals, "accepted": self.accepted,
                "line_rejections": self.line_rejections, "steps": self.steps,
                "wall_time": self.wall_time, "acceptance_rate": self.acceptance_rate}


@dataclass
class ChainState:
    current: np.ndarray
    step_index: int
    rng: np.random.Generator
    stats: ChainStats = field(default_factory=ChainStats)


def rejection_sample(space: ParamSpace, rng, budget: int = 10_000_000,
                     stats: ChainStats | None = None) -> np.ndarray:
    """One uniform draw from the space via box rejection.

    Draws are consumed from the rng in fixed-size batches, so a given
    seed always yields the same sample.  Raises RejectionBudgetError
    after `budget` failed trials.
    """
    trials = 0
    while trials < budget:
        batch = space.sample_box(rng, _REJECTION_BATCH)
        for row in batch:
            trials += 1
            if stats is not None:
                stats.proposals += 1
            if space.contains(row):
                if stats is not None:
                    stats.accepted += 1
                return row
            if stats is not None:
                stats.line_rejections += 1
            if trials >= budget:
                break
    raise RejectionBudgetError(
        f"no member found in {trials} trials; acceptance too low", trials)


def line_box_intersection(lo, hi, x, theta) -> tuple[float, float]:
    """Chord of the box through x along theta: x + r*theta is in the box
    iff r is in [r_min, r_max].  Requires x strictly inside."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    x = np.asarray(x, dtype=float)
    theta = np.asarray(theta, dtype=float)
    if np.any(x <= lo) or np.any(x >= hi):
        raise ValueError("point is not strictly inside the box")
    r_min, r_max = -np.inf, np.inf
    for i in range(len(x)):
        t = theta[i]
        if t == 0.0:
            continue
        t1 = (lo[i] - x[i]) / t
        t2 = (hi[i] - x[i]) / t
        if t1 > t2:
            t1, t2 = t2, t1
        r_min = max(r_min, t1)
        r_max = min(r_max, t2)
    return float(r_min), float(r_max)


def _direction(rng, ndim: int, coordinate: bool) -> np.ndarray:
    if coordinate:
        theta = np.zeros(ndim)
        theta[rng.integers(ndim)] = 1.0
        return theta
    while True:
        g = rng.standard_normal(ndim)
        norm = np.linalg.norm(g)
        if norm > 1e-12:
            return g / norm


def hr_step(space: ParamSpace, state: ChainState, config: SamplerConfig,
            trace: list | None = None) -> ChainState:
    """Advance the chain by one accepted point.

    Directions are uniform on the sphere (hr variants) or a random
    axis (cdhr variants).  The chord through the box is sampled by
    plain rejection, or with shrinking: each rejected offset replaces
    the near interval end, so the interval narrows monotonically while
    always keeping the current point (offset 0) inside.
    """
    shrink = config.variant.endswith("_shrink")
    coordinate = config.variant.startswith("cdhr")
    rng = state.rng
    x = state.current
    theta = _direction(rng, space.ndim, coordinate)
    r_min, r_max = line_box_intersection(space.lo, space.hi, x, theta)
    for _ in range(config.max_line_rejects):
        r = rng.uniform(r_min, r_max)
        candidate = x + r * theta
        state.stats.proposals += 1
        if space.contains(candidate):
            state.stats.accepted += 1
            state.current = candidate
            state.step_index += 1
            state.stats.steps += 1
            return state
        state.stats.line_rejections += 1
        if shrink:
            if r < 0.0:
                r_min = r
            else:
                r_max = r
            if trace is not None:
                trace.append((r_min, r_max))
    raise ChainError(
        f"no acceptance within {config.max_line_rejects} line proposals "
        f"(variant {config.variant})", state.stats)


def _nudge_into_box(space: ParamSpace, x0) -> np.ndarray:
    """Move boundary coordinates inward; the slab method needs strict interiority."""
    x = np.array(x0, dtype=float)
    width = space.hi - space.lo
    eps = 1e-12 * width
    x = np.minimum(np.maximum(x, space.lo + eps), space.hi - eps)
    return x


def run_chain(space: ParamSpace, config: SamplerConfig, count: int,
              x0=None) -> tuple[np.ndarray, ChainStats]:
    """Emit `count` valuations: burn-in is discarded, then every
    `thin`-th accepted state is kept.

    x0 must satisfy the constraint; when omitted, the particle-swarm
    initializer provides it.  The rejection variant ignores x0 and
    draws independent samples.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = np.random.default_rng(config.seed)
    stats = ChainStats()
    t0 = time.perf_counter()

    if config.variant == "rejection":
        out = np.empty((count, space.ndim))
        for i in range(count):
            out[i] = rejection_sample(space, rng, config.rejection_budget, stats)
            stats.steps += 1
        stats.wall_time = time.perf_counter() - t0
        return out, stats

    if x0 is None:
        from .pso import PsoConfig, find_initial
        x0 = find_initial(space, PsoConfig(seed=int(rng.integers(2 ** 63))))
    x0 = _nudge_into_box(space, x0)
    if not space.contains(x0):
        raise ValueError("initial point does not satisfy the constraint")

    state = ChainState(current=x0, step_index=0, rng=rng, stats=stats)
    for _ in range(config.burn_in):
        hr_step(space, state, config)
    out = np.empty((count, space.ndim))
    for i in range(count):
        for _ in range(config.thin):
            hr_step(space, state, config)
        out[i] = state.current
    stats.wall_time = time.perf_counter() - t0
    return out, stats
