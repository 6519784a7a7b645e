"""Initial-point search: particle swarm over the constraint penalty.

The swarm minimizes ParamSpace.penalty; any point with penalty 0 is a
member.  Thin relaxed equalities make the zero set tiny, so a swarm
that stalls at a small positive penalty is polished with per-coordinate
line minimization before giving up and restarting.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constraints import ParamSpace

__all__ = ["PsoConfig", "SwarmState", "InitializationError",
           "find_initial", "pso_iterate"]


class InitializationError(RuntimeError):
    """All restarts exhausted without reaching penalty 0."""

    def __init__(self, message, best_penalty=None, best_point=None):
        super().__init__(message)
        self.best_penalty = best_penalty
        self.best_point = best_point


@dataclass
class PsoConfig:
    swarm_size: int = 10
    max_iterations: int = 10
    inertia: float = 0.5
    cognitive_scale: float = 0.5
    social_scale: float = 0.5
    restarts: int = 20
    seed: int = 0
    polish: bool = True
    polish_passes: int = 40

    def __post_init__(self):
        if self.swarm_size < 2:
            raise ValueError("swarm_size must be >= 2")
        if min(self.inertia, self.cognitive_scale, self.social_scale) < 0:
            raise ValueError("PSO scales must be nonnegative")


@dataclass
class SwarmState:
    x: np.ndarray          # (S, d) positions, clamped to the box
    v: np.ndarray          # (S, d) velocities
    pbest: np.ndarray      # (S, d) personal bests
    pbest_val: np.ndarray  # (S,)
    gbest: np.ndarray      # (d,)
    gbest_val: float
    rng: np.random.Generator
    cfg: "PsoConfig"


def _evaluate(space: ParamSpace, x: np.ndarray) -> np.ndarray:
    return np.array([space.penalty(row) for row in x])


def _init_swarm(space: ParamSpace, cfg: PsoConfig, rng) -> SwarmState:
    x = space.sample_box(rng, cfg.swarm_size)
    vals = _evaluate(space, x)
    best = int(np.argmin(vals))
    return SwarmState(x=x, v=np.zeros_like(x), pbest=x.copy(), pbest_val=vals,
                      gbest=x[best].copy(), gbest_val=float(vals[best]),
                      rng=rng, cfg=cfg)


def pso_iterate(swarm: SwarmState, space: ParamSpace) -> SwarmState:
    """One velocity/position update; gbest penalty never increases."""
    s, d = swarm.x.shape
    r1 = swarm.rng.uniform(size=(s, d))
    r2 = swarm.rng.uniform(size=(s, d))
    cfg = swarm.cfg
    swarm.v = (cfg.inertia * swarm.v
               + cfg.cognitive_scale * r1 * (swarm.pbest - swarm.x)
               + cfg.social_scale * r2 * (swarm.gbest - swarm.x))
    swarm.x = np.clip(swarm.x + swarm.v, space.lo, space.hi)
    vals = _evaluate(space, swarm.x)
    improved = vals < swarm.pbest_val
    swarm.pbest[improved] = swarm.x[improved]
    swarm.pbest_val[improved] = vals[improved]
    best = int(np.argmin(swarm.pbest_val))
    if swarm.pbest_val[best] < swarm.gbest_val:
        swarm.gbest = swarm.pbest[best].copy()
        swarm.gbest_val = float(swarm.pbest_val[best])
    return swarm


def _golden_line(space: ParamSpace, x: np.ndarray, dim: int) -> tuple[float, float]:
    """Minimize penalty along one coordinate: coarse grid, then golden
    refinement around the best grid cell.  Probes stay strictly inside
    the interval; its endpoints are excluded from membership."""
    lo, hi = space.lo[dim], space.hi[dim]
    inset = 1e-9 * (hi - lo)
    lo, hi = lo + inset, hi - inset
    probe = x.copy()

    def f(t: float) -> float:
        probe[dim] = t
        return space.penalty(probe)

    grid = np.linspace(lo, hi, 17)
    vals = [f(t) for t in grid]
    k = int(np.argmin(vals))
    if vals[k] == 0.0:
        return grid[k], 0.0
    a = grid[max(0, k - 1)]
    b = grid[min(len(grid) - 1, k + 1)]
    inv = 0.6180339887498949
    c = b - inv * (b - a)
    d = a + inv * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(40):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - inv * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv * (b - a)
            fd = f(d)
        if fc == 0.0:
            return c, 0.0
        if fd == 0.0:
            return d, 0.0
    t = c if fc <= fd else d
    return t, min(fc, fd)


def _polish(space: ParamSpace, x0: np.ndarray, rng, passes: int) -> tuple[np.ndarray, float]:
    x = x0.copy()
    best = space.penalty(x)
    for _ in range(passes):
        if best == 0.0:
            break
        improved = False
        for dim in rng.permutation(space.ndim):
            t, val = _golden_line(space, x, int(dim))
            if val < best:
                x[dim] = t
                best = val
                improved = True
                if best == 0.0:
                    break
        if not improved:
            break
    return x, best


def find_initial(space: ParamSpace, cfg: PsoConfig | None = None) -> np.ndarray:
    """A point satisfying the constraint, or InitializationError.

    Runs up to cfg.restarts independent swarms; each swarm iterates
    cfg.max_iterations times and exits early when some particle reaches
    penalty 0.  With cfg.polish, a stalled swarm's best point gets a
    round of coordinate line minimization, which is what usually closes
    the final distance to thin equality bands.
    """
    cfg = cfg or PsoConfig()
    if space.ndim == 0:
        return np.empty(0)
    rng = np.random.default_rng(cfg.seed)
    best_val, best_x = np.inf, None
    for _ in range(max(1, cfg.restarts)):
        swarm = _init_swarm(space, cfg, rng)
        for _ in range(cfg.max_iterations):
            if swarm.gbest_val == 0.0:
                break
            pso_iterate(swarm, space)
        x, val = swarm.gbest, swarm.gbest_val
        if val > 0.0 and cfg.polish:
            x, val = _polish(space, x, rng, cfg.polish_passes)
        if val < best_val:
            best_val, best_x = val, x.copy()
        if val == 0.0:
            # interval clauses are strict, so penalty 0 on the box face can
            # still fail membership; nudge and verify
            from .hitrun import _nudge_into_box
            x = _nudge_into_box(space, x)
            if space.contains(x):
                return x
    raise InitializationError(
        f"initialization failed after {cfg.restarts} restarts; "
        f"best penalty {best_val:g}", best_val, best_x)
