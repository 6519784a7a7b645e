import numpy as np
import pytest

from shapegen.bench import RingSpec, make_ring_space
from shapegen.constraints import compile_constraint
from shapegen.hitrun import rejection_sample
from shapegen.pso import (InitializationError, PsoConfig, find_initial,
                          pso_iterate, _init_swarm)
from shapegen.sexpr import parse_constraint


def test_full_box_immediate():
    space = compile_constraint(parse_constraint("p in (0,1) && q in (0,1)"))
    x = find_initial(space, PsoConfig(seed=0))
    assert space.contains(x)


def test_thin_ring_succeeds_within_default_restarts():
    ring = make_ring_space(RingSpec(3, 1.0, 0.99, 1.0))
    # confirm non-emptiness independently before asserting PSO success
    probe = rejection_sample(ring, np.random.default_rng(0))
    assert ring.contains(probe)
    x = find_initial(ring, PsoConfig(seed=1))
    assert ring.contains(x)


def test_empty_space_fails():
    space = compile_constraint(parse_constraint("p in (0,1) && p > 2"))
    with pytest.raises(InitializationError, match="initialization failed") as exc:
        find_initial(space, PsoConfig(seed=2, restarts=3))
    assert exc.value.best_penalty > 0
    assert exc.value.best_point is not None


def test_zero_scales_freeze_swarm():
    space = compile_constraint(parse_constraint(
        "p in (0,1) && q in (0,1) && p + q > 5"))  # nothing to find
    cfg = PsoConfig(seed=3, inertia=0.0, cognitive_scale=0.0, social_scale=0.0)
    rng = np.random.default_rng(3)
    swarm = _init_swarm(space, cfg, rng)
    before = swarm.x.copy()
    pso_iterate(swarm, space)
    assert np.array_equal(swarm.x, before)


def test_gbest_monotone_on_ring():
    ring = make_ring_space(RingSpec(2, 1.0, 0.9, 1.0))
    cfg = PsoConfig(seed=4, max_iterations=50)
    rng = np.random.default_rng(4)
    swarm = _init_swarm(ring, cfg, rng)
    history = [swarm.gbest_val]
    for _ in range(50):
        pso_iterate(swarm, ring)
        history.append(swarm.gbest_val)
    assert all(b <= a for a, b in zip(history, history[1:]))


def test_output_always_member_pulse(pulse_spec):
    from shapegen.constraints import compile_spec
    space = compile_spec(pulse_spec, 1e-3)
    for seed in range(3):
        x = find_initial(space, PsoConfig(seed=seed))
        assert space.contains(x)


def test_determinism():
    ring = make_ring_space(RingSpec(3, 1.0, 0.9, 1.0))
    a = find_initial(ring, PsoConfig(seed=5))
    b = find_initial(ring, PsoConfig(seed=5))
    assert np.array_equal(a, b)


def test_zero_dim_space():
    space = compile_constraint(parse_constraint("p in (0,1) && p == 0.5"))
    x = find_initial(space, PsoConfig(seed=6))
    assert x.shape == (0,)


def test_config_validation():
    with pytest.raises(ValueError, match="swarm_size"):
        PsoConfig(swarm_size=1)
    with pytest.raises(ValueError, match="nonnegative"):
        PsoConfig(inertia=-0.1)
