"""Shared test utilities: observable snapshots and spec sampling."""

from __future__ import annotations

from fractions import Fraction

from stnkit import SplitMix64, WorkloadSpec


def snapshot(net) -> str:
    """Serialized view of everything observable about a network."""
    if net.check():
        models = sorted((tp, net.model(tp)) for tp in net.time_points())
        return repr((True, models))
    return repr((False, None))


def random_constraint(rng: SplitMix64) -> tuple[int, int, object]:
    """A random constraint over a small pool, integer or fractional bound."""
    x = rng.randint(0, 5)
    y = rng.randint(0, 5)
    if rng.randint(0, 3) == 0:
        bound = Fraction(rng.randint(-12, 12), rng.randint(1, 4))
    else:
        bound = rng.randint(-5, 8)
    return x, y, bound


def sample_spec(seed: int, *, op_cap: int = 1000, max_depth: int = 8,
                max_branching: int = 3) -> WorkloadSpec:
    """A valid workload spec inside the given op cap, varied by seed."""
    rng = SplitMix64(seed * 0x9E3779B9 + 17)
    branching = rng.randint(1, max_branching)
    adds = rng.randint(1, 3)
    contradiction = rng.randint(0, 15) / 100.0
    new_tp = rng.randint(30, 100) / 100.0
    total_order = rng.randint(0, 1) == 1
    probe = rng.randint(10, 60) / 100.0
    depth = max_depth
    while depth > 0:
        spec = WorkloadSpec(
            seed=seed, depth=depth, branching=branching, adds_per_node=adds,
            new_tp_prob=new_tp, contradiction_prob=contradiction,
            total_order=total_order, model_probe_prob=probe, op_cap=op_cap)
        if spec.estimated_ops() <= op_cap:
            return spec
        depth -= 1
    return WorkloadSpec(seed=seed, depth=0, branching=1, adds_per_node=adds,
                        model_probe_prob=probe, op_cap=op_cap)
