"""Deterministic generators of STN operation traces.

``generate`` emits branching-search-shaped traces: a tree of networks where
each child copies its parent, adds a few constraints and gets checked, the
way a forward search over durative actions uses a temporal network.  Each
action contributes a start/end time-point pair tied together by exact
duration constraints plus a precedence constraint ordering it after an
earlier action (a total chain or a random partial order).

Every non-contradictory constraint is generated so that a concrete witness
schedule satisfies it, which lets the generator annotate every ``check``
with its known verdict; injected contradictions flip a branch (and its
whole subtree) to unsat.  ``generate_adversarial`` builds focused stress
shapes: negative cycles, subsumption hammering, long chains.

Traces are reproducible bit-for-bit from the seed: randomness comes from an
in-repo splitmix64 generator, not from anything version-dependent.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction

from .trace import (AddOp, CheckOp, CopyOp, DestroyOp, MakeOp, ModelOp,
                    Trace, TraceOp)

_MASK64 = (1 << 64) - 1


class SplitMix64:
    """splitmix64 PRNG: 64-bit state, fixed multiplicative mixing."""

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def random(self) -> float:
        return self.next_u64() / 18446744073709551616.0

    def randint(self, low: int, high: int) -> int:
        """Uniform-ish integer in [low, high], inclusive."""
        return low + self.next_u64() % (high - low + 1)

    def choice(self, seq):
        return seq[self.next_u64() % len(seq)]


@dataclass(frozen=True)
class WorkloadSpec:
    """Shape parameters for a branching-search trace.

    ``root_adds`` constraints go into the root network before branching,
    forming a prefix every descendant shares.  ``bound_range`` bounds the
    small integers used for action durations and precedence slack.
    ``op_cap`` guards against accidentally huge trees.
    """

    seed: int
    depth: int
    branching: int
    adds_per_node: int
    new_tp_prob: float = 1.0
    contradiction_prob: float = 0.0
    bound_range: tuple[int, int] = (1, 10)
    total_order: bool = False
    root_adds: int = 0
    model_probe_prob: float = 0.0
    op_cap: int = 200_000

    def node_count(self) -> int:
        return sum(self.branching ** level for level in range(self.depth + 1))

    def estimated_ops(self) -> int:
        nodes = self.node_count()
        per_node = 1 + self.adds_per_node + 1  # copy + adds + check
        probes = nodes if self.model_probe_prob > 0 else 0
        return 1 + self.root_adds + 1 + (nodes - 1) * per_node + nodes + probes

    def validate(self) -> None:
        if self.depth < 0:
            raise ValueError("depth must be >= 0")
        if self.branching < 1:
            raise ValueError("branching must be >= 1")
        if self.adds_per_node < 0 or self.root_adds < 0:
            raise ValueError("add counts must be >= 0")
        for name in ("new_tp_prob", "contradiction_prob", "model_probe_prob"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must be in [0, 1]")
        low, high = self.bound_range
        if not 0 <= low <= high:
            raise ValueError("bound_range must satisfy 0 <= min <= max")
        if self.estimated_ops() > self.op_cap:
            raise ValueError(
                f"spec would emit ~{self.estimated_ops()} ops, over the cap "
                f"of {self.op_cap}")


class _Branch:
    """Per-network generator state, forked on copy.

    ``sigma`` is the witness schedule: every constraint emitted on a sat
    branch is satisfied by it, which is what makes the generator's verdict
    annotations trustworthy.
    """

    __slots__ = ("name", "sigma", "tps", "ends", "actions", "pending", "unsat")

    def __init__(self, name: str):
        self.name = name
        self.sigma: dict[str, int] = {}
        self.tps: list[str] = []
        self.ends: list[str] = []
        self.actions: list[tuple[str, str, int]] = []
        self.pending: deque[tuple[str, str, int]] = deque()
        self.unsat = False

    def fork(self, name: str) -> "_Branch":
        child = _Branch(name)
        child.sigma = dict(self.sigma)
        child.tps = list(self.tps)
        child.ends = list(self.ends)
        child.actions = list(self.actions)
        child.pending = deque(self.pending)
        child.unsat = self.unsat
        return child


class _Generator:
    def __init__(self, spec: WorkloadSpec):
        self.spec = spec
        self.rng = SplitMix64(spec.seed)
        self.ops: list[TraceOp] = []
        self.net_counter = 0
        self.action_counter = 0

    def fresh_net(self) -> str:
        name = f"s{self.net_counter}"
        self.net_counter += 1
        return name

    def plan_action(self, branch: _Branch) -> None:
        k = self.action_counter
        self.action_counter += 1
        s, e = f"a{k}.s", f"a{k}.e"
        low, high = self.spec.bound_range
        duration = self.rng.randint(low, high)
        pred = None
        if branch.ends:
            pred = branch.ends[-1] if self.spec.total_order else self.rng.choice(branch.ends)
        branch.sigma[s] = branch.sigma[pred] if pred else 0
        branch.sigma[e] = branch.sigma[s] + duration
        branch.pending.append((e, s, duration))
        branch.pending.append((s, e, -duration))
        if pred is not None:
            branch.pending.append((pred, s, 0))
        branch.tps.extend((s, e))
        branch.ends.append(e)
        branch.actions.append((s, e, duration))

    def plan_extra_precedence(self, branch: _Branch) -> None:
        u = self.rng.choice(branch.tps)
        v = self.rng.choice(branch.tps)
        if branch.sigma[u] > branch.sigma[v]:
            u, v = v, u
        slack = self.rng.randint(0, self.spec.bound_range[1])
        branch.pending.append((u, v, branch.sigma[u] - branch.sigma[v] + slack))

    def emit_add(self, branch: _Branch) -> None:
        if not branch.pending:
            if branch.ends and self.rng.random() >= self.spec.new_tp_prob:
                self.plan_extra_precedence(branch)
            else:
                self.plan_action(branch)
        x, y, bound = branch.pending.popleft()
        self.ops.append(AddOp(branch.name, x, y, Fraction(bound)))

    def emit_violator(self, branch: _Branch) -> None:
        # A constraint no model can satisfy alongside what is already there.
        if branch.actions:
            s, e, duration = self.rng.choice(branch.actions)
            self.ops.append(AddOp(branch.name, s, e, Fraction(-(duration + 1))))
        else:
            t = f"x{self.action_counter}"
            self.action_counter += 1
            self.ops.append(AddOp(branch.name, t, t, Fraction(-1)))
        branch.unsat = True

    def run_adds(self, branch: _Branch, count: int) -> None:
        contradict_at = None
        if count > 0 and self.rng.random() < self.spec.contradiction_prob:
            contradict_at = count - 1
        for i in range(count):
            if i == contradict_at:
                self.emit_violator(branch)
            else:
                self.emit_add(branch)

    def check_and_probe(self, branch: _Branch) -> None:
        self.ops.append(CheckOp(branch.name, expected=not branch.unsat))
        if (not branch.unsat and branch.tps
                and self.rng.random() < self.spec.model_probe_prob):
            self.ops.append(ModelOp(branch.name, self.rng.choice(branch.tps)))

    def expand(self, branch: _Branch, level: int) -> None:
        if level == self.spec.depth:
            return
        children = []
        for _ in range(self.spec.branching):
            child = branch.fork(self.fresh_net())
            self.ops.append(CopyOp(child.name, branch.name))
            self.run_adds(child, self.spec.adds_per_node)
            self.check_and_probe(child)
            children.append(child)
        # The search is done expanding this state; its copies live on.
        self.ops.append(DestroyOp(branch.name))
        for child in children:
            self.expand(child, level + 1)

    def run(self) -> Trace:
        root = _Branch(self.fresh_net())
        self.ops.append(MakeOp(root.name))
        self.run_adds(root, self.spec.root_adds)
        self.check_and_probe(root)
        self.expand(root, 0)
        spec = self.spec
        source = (f"fctp-seed{spec.seed}-d{spec.depth}-b{spec.branching}"
                  f"-a{spec.adds_per_node}")
        return Trace(self.ops, source)


def generate(spec: WorkloadSpec) -> Trace:
    """Branching-search trace; identical spec gives identical bytes."""
    spec.validate()
    return _Generator(spec).run()


def generate_adversarial(kind: str, n: int, seed: int = 0, *,
                         chain_step: int = 1, check_every: int = 0) -> Trace:
    """Focused stress traces: ``negcycle``, ``subsumption_chain``, ``deep_chain``.

    negcycle
        Cycle of ``n`` constraints whose bounds sum to -1; every check
        before the closing edge is sat, the final one unsat.
    subsumption_chain
        ``n`` adds on one ordered pair, mixing strict improvements with
        subsumed repeats; only the strictly improving subset is storable.
    deep_chain
        Path of ``n`` precedence edges of ``chain_step`` each, optionally
        checked every ``check_every`` adds; the last point's minimal value
        is ``n * chain_step``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = SplitMix64(seed)
    ops: list[TraceOp] = [MakeOp("s0")]
    if kind == "negcycle":
        if n == 1:
            ops.append(AddOp("s0", "t0", "t0", Fraction(-1)))
            ops.append(CheckOp("s0", expected=False))
        else:
            weights = [rng.randint(-3, 3) for _ in range(n - 1)]
            closing = -1 - sum(weights)
            for i, w in enumerate(weights):
                ops.append(AddOp("s0", f"t{i + 1}", f"t{i}", Fraction(w)))
                ops.append(CheckOp("s0", expected=True))
            ops.append(AddOp("s0", "t0", f"t{n - 1}", Fraction(closing)))
            ops.append(CheckOp("s0", expected=False))
    elif kind == "subsumption_chain":
        minimum: int | None = None
        for i in range(n):
            if minimum is None:
                bound = rng.randint(-3, 3)
                minimum = bound
            elif rng.random() < 0.5:
                bound = minimum - rng.randint(1, 3)
                minimum = bound
            else:
                bound = minimum + rng.randint(0, 3)
            ops.append(AddOp("s0", "x", "y", Fraction(bound)))
        ops.append(CheckOp("s0", expected=True))
        ops.append(ModelOp("s0", "x", Fraction(0)))
        ops.append(ModelOp("s0", "y", Fraction(max(0, -minimum))))
    elif kind == "deep_chain":
        if chain_step < 0:
            raise ValueError("chain_step must be >= 0")
        for i in range(1, n + 1):
            ops.append(AddOp("s0", f"t{i - 1}", f"t{i}", Fraction(-chain_step)))
            if check_every and i % check_every == 0 and i < n:
                ops.append(CheckOp("s0", expected=True))
        ops.append(CheckOp("s0", expected=True))
        ops.append(ModelOp("s0", f"t{n}", Fraction(n * chain_step)))
    else:
        raise ValueError(f"unknown adversarial kind: {kind!r}")
    return Trace(ops, f"{kind}-n{n}-seed{seed}")


def subsumption_ground_truth(trace: Trace) -> int:
    """Number of adds a subsumption-respecting engine must store.

    Independent of any engine: counts, per ordered pair, the adds that
    strictly improve the running minimum bound (the first add per pair
    always stores).  Only meaningful for single-network traces without
    copies that stay consistent throughout, like ``subsumption_chain``.
    """
    minima: dict[tuple[str, str, str], Fraction] = {}
    stored = 0
    for op in trace.ops:
        if not isinstance(op, AddOp):
            continue
        key = (op.net, op.x, op.y)
        current = minima.get(key)
        if current is None or op.bound < current:
            if not (op.x == op.y and op.bound >= 0):
                minima[key] = op.bound
                stored += 1
    return stored
