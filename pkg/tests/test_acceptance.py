"""Acceptance suite: one test per release criterion.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one summary line
per criterion.  Every expected value asserted here is either computed by an
independent oracle (the baseline engine, ground-truth counting, workload
construction arithmetic) or fixed by the trace/workload contracts.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import pytest

from helpers import random_constraint, sample_spec, snapshot
from stnkit import (DeltaSTN, Interner, MemoryMeter, SplitMix64, TraceError,
                    AddOp, format_trace, generate, generate_adversarial,
                    parse_trace, replay, subsumption_ground_truth, verify,
                    WorkloadSpec)

SUITE_TRACES = 1000
ISOLATION_CASES = 10_000
FUZZ_INPUTS = 1_000_000


def _criterion(number: int, name: str, passed: bool, detail: str) -> None:
    verdict = "PASS" if passed else "FAIL"
    print(f"[acceptance] criterion {number} ({name}): {verdict} - {detail}")
    assert passed, f"criterion {number} ({name}): {detail}"


@dataclass
class SuiteStats:
    traces: int = 0
    total_ops: int = 0
    max_ops: int = 0
    checks: int = 0
    models: int = 0
    divergences: list = field(default_factory=list)
    audit_failures: int = 0
    monotone_violations: int = 0
    roundtrip_failures: int = 0
    elapsed: float = 0.0


@pytest.fixture(scope="module")
def suite() -> SuiteStats:
    """One pass over the 1000-trace workload suite, shared by criteria 1/2/4/8."""
    stats = SuiteStats()
    start = time.perf_counter()
    for seed in range(SUITE_TRACES):
        trace = generate(sample_spec(seed))
        stats.traces += 1
        stats.total_ops += len(trace)
        stats.max_ops = max(stats.max_ops, len(trace))
        if parse_trace(format_trace(trace).encode()).ops != trace.ops:
            stats.roundtrip_failures += 1
        report = verify(trace, deep=True, audit=True)
        stats.checks += report.checks_compared
        stats.models += report.models_compared
        stats.audit_failures += report.audit_failures
        if report.divergence is not None:
            stats.divergences.append((trace.source, report.divergence))
        last: dict[str, bool] = {}
        for net, verdict in report.check_log:
            if last.get(net) is False and verdict:
                stats.monotone_violations += 1
            last[net] = verdict
    stats.elapsed = time.perf_counter() - start
    return stats


def test_criterion_1_oracle_equivalence(suite: SuiteStats):
    detail = (f"{suite.traces} traces ({suite.total_ops} ops, max "
              f"{suite.max_ops}/trace), {suite.checks} verdicts and "
              f"{suite.models} model values compared exactly, "
              f"{len(suite.divergences)} divergences, {suite.elapsed:.1f}s")
    passed = (suite.traces == SUITE_TRACES and suite.max_ops <= 1000
              and not suite.divergences)
    _criterion(1, "oracle equivalence", passed, detail)


def test_criterion_2_model_soundness_and_minimality(suite: SuiteStats):
    # Deep verification compares every model value against the baseline's
    # shortest-path value; the in-engine audit re-checks, at every sat
    # verdict, that the stored model satisfies all constraints and that no
    # value is negative.
    detail = (f"{suite.models} model values matched the reference engine, "
              f"{suite.audit_failures} in-engine audit failures")
    passed = (suite.audit_failures == 0 and not suite.divergences
              and suite.models > 0)
    _criterion(2, "model soundness and minimality", passed, detail)


def test_criterion_3_persistence_isolation():
    failures = 0
    for case in range(ISOLATION_CASES):
        rng = SplitMix64(case * 0x6C62272E + 5)
        parent = DeltaSTN()
        for _ in range(rng.randint(0, 8)):
            x, y, b = random_constraint(rng)
            parent.add(x, y, b)
        before = snapshot(parent).encode()
        descendants = [parent.copy()]
        for _ in range(rng.randint(1, 10)):
            net = rng.choice(descendants)
            action = rng.randint(0, 5)
            if action == 0:
                descendants.append(net.copy())
            elif action == 1:
                net.check()
            else:
                x, y, b = random_constraint(rng)
                net.add(x, y, b)
        if snapshot(parent).encode() != before:
            failures += 1
    _criterion(3, "persistence isolation", failures == 0,
               f"{ISOLATION_CASES} randomized parent/descendant cases, "
               f"{failures} snapshot changes")


def test_criterion_4_monotone_inconsistency(suite: SuiteStats):
    _criterion(4, "monotone inconsistency", suite.monotone_violations == 0,
               f"{suite.checks} check verdicts across {suite.traces} traces, "
               f"{suite.monotone_violations} unsat->sat transitions")


@pytest.fixture(scope="module")
def branching_workload():
    """Criterion-5 workload replayed on both engines (reused by criterion 6)."""
    spec = WorkloadSpec(seed=505, depth=12, branching=2, adds_per_node=4,
                        new_tp_prob=1.0, contradiction_prob=0.0, root_adds=50)
    trace = generate(spec)
    delta = replay(trace, "delta", time_limit=None, mem_limit=None)
    baseline = replay(trace, "baseline", time_limit=None, mem_limit=None)
    return spec, trace, delta, baseline


def test_criterion_5_structural_sharing(branching_workload):
    spec, trace, delta, baseline = branching_workload
    # Both bounds below follow from the construction alone.  Every add is a
    # fresh, never-subsumed constraint, so the sharing engine allocates one
    # cell per add; each of the 2^12 leaf networks deep-copies its whole
    # 50 + 4*12 constraint path in the baseline, and leaves are never
    # destroyed.
    nodes = sum(spec.branching ** level for level in range(spec.depth + 1))
    expected_cells = spec.root_adds + spec.adds_per_node * (nodes - 1)
    leaves = spec.branching ** spec.depth
    baseline_floor = leaves * (spec.root_adds + spec.adds_per_node * spec.depth)
    ratio = baseline.cells_peak / delta.cells_peak
    detail = (f"delta peak {delta.cells_peak} cells (expected "
              f"{expected_cells}), baseline peak {baseline.cells_peak} edges "
              f"(floor {baseline_floor}), ratio {ratio:.1f}x")
    passed = (delta.ok and baseline.ok
              and delta.cells_allocated == expected_cells
              and delta.cells_peak == expected_cells
              and baseline.cells_peak >= baseline_floor
              and ratio >= 10.0)
    _criterion(5, "structural sharing", passed, detail)


def test_criterion_6_time_dominance(branching_workload):
    _, _, delta_tree, baseline_tree = branching_workload
    chain = generate_adversarial("deep_chain", 99_500, seed=0, check_every=200)
    assert len(chain) == 100_000
    delta_chain = replay(chain, "delta", time_limit=None, mem_limit=None)
    baseline_chain = replay(chain, "baseline", time_limit=None, mem_limit=None)
    total = (delta_tree.wall_time + baseline_tree.wall_time
             + delta_chain.wall_time + baseline_chain.wall_time)
    detail = (f"branching workload {delta_tree.wall_time:.2f}s vs "
              f"{baseline_tree.wall_time:.2f}s "
              f"(speedup {baseline_tree.wall_time / delta_tree.wall_time:.1f}x); "
              f"100k-op chain {delta_chain.wall_time:.2f}s vs "
              f"{baseline_chain.wall_time:.2f}s "
              f"(speedup {baseline_chain.wall_time / delta_chain.wall_time:.1f}x); "
              f"total {total:.1f}s")
    passed = (delta_chain.ok and baseline_chain.ok
              and delta_tree.wall_time <= baseline_tree.wall_time
              and delta_chain.wall_time <= baseline_chain.wall_time)
    _criterion(6, "time dominance over baseline", passed, detail)


def test_criterion_7_subsumption_behavior():
    trace = generate_adversarial("subsumption_chain", 1000, seed=7)
    expected = subsumption_ground_truth(trace)
    result = replay(trace, "delta", time_limit=None, mem_limit=None)

    # Independent full-scan audit of the list-ordering invariant on a
    # directly driven engine.
    meter = MemoryMeter()
    net = DeltaSTN(meter)
    interner = Interner()
    for op in trace.ops:
        if isinstance(op, AddOp):
            net.add(interner.intern(op.x), interner.intern(op.y), op.bound)
    ordering_violations = 0
    for x in net.constraints:
        first_seen: dict[int, object] = {}
        for y, b in net.neighbors(x):
            if y in first_seen and not first_seen[y] <= b:
                ordering_violations += 1
            first_seen.setdefault(y, b)
    audit_problems = net.audit()

    detail = (f"1000 adds on one pair -> {result.cells_allocated} stored "
              f"(ground truth {expected}), {ordering_violations} ordering "
              f"violations, {len(audit_problems)} audit problems")
    passed = (result.ok and result.cells_allocated == expected
              and meter.cells_allocated == expected
              and ordering_violations == 0 and not audit_problems)
    _criterion(7, "subsumption behavior", passed, detail)


def test_criterion_8_trace_format(suite: SuiteStats):
    for kind, n in (("negcycle", 50), ("subsumption_chain", 200),
                    ("deep_chain", 500)):
        trace = generate_adversarial(kind, n, seed=n)
        assert parse_trace(format_trace(trace).encode()).ops == trace.ops

    rng = SplitMix64(0xF5A5)
    vocabulary = ["make", "copy", "add", "check", "model", "destroy", "s0",
                  "s1", "a", "b", "->", "sat", "unsat", "1/2", "0.5", "-3",
                  "1/0", "#", "", "0.1.2", "a*b", "\x00", "é", "make s0"]
    crashes = 0
    bad_positions = 0
    start = time.perf_counter()
    for _ in range(FUZZ_INPUTS):
        mode = rng.next_u64() % 4
        if mode == 0:
            data: object = rng.next_u64().to_bytes(8, "big")
        elif mode == 1:
            data = " ".join(vocabulary[rng.next_u64() % len(vocabulary)]
                            for _ in range(1 + rng.next_u64() % 5))
        elif mode == 2:
            data = "make s0\n" + vocabulary[rng.next_u64() % len(vocabulary)]
        else:
            data = (vocabulary[rng.next_u64() % len(vocabulary)] + "\n"
                    + vocabulary[rng.next_u64() % len(vocabulary)])
        try:
            parse_trace(data)
        except TraceError as exc:
            if not (isinstance(exc.line, int) and exc.line >= 1):
                bad_positions += 1
        except Exception:
            crashes += 1
    elapsed = time.perf_counter() - start

    detail = (f"{suite.roundtrip_failures} round-trip failures over "
              f"{suite.traces} generated traces; {FUZZ_INPUTS} fuzz inputs in "
              f"{elapsed:.1f}s, {crashes} crashes, {bad_positions} errors "
              f"without a position")
    passed = (suite.roundtrip_failures == 0 and crashes == 0
              and bad_positions == 0)
    _criterion(8, "trace format round-trip and fuzzing", passed, detail)
