"""Trace replay, engine cross-verification, and benchmark aggregation.

``replay`` executes one trace against one engine under wall-clock and
logical-memory limits, validating any inline expectations.  ``verify``
runs the incremental and baseline engines in lockstep over the same trace
and reports the first disagreement in any check verdict or model value;
because both engines use exact arithmetic, agreement is bit-for-bit.
``bench`` batches replays into CSV rows, and ``report_cactus`` turns the
CSV into per-engine sorted series ready for cactus plotting.
"""

from __future__ import annotations

import csv
import io
import statistics
from dataclasses import dataclass, field, fields
from pathlib import Path
from time import perf_counter
from typing import Callable, IO, Iterable, Union

from .baseline import BaselineSTN
from .core import DeltaSTN, STNError
from .instrument import MemoryMeter
from .trace import (AddOp, CheckOp, CopyOp, DestroyOp, Interner, MakeOp,
                    ModelOp, Trace, TraceError, parse_trace)

try:
    import resource
except ImportError:  # pragma: no cover - non-Unix
    resource = None

CSV_HEADER_COMMENT = "# stnkit bench csv v1"

STATUS_OK = "ok"
STATUS_TIMEOUT = "timeout"
STATUS_MEMOUT = "memout"
STATUS_DIVERGENCE = "divergence"
STATUS_PARSE_ERROR = "parse_error"

DEFAULT_TIME_LIMIT = 60.0
DEFAULT_MEM_LIMIT = 10_000_000  # live cells; roughly 1 GB of engine state

EngineFactory = Callable[[MemoryMeter], object]


def default_factories() -> dict[str, EngineFactory]:
    return {"delta": DeltaSTN, "baseline": BaselineSTN}


ENGINE_NAMES = ("delta", "baseline")


def _peak_rss_bytes() -> int | None:
    if resource is None:
        return None
    return resource.getrusage(resource.RUSAGE_SELF).ru_maxrss * 1024


@dataclass
class RunResult:
    """Outcome and resource accounting of one trace replay."""

    instance: str
    engine: str
    status: str
    wall_time: float
    ops_executed: int
    checks: int = 0
    sat_checks: int = 0
    unsat_checks: int = 0
    cells_allocated: int = 0
    cells_peak: int = 0
    entries_peak: int = 0
    peak_rss: int | None = None
    rep: Union[int, str] = 0
    fail_op: int | None = None
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.status == STATUS_OK


def replay(trace: Trace, engine: str = "delta", *,
           time_limit: float | None = DEFAULT_TIME_LIMIT,
           mem_limit: int | None = DEFAULT_MEM_LIMIT,
           factories: dict[str, EngineFactory] | None = None,
           on_check: Callable[[str, bool], None] | None = None) -> RunResult:
    """Execute every op in order; limits are enforced at op boundaries."""
    factory = (factories or default_factories())[engine]
    meter = MemoryMeter()
    interner = Interner()
    nets: dict[str, object] = {}
    checks = sat_checks = unsat_checks = 0
    failure: tuple[str, int, str] | None = None

    start = perf_counter()
    executed = 0
    for index, op in enumerate(trace.ops, start=1):
        if time_limit is not None and perf_counter() - start > time_limit:
            failure = (STATUS_TIMEOUT, index, f"time limit {time_limit}s hit before op {index}")
            break
        if mem_limit is not None and meter.cells_live > mem_limit:
            failure = (STATUS_MEMOUT, index, f"live cells over {mem_limit} before op {index}")
            break
        if isinstance(op, AddOp):
            nets[op.net].add(interner.intern(op.x), interner.intern(op.y), op.bound)
        elif isinstance(op, CheckOp):
            verdict = nets[op.net].check()
            checks += 1
            if verdict:
                sat_checks += 1
            else:
                unsat_checks += 1
            if on_check is not None:
                on_check(op.net, verdict)
            if op.expected is not None and verdict != op.expected:
                failure = (STATUS_DIVERGENCE, index,
                           f"op {index}: check on {op.net} expected "
                           f"{'sat' if op.expected else 'unsat'}, got "
                           f"{'sat' if verdict else 'unsat'}")
                break
        elif isinstance(op, ModelOp):
            try:
                value = nets[op.net].model(interner.intern(op.x))
            except STNError as exc:
                failure = (STATUS_DIVERGENCE, index, f"op {index}: model failed: {exc}")
                break
            if op.expected is not None and value != op.expected:
                failure = (STATUS_DIVERGENCE, index,
                           f"op {index}: model of {op.x} expected {op.expected}, got {value}")
                break
        elif isinstance(op, CopyOp):
            nets[op.net] = nets[op.src].copy()
        elif isinstance(op, MakeOp):
            nets[op.net] = factory(meter)
        elif isinstance(op, DestroyOp):
            nets.pop(op.net).release()
        executed += 1
    wall = perf_counter() - start

    if failure is None:
        status, fail_op, detail = STATUS_OK, None, ""
    else:
        status, fail_op, detail = failure
    return RunResult(
        instance=trace.source, engine=engine, status=status, wall_time=wall,
        ops_executed=executed, checks=checks, sat_checks=sat_checks,
        unsat_checks=unsat_checks, cells_allocated=meter.cells_allocated,
        cells_peak=meter.cells_peak, entries_peak=meter.entries_peak,
        peak_rss=_peak_rss_bytes(), fail_op=fail_op, detail=detail)


@dataclass
class VerifyReport:
    """Lockstep comparison outcome for one trace."""

    instance: str
    ops_executed: int
    checks_compared: int = 0
    models_compared: int = 0
    divergence: tuple[int, str] | None = None
    audit_failures: int = 0
    check_log: list[tuple[str, bool]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.divergence is None and self.audit_failures == 0


def verify(trace: Trace, *, deep: bool = False, audit: bool = False,
           engines: tuple[str, str] = ("delta", "baseline"),
           factories: dict[str, EngineFactory] | None = None) -> VerifyReport:
    """Replay on two engines at once and compare every observable.

    Check verdicts and queried model values are always compared.  With
    ``deep``, every sat check additionally compares the complete model over
    all time points of the network; with ``audit``, every sat check runs
    the first engine's structural self-audit.
    """
    facs = factories or default_factories()
    make_a, make_b = facs[engines[0]], facs[engines[1]]
    interner = Interner()
    nets_a: dict[str, object] = {}
    nets_b: dict[str, object] = {}
    report = VerifyReport(instance=trace.source, ops_executed=0)

    def diverge(index: int, message: str) -> None:
        report.divergence = (index, f"op {index}: {message}")

    for index, op in enumerate(trace.ops, start=1):
        if isinstance(op, AddOp):
            x, y = interner.intern(op.x), interner.intern(op.y)
            nets_a[op.net].add(x, y, op.bound)
            nets_b[op.net].add(x, y, op.bound)
        elif isinstance(op, CheckOp):
            a, b = nets_a[op.net], nets_b[op.net]
            va, vb = a.check(), b.check()
            report.checks_compared += 1
            report.check_log.append((op.net, va))
            if va != vb:
                diverge(index, f"check on {op.net}: {engines[0]}={va} {engines[1]}={vb}")
                break
            if op.expected is not None and va != op.expected:
                diverge(index, f"check on {op.net} expected {op.expected}, got {va}")
                break
            if va:
                if audit and hasattr(a, "audit"):
                    problems = a.audit()
                    if problems:
                        report.audit_failures += len(problems)
                        diverge(index, f"audit of {op.net}: {problems[0]}")
                        break
                if deep:
                    tps_a, tps_b = set(a.time_points()), set(b.time_points())
                    if tps_a != tps_b:
                        diverge(index, f"time point sets differ on {op.net}")
                        break
                    mismatch = None
                    for tp in tps_a:
                        ma, mb = a.model(tp), b.model(tp)
                        report.models_compared += 1
                        if ma != mb:
                            mismatch = (tp, ma, mb)
                            break
                    if mismatch:
                        tp, ma, mb = mismatch
                        diverge(index, f"model of {interner.name(tp)} on {op.net}: "
                                       f"{engines[0]}={ma} {engines[1]}={mb}")
                        break
        elif isinstance(op, ModelOp):
            x = interner.intern(op.x)
            a, b = nets_a[op.net], nets_b[op.net]
            try:
                ma = a.model(x)
            except STNError as exc:
                ma = exc
            try:
                mb = b.model(x)
            except STNError as exc:
                mb = exc
            failed_a, failed_b = isinstance(ma, STNError), isinstance(mb, STNError)
            if failed_a != failed_b:
                diverge(index, f"model of {op.x}: one engine failed "
                               f"({engines[0]}: {ma!r}, {engines[1]}: {mb!r})")
                break
            if not failed_a:
                report.models_compared += 1
                if ma != mb:
                    diverge(index, f"model of {op.x} on {op.net}: "
                                   f"{engines[0]}={ma} {engines[1]}={mb}")
                    break
                if op.expected is not None and ma != op.expected:
                    diverge(index, f"model of {op.x} expected {op.expected}, got {ma}")
                    break
            elif op.expected is not None:
                diverge(index, f"model of {op.x} expected {op.expected} but failed: {ma}")
                break
        elif isinstance(op, CopyOp):
            nets_a[op.net] = nets_a[op.src].copy()
            nets_b[op.net] = nets_b[op.src].copy()
        elif isinstance(op, MakeOp):
            nets_a[op.net] = make_a(MemoryMeter())
            nets_b[op.net] = make_b(MemoryMeter())
        elif isinstance(op, DestroyOp):
            nets_a.pop(op.net).release()
            nets_b.pop(op.net).release()
        report.ops_executed = index
    return report


def _load_trace(item: Union[Trace, str, Path]) -> tuple[str, Trace | None, str]:
    if isinstance(item, Trace):
        return item.source, item, ""
    path = Path(item)
    try:
        return str(path), parse_trace(path.read_bytes(), source=str(path)), ""
    except OSError as exc:
        return str(path), None, str(exc)
    except TraceError as exc:
        return str(path), None, str(exc)


def bench(traces: Iterable[Union[Trace, str, Path]],
          engines: Iterable[str] = ENGINE_NAMES, reps: int = 1, *,
          time_limit: float | None = DEFAULT_TIME_LIMIT,
          mem_limit: int | None = DEFAULT_MEM_LIMIT,
          factories: dict[str, EngineFactory] | None = None) -> list[RunResult]:
    """Replay every (trace, engine) pair ``reps`` times.

    Emits one row per repetition plus one ``median`` row per pair.  Rows
    never abort the batch: parse failures become ``parse_error`` rows.
    """
    rows: list[RunResult] = []
    engines = list(engines)
    for item in traces:
        name, trace, problem = _load_trace(item)
        for engine in engines:
            group: list[RunResult] = []
            for rep in range(reps):
                if trace is None:
                    result = RunResult(instance=name, engine=engine,
                                       status=STATUS_PARSE_ERROR, wall_time=0.0,
                                       ops_executed=0, detail=problem)
                else:
                    result = replay(trace, engine, time_limit=time_limit,
                                    mem_limit=mem_limit, factories=factories)
                    result.instance = name
                result.rep = rep
                group.append(result)
                rows.append(result)
            median = RunResult(**{f.name: getattr(group[0], f.name)
                                  for f in fields(RunResult)})
            median.rep = "median"
            median.wall_time = statistics.median(r.wall_time for r in group)
            rows.append(median)
    return rows


_CSV_COLUMNS = ["instance", "engine", "rep", "status", "wall_time",
                "ops_executed", "checks", "sat_checks", "unsat_checks",
                "cells_allocated", "cells_peak", "entries_peak", "peak_rss",
                "fail_op", "detail"]


def write_csv(rows: Iterable[RunResult], output: Union[str, Path, IO[str]]) -> None:
    own = isinstance(output, (str, Path))
    handle = open(output, "w", newline="") if own else output
    try:
        handle.write(CSV_HEADER_COMMENT + "\n")
        writer = csv.writer(handle)
        writer.writerow(_CSV_COLUMNS)
        for row in rows:
            writer.writerow([
                row.instance, row.engine, row.rep, row.status,
                f"{row.wall_time:.6f}", row.ops_executed, row.checks,
                row.sat_checks, row.unsat_checks, row.cells_allocated,
                row.cells_peak, row.entries_peak,
                "" if row.peak_rss is None else row.peak_rss,
                "" if row.fail_op is None else row.fail_op, row.detail])
    finally:
        if own:
            handle.close()


def read_csv(source: Union[str, Path, IO[str]]) -> list[dict[str, str]]:
    own = isinstance(source, (str, Path))
    handle = open(source, newline="") if own else source
    try:
        lines = [line for line in handle if not line.startswith("#")]
    finally:
        if own:
            handle.close()
    reader = csv.DictReader(io.StringIO("".join(lines)))
    if reader.fieldnames is None or "instance" not in reader.fieldnames:
        raise ValueError("malformed bench CSV: missing column header")
    return list(reader)


def cactus_series(rows: list[dict[str, str]], engine: str,
                  value_column: str) -> list[tuple[int, float]]:
    """(instances solved, per-instance cost) pairs, cost sorted ascending."""
    meds = [r for r in rows if r["rep"] == "median"]
    pool = meds if meds else rows
    values = sorted(float(r[value_column]) for r in pool
                    if r["engine"] == engine and r["status"] == STATUS_OK)
    return [(i, v) for i, v in enumerate(values, start=1)]


def report_cactus(csv_source: Union[str, Path, IO[str]],
                  out_dir: Union[str, Path]) -> list[Path]:
    """Write per-engine cactus series files for time and logical memory."""
    rows = read_csv(csv_source)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    engines = sorted({r["engine"] for r in rows})
    written: list[Path] = []
    for resource_name, column in (("time", "wall_time"), ("memory", "cells_peak")):
        for engine in engines:
            series = cactus_series(rows, engine, column)
            path = out / f"cactus-{resource_name}-{engine}.txt"
            with open(path, "w") as handle:
                handle.write(f"# cactus series engine={engine} resource={resource_name}\n")
                handle.write("# columns: solved value\n")
                for solved, value in series:
                    handle.write(f"{solved} {value:g}\n")
            written.append(path)
    return written
