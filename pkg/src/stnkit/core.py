"""Incremental simple temporal network with structural sharing.

A simple temporal network (STN) holds difference constraints ``x - y <= b``
over time points, with ``b`` an exact rational.  This engine is built for
search procedures that branch: ``copy()`` is cheap because the per-point
neighbor lists are immutable cons cells shared between a network and its
copies, and consistency is maintained incrementally, one constraint at a
time, instead of being recomputed from scratch.

Internally each network keeps, per time point ``x``:

* ``constraints[x]`` -- head of an immutable list of ``(dst, bound)`` cells,
  one per recorded constraint ``x - dst <= bound``.  Prepending to a copy's
  list never disturbs the parent's view of the same chain.
* ``distances[x]`` -- shortest distance from the implicit zero point to
  ``x`` over the inverted distance graph.  Always ``<= 0``; the value of
  ``x`` in the earliest-time (minimal-makespan) model is ``-distances[x]``.

All arithmetic is exact (``int`` / ``fractions.Fraction``); floats are
rejected because rounding would make subsumption and negative-cycle
decisions unsound.
"""

from __future__ import annotations

import weakref
from collections import deque
from fractions import Fraction
from typing import Iterator, KeysView, Optional, Union

from .instrument import MemoryMeter

Rational = Union[int, Fraction]


class STNError(Exception):
    """Base class for engine errors."""


class UnknownTimePointError(STNError):
    """A model value was requested for a time point the network never saw."""


class NoModelError(STNError):
    """A model value was requested from an inconsistent network."""


def as_bound(value: Rational) -> Rational:
    """Validate and normalize a constraint bound.

    Accepts ``int`` and ``Fraction`` only; integral fractions collapse to
    ``int`` so that integer-weighted networks stay on fast native
    arithmetic.  Floats are rejected, never coerced.
    """
    if type(value) is int:
        return value
    if isinstance(value, Fraction):
        return value.numerator if value.denominator == 1 else value
    if isinstance(value, int):  # bool and int subclasses
        return int(value)
    raise TypeError(f"bound must be an exact rational (int or Fraction), got {type(value).__name__}")


class NeighborCell:
    """One immutable node of a persistent neighbor list.

    A cell records constraint ``x - dst <= bound`` where ``x`` is the key
    under which the containing list is stored.  Cells are shared freely
    across networks and must never be mutated; reclamation is left to the
    interpreter's reference counting, with a weakref finalizer feeding the
    live-cell meter.
    """

    __slots__ = ("dst", "bound", "next", "__weakref__")

    def __init__(self, dst: int, bound: Rational, next_cell: Optional["NeighborCell"]):
        self.dst = dst
        self.bound = bound
        self.next = next_cell

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"NeighborCell(dst={self.dst}, bound={self.bound})"


class DeltaSTN:
    """STN engine with persistent, structurally shared constraint storage.

    The public surface is the five-operation interface used by branching
    planners: construct, :meth:`copy`, :meth:`add`, :meth:`check`,
    :meth:`model`.  Once a network reports inconsistent it stays
    inconsistent; constraint retraction is deliberately unsupported.
    """

    __slots__ = ("constraints", "distances", "is_sat", "meter", "__weakref__")

    def __init__(self, meter: MemoryMeter | None = None):
        self.constraints: dict[int, NeighborCell | None] = {}
        self.distances: dict[int, Rational] = {}
        self.is_sat = True
        self.meter = meter if meter is not None else MemoryMeter()

    # -- the five-operation interface ------------------------------------

    def copy(self) -> "DeltaSTN":
        """Return an independent network inheriting every constraint.

        The constraint map is copied but the neighbor chains it points to
        are not; the copy extends them by prepending, so parent and child
        never observe each other's later mutations.  Distances are copied
        by value, letting the child reuse all propagation work done so far.
        """
        child = DeltaSTN.__new__(DeltaSTN)
        child.constraints = dict(self.constraints)
        child.distances = dict(self.distances)
        child.is_sat = self.is_sat
        child.meter = self.meter
        child.meter.add_entries(len(child.constraints) + len(child.distances))
        return child

    def add(self, x: int, y: int, b: Rational) -> None:
        """Record constraint ``x - y <= b`` and re-check consistency.

        No-op on an already inconsistent network.  A constraint subsumed by
        an existing one (same pair, bound already as tight) changes nothing.
        """
        b = as_bound(b)
        if not self.is_sat:
            return
        distances = self.distances
        constraints = self.constraints
        new_entries = 0
        for p in (x, y):
            if p not in distances:
                distances[p] = 0
                constraints[p] = None
                new_entries += 2
        if new_entries:
            self.meter.add_entries(new_entries)
        if x == y and b >= 0:
            return  # reflexively satisfied, keep lists free of junk
        if self._is_subsumed(x, y, b):
            return
        cell = NeighborCell(y, b, constraints[x])
        meter = self.meter
        meter.alloc_cells()
        weakref.finalize(cell, meter.release_cells)
        constraints[x] = cell
        self.is_sat = self._inc_check(cell, x)

    def check(self) -> bool:
        """Report consistency. O(1): the verdict is maintained on add."""
        return self.is_sat

    def model(self, x: int) -> Rational:
        """Value of ``x`` in the stored earliest-time consistent model."""
        if not self.is_sat:
            raise NoModelError("no model: network is inconsistent")
        try:
            distance = self.distances[x]
        except KeyError:
            raise UnknownTimePointError(f"unknown time point: {x}") from None
        return -distance

    # -- internals --------------------------------------------------------

    def _is_subsumed(self, x: int, y: int, b: Rational) -> bool:
        """True iff some recorded ``x - y <= b'`` with ``b' <= b`` exists.

        Neighbor lists keep stricter bounds first, so the first cell whose
        destination matches decides.
        """
        cell = self.constraints[x]
        while cell is not None:
            if cell.dst == y:
                return cell.bound <= b
            cell = cell.next
        return False

    def _inc_check(self, new_cell: NeighborCell, x: int) -> bool:
        """Propagate the newly inserted constraint; False on negative cycle.

        Incremental Bellman-Ford: distances were a fixpoint before the
        insertion, so relaxation only needs to start from the new edge.  A
        negative cycle necessarily runs through that edge, and is detected
        when propagation tries to relax the inserted cell a second time.
        The identity test is on the cell object itself; a distinct edge
        that happens to share destination and bound is a legitimate
        improvement, not a cycle.
        """
        distances = self.distances
        y = new_cell.dst
        relaxed = distances[x] + new_cell.bound
        if relaxed >= distances[y]:
            return True
        distances[y] = relaxed
        constraints = self.constraints
        queue = deque((y,))
        pending = {y}
        while queue:
            c = queue.popleft()
            pending.discard(c)
            cell = constraints[c]
            # No cell in a previously consistent network can relax its own
            # source (that would be a negative self-loop), so this read
            # stays valid across the inner loop.
            dist_c = distances[c]
            while cell is not None:
                relaxed = dist_c + cell.bound
                dst = cell.dst
                if relaxed < distances[dst]:
                    if cell is new_cell:
                        return False
                    distances[dst] = relaxed
                    if dst not in pending:
                        pending.add(dst)
                        queue.append(dst)
                cell = cell.next
        return True

    # -- introspection and lifecycle --------------------------------------

    def time_points(self) -> KeysView[int]:
        return self.distances.keys()

    def neighbors(self, x: int) -> Iterator[tuple[int, Rational]]:
        """Yield ``(dst, bound)`` for every cell reachable from ``x``."""
        cell = self.constraints.get(x)
        while cell is not None:
            yield cell.dst, cell.bound
            cell = cell.next

    def iter_constraints(self) -> Iterator[tuple[int, int, Rational]]:
        """Yield every stored constraint as ``(x, y, bound)``."""
        for x in self.constraints:
            for y, b in self.neighbors(x):
                yield x, y, b

    def audit(self) -> list[str]:
        """Full-scan structural audit; returns human-readable violations.

        Checks, over the whole network: constraint/distance key agreement,
        non-positive distances, per-destination bound ordering inside each
        neighbor list, and (when consistent) that the distances are a
        relaxation fixpoint, i.e. the stored model satisfies every
        constraint.
        """
        problems: list[str] = []
        if self.constraints.keys() != self.distances.keys():
            problems.append("constraint and distance key sets differ")
        for x, d in self.distances.items():
            if d > 0:
                problems.append(f"distance of {x} is positive: {d}")
        for x in self.constraints:
            first_bound: dict[int, Rational] = {}
            previous: dict[int, Rational] = {}
            for y, b in self.neighbors(x):
                if y in previous and previous[y] >= b:
                    problems.append(
                        f"list {x}: bound {b} for {y} not weaker than the "
                        f"later-added {previous[y]}")
                previous[y] = b
                first_bound.setdefault(y, b)
            for y, b in first_bound.items():
                if self.is_sat and self.distances[y] > self.distances[x] + b:
                    problems.append(
                        f"fixpoint violated: d[{y}] > d[{x}] + {b}")
        return problems

    def release(self) -> None:
        """Drop this network's own storage and update entry accounting.

        Shared neighbor cells stay alive as long as any copy still reaches
        them.  The network must not be used afterwards.
        """
        n = len(self.constraints) + len(self.distances)
        if n:
            self.meter.drop_entries(n)
        self.constraints = {}
        self.distances = {}


def make_stn(meter: MemoryMeter | None = None) -> DeltaSTN:
    """Create an empty, vacuously consistent network."""
    return DeltaSTN(meter)


def copy_stn(p: DeltaSTN) -> DeltaSTN:
    return p.copy()


def stn_add(p: DeltaSTN, x: int, y: int, b: Rational) -> None:
    p.add(x, y, b)


def check_stn(p: DeltaSTN) -> bool:
    return p.check()


def get_stn_model(p: DeltaSTN, x: int) -> Rational:
    return p.model(x)
