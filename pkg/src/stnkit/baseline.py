"""Reference STN engine: full duplication on copy, from-scratch checking.

This is the classical way to give each search state its own temporal
network: every ``copy`` deep-copies the constraint store, and every
``check`` runs Bellman-Ford over the whole network with negative-cycle
detection.  It is deliberately non-incremental; besides serving as a
benchmark comparison point it is the trusted oracle the incremental engine
is validated against, so it shares no propagation code with it.
"""

from __future__ import annotations

from typing import Iterator, KeysView

from .core import NoModelError, Rational, UnknownTimePointError, as_bound
from .instrument import MemoryMeter


class BaselineSTN:
    """STN with one stored bound per ordered pair (the minimum ever added).

    Edges live in an insertion-ordered pair index plus parallel arrays so
    the relaxation loop runs over flat lists.  ``check()`` recomputes the
    verdict from scratch whenever a constraint was added since the last
    check; the verdict is cached between mutations.
    """

    __slots__ = ("_pairs", "_src", "_dst", "_weight", "_tp_index",
                 "_dist", "_verdict", "meter")

    def __init__(self, meter: MemoryMeter | None = None):
        self._pairs: dict[tuple[int, int], int] = {}
        self._src: list[int] = []
        self._dst: list[int] = []
        self._weight: list[Rational] = []
        self._tp_index: dict[int, int] = {}
        self._dist: list[Rational] = []
        self._verdict: bool | None = True
        self.meter = meter if meter is not None else MemoryMeter()

    def copy(self) -> "BaselineSTN":
        """Fully independent duplicate; nothing is shared with the parent."""
        child = BaselineSTN.__new__(BaselineSTN)
        child._pairs = dict(self._pairs)
        child._src = list(self._src)
        child._dst = list(self._dst)
        child._weight = list(self._weight)
        child._tp_index = dict(self._tp_index)
        child._dist = list(self._dist)
        child._verdict = self._verdict
        child.meter = self.meter
        child.meter.alloc_cells(len(child._weight))
        child.meter.add_entries(len(child._pairs) + len(child._tp_index))
        return child

    def add(self, x: int, y: int, b: Rational) -> None:
        """Record ``x - y <= b``, keeping the minimum bound per pair."""
        b = as_bound(b)
        new_entries = 0
        for p in (x, y):
            if p not in self._tp_index:
                self._tp_index[p] = len(self._tp_index)
                new_entries += 1
        index = self._pairs.get((x, y))
        if index is None:
            self._pairs[(x, y)] = len(self._weight)
            self._src.append(self._tp_index[x])
            self._dst.append(self._tp_index[y])
            self._weight.append(b)
            self.meter.alloc_cells()
            new_entries += 1
        elif b < self._weight[index]:
            self._weight[index] = b
        if new_entries:
            self.meter.add_entries(new_entries)
        if self._verdict is not False:
            self._verdict = None  # stale; inconsistency itself is monotone

    def check(self) -> bool:
        """Consistency by Bellman-Ford over the inverted distance graph.

        Every time point starts at distance 0, which encodes the implicit
        zero reference point without materializing it.  Runs at most
        ``|T| - 1`` relaxation rounds (with early exit at a fixpoint) and
        one detection round; any improvement in the detection round means a
        negative cycle.
        """
        if self._verdict is not None:
            return self._verdict
        n = len(self._tp_index)
        dist: list[Rational] = [0] * n
        src, dst, weight = self._src, self._dst, self._weight
        edge_range = range(len(weight))
        changed = True
        for _ in range(n - 1):
            changed = False
            for i in edge_range:
                d = dist[src[i]] + weight[i]
                if d < dist[dst[i]]:
                    dist[dst[i]] = d
                    changed = True
            if not changed:
                break
        verdict = True
        if changed:
            for i in edge_range:
                if dist[src[i]] + weight[i] < dist[dst[i]]:
                    verdict = False
                    break
        self._dist = dist
        self._verdict = verdict
        return verdict

    def model(self, x: int) -> Rational:
        """Earliest-time model value; recomputes the check if stale."""
        if self._verdict is None:
            self.check()
        if self._verdict is False:
            raise NoModelError("no model: network is inconsistent")
        index = self._tp_index.get(x)
        if index is None:
            raise UnknownTimePointError(f"unknown time point: {x}")
        return -self._dist[index]

    # -- introspection and lifecycle --------------------------------------

    @property
    def edge_count(self) -> int:
        return len(self._weight)

    def bound_for(self, x: int, y: int) -> Rational | None:
        index = self._pairs.get((x, y))
        return None if index is None else self._weight[index]

    def edges(self) -> Iterator[tuple[int, int, Rational]]:
        for (x, y), index in self._pairs.items():
            yield x, y, self._weight[index]

    def time_points(self) -> KeysView[int]:
        return self._tp_index.keys()

    def release(self) -> None:
        self.meter.release_cells(len(self._weight))
        self.meter.drop_entries(len(self._pairs) + len(self._tp_index))
        self._pairs = {}
        self._src = []
        self._dst = []
        self._weight = []
        self._tp_index = {}
        self._dist = []


def bl_make(meter: MemoryMeter | None = None) -> BaselineSTN:
    return BaselineSTN(meter)


def bl_copy(p: BaselineSTN) -> BaselineSTN:
    return p.copy()


def bl_add(p: BaselineSTN, x: int, y: int, b: Rational) -> None:
    p.add(x, y, b)


def bl_check(p: BaselineSTN) -> bool:
    return p.check()


def bl_model(p: BaselineSTN, x: int) -> Rational:
    return p.model(x)
