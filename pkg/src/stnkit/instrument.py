"""Logical memory accounting for STN engines.

Engines report structural allocations to a :class:`MemoryMeter`:

* ``cells`` -- constraint storage units.  For the incremental engine this is
  the number of live neighbor-list cells; for the baseline engine it is the
  number of stored edges.  Shared cells are counted once, when allocated,
  and released when the last owner lets go of them.
* ``entries`` -- associative-container entries owned by live networks
  (constraint and distance map slots).

Counts are deterministic because they track logical ownership, not OS
allocator behavior, which makes them usable as an exact benchmark metric.
"""

from __future__ import annotations

import threading


class MemoryMeter:
    """Thread-safe counters shared by all networks of one run."""

    __slots__ = ("_lock", "cells_allocated", "cells_live", "cells_peak",
                 "entries_live", "entries_peak")

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self.cells_allocated = 0
        self.cells_live = 0
        self.cells_peak = 0
        self.entries_live = 0
        self.entries_peak = 0

    def alloc_cells(self, n: int = 1) -> None:
        with self._lock:
            self.cells_allocated += n
            self.cells_live += n
            if self.cells_live > self.cells_peak:
                self.cells_peak = self.cells_live

    def release_cells(self, n: int = 1) -> None:
        with self._lock:
            self.cells_live -= n

    def add_entries(self, n: int) -> None:
        with self._lock:
            self.entries_live += n
            if self.entries_live > self.entries_peak:
                self.entries_peak = self.entries_live

    def drop_entries(self, n: int) -> None:
        with self._lock:
            self.entries_live -= n

    def snapshot(self) -> dict:
        with self._lock:
            return {
                "cells_allocated": self.cells_allocated,
                "cells_live": self.cells_live,
                "cells_peak": self.cells_peak,
                "entries_live": self.entries_live,
                "entries_peak": self.entries_peak,
            }

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        s = self.snapshot()
        return ("MemoryMeter(cells={cells_live}/{cells_allocated} "
                "peak={cells_peak}, entries={entries_live} "
                "peak={entries_peak})".format(**s))
