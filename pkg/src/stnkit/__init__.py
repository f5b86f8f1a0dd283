"""stnkit: simple temporal network engines and a trace benchmark harness.

Two engines share one five-operation interface (make, copy, add, check,
model): :class:`DeltaSTN`, incremental with structurally shared constraint
storage, and :class:`BaselineSTN`, a full-copy Bellman-Ford reference that
doubles as the correctness oracle.  The :mod:`stnkit.trace` format records
engine operations as replayable text; :mod:`stnkit.workload` generates
search-shaped and adversarial traces; :mod:`stnkit.bench` replays,
cross-verifies and aggregates benchmark results.
"""

from .baseline import BaselineSTN, bl_add, bl_check, bl_copy, bl_make, bl_model
from .bench import (RunResult, VerifyReport, bench, cactus_series, read_csv,
                    replay, report_cactus, verify, write_csv)
from .core import (DeltaSTN, NeighborCell, NoModelError, STNError,
                   UnknownTimePointError, as_bound, check_stn, copy_stn,
                   get_stn_model, make_stn, stn_add)
from .instrument import MemoryMeter
from .trace import (AddOp, CheckOp, CopyOp, DestroyOp, Interner, MakeOp,
                    ModelOp, Trace, TraceError, TraceOp, format_trace,
                    parse_trace, write_trace)
from .workload import (SplitMix64, WorkloadSpec, generate,
                       generate_adversarial, subsumption_ground_truth)

__version__ = "0.1.0"

__all__ = [
    "BaselineSTN", "DeltaSTN", "MemoryMeter", "NeighborCell",
    "NoModelError", "STNError", "UnknownTimePointError",
    "as_bound", "make_stn", "copy_stn", "stn_add", "check_stn",
    "get_stn_model", "bl_make", "bl_copy", "bl_add", "bl_check", "bl_model",
    "Trace", "TraceOp", "TraceError", "Interner",
    "MakeOp", "CopyOp", "AddOp", "CheckOp", "ModelOp", "DestroyOp",
    "parse_trace", "write_trace", "format_trace",
    "WorkloadSpec", "SplitMix64", "generate", "generate_adversarial",
    "subsumption_ground_truth",
    "RunResult", "VerifyReport", "replay", "verify", "bench",
    "write_csv", "read_csv", "cactus_series", "report_cactus",
    "__version__",
]
