"""Line-based text format for replayable STN operation traces.

One operation per line, ``#`` comment lines, UTF-8, LF.  The six
operations cover the branching-search use of a temporal network::

    make NET
    copy NET SRC
    add NET X Y RAT
    check NET [-> sat|unsat]
    model NET TP [-> RAT]
    destroy NET

``NET`` and time-point names match ``[A-Za-z0-9_.-]+``.  ``RAT`` is an
integer, a decimal, or ``p/q`` with a positive ``q``; all three parse to
exact rationals (``0.1`` becomes ``1/10``, not a float).  ``check`` and
``model`` may carry an inline expected result after ``->``, which replay
harnesses validate.

Parsing validates net lifecycles: an operation may only reference a net
that was previously created by ``make``/``copy`` and not yet destroyed,
and ``make``/``copy`` may not shadow a live name.  Errors always carry the
offending line number.
"""

from __future__ import annotations

import io
import re
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import IO, Iterable, Union

FORMAT_HEADER = "# stn trace v1"

_NAME_RE = re.compile(r"[A-Za-z0-9_.\-]+\Z")
_RATIONAL_RE = re.compile(r"[+-]?[0-9]+(?:\.[0-9]+|/[0-9]+)?\Z")


class TraceError(ValueError):
    """Parse or validation failure, positioned at a 1-based line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line
        self.message = message


@dataclass(frozen=True)
class MakeOp:
    net: str


@dataclass(frozen=True)
class CopyOp:
    net: str
    src: str


@dataclass(frozen=True)
class AddOp:
    net: str
    x: str
    y: str
    bound: Fraction


@dataclass(frozen=True)
class CheckOp:
    net: str
    expected: bool | None = None


@dataclass(frozen=True)
class ModelOp:
    net: str
    x: str
    expected: Fraction | None = None


@dataclass(frozen=True)
class DestroyOp:
    net: str


TraceOp = Union[MakeOp, CopyOp, AddOp, CheckOp, ModelOp, DestroyOp]

_OP_KINDS = {MakeOp: "make", CopyOp: "copy", AddOp: "add",
             CheckOp: "check", ModelOp: "model", DestroyOp: "destroy"}


@dataclass
class Trace:
    """A validated operation sequence plus provenance metadata."""

    ops: list[TraceOp] = field(default_factory=list)
    source: str = "<memory>"

    @property
    def op_counts(self) -> dict[str, int]:
        return dict(Counter(_OP_KINDS[type(op)] for op in self.ops))

    def __len__(self) -> int:
        return len(self.ops)


class Interner:
    """Bijective name <-> dense id mapping (ids are 0, 1, 2, ...)."""

    def __init__(self) -> None:
        self._ids: dict[str, int] = {}
        self._names: list[str] = []

    def intern(self, name: str) -> int:
        ident = self._ids.get(name)
        if ident is None:
            ident = len(self._names)
            self._ids[name] = ident
            self._names.append(name)
        return ident

    def name(self, ident: int) -> str:
        return self._names[ident]

    def __contains__(self, name: str) -> bool:
        return name in self._ids

    def __len__(self) -> int:
        return len(self._names)


def parse_rational(token: str, line: int) -> Fraction:
    """Exact rational from an INT, decimal, or p/q token."""
    if not _RATIONAL_RE.match(token):
        raise TraceError(line, f"malformed rational: {token!r}")
    if "/" in token and token.split("/", 1)[1].lstrip("0") == "":
        raise TraceError(line, f"malformed rational (denominator 0): {token!r}")
    return Fraction(token)


def _name(token: str, line: int, what: str) -> str:
    if not _NAME_RE.match(token):
        raise TraceError(line, f"invalid {what} name: {token!r}")
    return token


def _iter_lines(data: Union[bytes, str, IO[bytes], IO[str]]) -> Iterable[tuple[int, str]]:
    if hasattr(data, "read"):
        data = data.read()
    if isinstance(data, str):
        raw_lines: list = data.split("\n")
    elif isinstance(data, (bytes, bytearray)):
        raw_lines = bytes(data).split(b"\n")
    else:
        raise TypeError(f"cannot parse trace from {type(data).__name__}")
    for number, raw in enumerate(raw_lines, start=1):
        if isinstance(raw, (bytes, bytearray)):
            try:
                line = raw.decode("utf-8")
            except UnicodeDecodeError:
                raise TraceError(number, "invalid UTF-8") from None
        else:
            line = raw
        yield number, line


def parse_trace(data: Union[bytes, str, IO[bytes], IO[str]],
                source: str = "<memory>") -> Trace:
    """Parse and validate a trace; raises :class:`TraceError` on any defect."""
    ops: list[TraceOp] = []
    live: set[str] = set()

    def live_net(token: str, number: int) -> str:
        name = _name(token, number, "net")
        if name not in live:
            raise TraceError(number, f"unknown or destroyed net: {name!r}")
        return name

    for number, line in _iter_lines(data):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        tokens = stripped.split()
        op = tokens[0]
        if op == "make":
            if len(tokens) != 2:
                raise TraceError(number, "make takes exactly one net name")
            net = _name(tokens[1], number, "net")
            if net in live:
                raise TraceError(number, f"net already exists: {net!r}")
            live.add(net)
            ops.append(MakeOp(net))
        elif op == "copy":
            if len(tokens) != 3:
                raise TraceError(number, "copy takes new and source net names")
            src = live_net(tokens[2], number)
            net = _name(tokens[1], number, "net")
            if net in live:
                raise TraceError(number, f"net already exists: {net!r}")
            live.add(net)
            ops.append(CopyOp(net, src))
        elif op == "add":
            if len(tokens) != 5:
                raise TraceError(number, "add takes net, two time points and a bound")
            net = live_net(tokens[1], number)
            x = _name(tokens[2], number, "time point")
            y = _name(tokens[3], number, "time point")
            ops.append(AddOp(net, x, y, parse_rational(tokens[4], number)))
        elif op == "check":
            if len(tokens) not in (2, 4) or (len(tokens) == 4 and tokens[2] != "->"):
                raise TraceError(number, "check takes a net and optionally '-> sat|unsat'")
            net = live_net(tokens[1], number)
            expected = None
            if len(tokens) == 4:
                if tokens[3] == "sat":
                    expected = True
                elif tokens[3] == "unsat":
                    expected = False
                else:
                    raise TraceError(number, f"expected sat or unsat, got {tokens[3]!r}")
            ops.append(CheckOp(net, expected))
        elif op == "model":
            if len(tokens) not in (3, 5) or (len(tokens) == 5 and tokens[3] != "->"):
                raise TraceError(number, "model takes a net, a time point and optionally '-> RAT'")
            net = live_net(tokens[1], number)
            x = _name(tokens[2], number, "time point")
            expected = parse_rational(tokens[4], number) if len(tokens) == 5 else None
            ops.append(ModelOp(net, x, expected))
        elif op == "destroy":
            if len(tokens) != 2:
                raise TraceError(number, "destroy takes exactly one net name")
            net = live_net(tokens[1], number)
            live.remove(net)
            ops.append(DestroyOp(net))
        else:
            raise TraceError(number, f"unknown operation: {op!r}")
    return Trace(ops, source)


def format_op(op: TraceOp) -> str:
    if isinstance(op, MakeOp):
        return f"make {op.net}"
    if isinstance(op, CopyOp):
        return f"copy {op.net} {op.src}"
    if isinstance(op, AddOp):
        return f"add {op.net} {op.x} {op.y} {op.bound}"
    if isinstance(op, CheckOp):
        if op.expected is None:
            return f"check {op.net}"
        return f"check {op.net} -> {'sat' if op.expected else 'unsat'}"
    if isinstance(op, ModelOp):
        if op.expected is None:
            return f"model {op.net} {op.x}"
        return f"model {op.net} {op.x} -> {op.expected}"
    if isinstance(op, DestroyOp):
        return f"destroy {op.net}"
    raise TypeError(f"not a trace op: {op!r}")


def format_trace(trace: Trace) -> str:
    lines = [FORMAT_HEADER]
    lines.extend(format_op(op) for op in trace.ops)
    return "\n".join(lines) + "\n"


def write_trace(trace: Trace, output: Union[IO[bytes], IO[str]]) -> None:
    """Serialize canonically; ``parse_trace`` of the output restores ``ops``."""
    text = format_trace(trace)
    if isinstance(output, io.TextIOBase) or hasattr(output, "encoding"):
        output.write(text)
    else:
        output.write(text.encode("utf-8"))
