"""Trace ingestion, random generation, ground bitmaps, and slicing.

A trace is a finite sequence of events over a fixed set of Boolean state
variables; events are stored as the rows of a packed 0/1 matrix.  Two file
formats are supported:

* ``csv``: a header row of variable names, then one row of 0/1 cells per
  event.  One column may be designated as a slice-key column, in which case
  its cells may hold arbitrary strings.
* ``bitlines``: a first line of space-separated variable names, then one
  line per event of contiguous 0/1 characters.

The random generator draws one tuple per block from a seeded PCG64 stream
and emits it ``repeat`` times, which bounds every run in the ground bitmaps
below by the repeat factor.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .bitmaps import Bitmap, RawBitmap, RleBitmap, RoaringBitmap
from .evaluator import GroundEnv

#: identifier of the PRNG behind generate_random_trace, recorded in bench output
GENERATOR_ALGORITHM = "pcg64"

#: reserved slice identifier for events whose key cell is empty
UNKEYED = "unkeyed"

RowMapper = Callable[[Tuple[int, ...]], Sequence[int]]


class TraceFormatError(ValueError):
    """Malformed trace input; ``line`` is 1-based."""

    def __init__(self, message: str, line: int):
        super().__init__(f"{message} (line {line})")
        self.line = line


@dataclass
class Trace:
    variables: List[str]
    matrix: np.ndarray  # shape (length, len(variables)), dtype uint8, values 0/1
    keys: Optional[List[str]] = None
    key_name: Optional[str] = None

    def __post_init__(self):
        self.matrix = np.ascontiguousarray(self.matrix, dtype=np.uint8)
        if self.matrix.ndim != 2 or self.matrix.shape[1] != len(self.variables):
            raise ValueError("event matrix shape disagrees with the variables")
        if len(set(self.variables)) != len(self.variables):
            raise ValueError("duplicate variable names")
        if self.keys is not None and len(self.keys) != len(self.matrix):
            raise ValueError("one key per event required")

    @classmethod
    def from_events(cls, variables: Sequence[str],
                    events: Sequence[Sequence[int]]) -> "Trace":
        matrix = np.array(events, dtype=np.uint8).reshape(
            len(events), len(variables)
        )
        return cls(list(variables), matrix)

    def __len__(self) -> int:
        return int(self.matrix.shape[0])

    def event(self, i: int) -> Tuple[int, ...]:
        return tuple(int(x) for x in self.matrix[i])

    def events(self) -> List[Tuple[int, ...]]:
        return [self.event(i) for i in range(len(self))]

    def column(self, name: str) -> List[int]:
        j = self.variables.index(name)
        return [int(x) for x in self.matrix[:, j]]

    def columns(self) -> Dict[str, List[int]]:
        return {name: self.column(name) for name in self.variables}


# -- loading / writing -------------------------------------------------------------


def load_trace(source: Union[str, Path, io.TextIOBase], format: str = "csv",
               key_column: Optional[str] = None) -> Trace:
    """Parse a trace file; see the module docstring for the two formats."""
    if format not in ("csv", "bitlines"):
        raise ValueError(f"unknown trace format {format!r}")
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8", newline="") as handle:
            lines = handle.read().splitlines()
    else:
        lines = source.read().splitlines()
    if not lines:
        raise TraceFormatError("missing header line", 1)
    if format == "csv":
        return _parse_csv(lines, key_column)
    return _parse_bitlines(lines)


def _parse_csv(lines: List[str], key_column: Optional[str]) -> Trace:
    header = lines[0].split(",")
    if any(not name for name in header):
        raise TraceFormatError("empty variable name in header", 1)
    if len(set(header)) != len(header):
        raise TraceFormatError("duplicate variable names in header", 1)
    key_index = None
    if key_column is not None:
        if key_column not in header:
            raise TraceFormatError(f"key column {key_column!r} not in header", 1)
        key_index = header.index(key_column)
    variables = [name for i, name in enumerate(header) if i != key_index]
    if not variables:
        raise TraceFormatError("no state variables in header", 1)
    rows = []
    keys: List[str] = []
    for lineno, line in enumerate(lines[1:], start=2):
        cells = line.split(",")
        if len(cells) != len(header):
            raise TraceFormatError(
                f"expected {len(header)} cells, found {len(cells)}", lineno
            )
        row = []
        for i, cell in enumerate(cells):
            if i == key_index:
                keys.append(cell)
                continue
            if cell not in ("0", "1"):
                raise TraceFormatError(
                    f"non-binary cell {cell!r} in column {header[i]!r}", lineno
                )
            row.append(int(cell))
        rows.append(row)
    matrix = np.array(rows, dtype=np.uint8).reshape(len(rows), len(variables))
    return Trace(variables, matrix,
                 keys=keys if key_index is not None else None,
                 key_name=key_column if key_index is not None else None)


def _parse_bitlines(lines: List[str]) -> Trace:
    variables = lines[0].split()
    if not variables:
        raise TraceFormatError("no variable names on the first line", 1)
    if len(set(variables)) != len(variables):
        raise TraceFormatError("duplicate variable names", 1)
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        if len(line) != len(variables):
            raise TraceFormatError(
                f"expected {len(variables)} bits, found {len(line)}", lineno
            )
        bad = set(line) - {"0", "1"}
        if bad:
            raise TraceFormatError(f"non-binary character {bad.pop()!r}", lineno)
        rows.append([int(c) for c in line])
    matrix = np.array(rows, dtype=np.uint8).reshape(len(rows), len(variables))
    return Trace(variables, matrix)


def write_trace(trace: Trace, dest: Union[str, Path, io.TextIOBase],
                format: str = "csv") -> None:
    """Write the canonical form of a trace (LF line endings, one per row)."""
    if format not in ("csv", "bitlines"):
        raise ValueError(f"unknown trace format {format!r}")
    out = io.StringIO()
    if format == "csv":
        header = list(trace.variables)
        if trace.keys is not None:
            header.insert(0, trace.key_name or "key")
        out.write(",".join(header) + "\n")
        for i in range(len(trace)):
            cells = [str(int(x)) for x in trace.matrix[i]]
            if trace.keys is not None:
                cells.insert(0, trace.keys[i])
            out.write(",".join(cells) + "\n")
    else:
        out.write(" ".join(trace.variables) + "\n")
        for i in range(len(trace)):
            out.write("".join(str(int(x)) for x in trace.matrix[i]) + "\n")
    text = out.getvalue()
    if isinstance(dest, (str, Path)):
        with open(dest, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
    else:
        dest.write(text)


# -- random generation ---------------------------------------------------------------


@dataclass(frozen=True)
class TraceGenSpec:
    """Deterministic recipe for a generated trace."""

    length: int
    num_vars: int = 10
    repeat: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.length < 0:
            raise ValueError("negative trace length")
        if self.num_vars < 1:
            raise ValueError("at least one variable required")
        if self.repeat < 1:
            raise ValueError("repeat factor must be >= 1")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must fit in 64 bits")


def generate_random_trace(spec: TraceGenSpec) -> Trace:
    """Seeded random trace; each drawn tuple is emitted ``repeat`` times."""
    variables = [f"s{j}" for j in range(spec.num_vars)]
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    blocks = -(-spec.length // spec.repeat) if spec.length else 0
    drawn = rng.integers(0, 2, size=(blocks, spec.num_vars), dtype=np.uint8)
    matrix = np.repeat(drawn, spec.repeat, axis=0)[: spec.length]
    return Trace(variables, matrix)


# -- ground bitmaps --------------------------------------------------------------------


def build_ground_bitmaps(trace: Trace, backend: str = "raw",
                         row_mapper: Optional[RowMapper] = None,
                         variables: Optional[Sequence[str]] = None
                         ) -> GroundEnv:
    """One bitmap per variable, bit i = value at event i.

    The packed columns are produced in a single pass over the trace for all
    variables at once and then handed to the chosen backend.  ``row_mapper``
    is a pre-processing hook: it receives each event tuple and returns the
    bits to record (paired with ``variables`` naming them), which is the
    place to evaluate richer per-event predicates before the Boolean core.
    """
    n = len(trace)
    if row_mapper is None:
        names = list(trace.variables)
        packed = np.packbits(trace.matrix.T, axis=1, bitorder="little")
        columns = [packed[j].tobytes() for j in range(len(names))]
    else:
        names = list(variables) if variables is not None else list(trace.variables)
        buffers = [bytearray((n + 7) // 8) for _ in names]
        for i in range(n):
            bits = row_mapper(trace.event(i))
            if len(bits) != len(names):
                raise ValueError(
                    f"row mapper returned {len(bits)} bits for {len(names)} "
                    "variables"
                )
            for j, bit in enumerate(bits):
                if bit:
                    buffers[j][i >> 3] |= 1 << (i & 7)
        columns = [bytes(buf) for buf in buffers]
    bindings = {
        name: _bitmap_from_packed(column, n, backend)
        for name, column in zip(names, columns)
    }
    return GroundEnv(bindings, n)


def _bitmap_from_packed(payload: bytes, length: int, backend: str) -> Bitmap:
    if backend == "raw":
        return RawBitmap.from_packed_bytes(payload, length)
    if backend == "rle64":
        padded = payload + b"\0" * (-len(payload) % 8)
        words = np.frombuffer(padded, dtype="<u8") if padded else []
        return RleBitmap.from_words((int(w) for w in words), length)
    if backend == "roaring":
        value = int.from_bytes(payload, "little") & ((1 << length) - 1)
        return RoaringBitmap.from_int(value, length)
    raise ValueError(f"unknown backend {backend!r}")


# -- slicing ------------------------------------------------------------------------


def slice_trace(trace: Trace, key: str) -> Dict[Union[str, int], Trace]:
    """Partition the events by slice identifier, preserving order.

    The identifier comes from the trace's key column when one was loaded
    under that name; otherwise from the group of variables whose names start
    with ``key``, read as a little-endian binary number per event.  Events
    with an empty key cell land in the reserved ``unkeyed`` slice.
    """
    if trace.keys is not None and (trace.key_name == key or not key):
        labels: List[Union[str, int]] = [
            cell if cell != "" else UNKEYED for cell in trace.keys
        ]
        keep = list(range(len(trace.variables)))
    else:
        key_vars = [j for j, name in enumerate(trace.variables)
                    if name.startswith(key)]
        if not key_vars:
            raise KeyError(f"no key column or key variables match {key!r}")
        weights = [1 << k for k in range(len(key_vars))]
        labels = [
            int(sum(w for w, j in zip(weights, key_vars) if trace.matrix[i, j]))
            for i in range(len(trace))
        ]
        keep = [j for j in range(len(trace.variables)) if j not in key_vars]
        if not keep:
            raise ValueError("slicing would drop every state variable")
    order: Dict[Union[str, int], List[int]] = {}
    for i, label in enumerate(labels):
        order.setdefault(label, []).append(i)
    variables = [trace.variables[j] for j in keep]
    out: Dict[Union[str, int], Trace] = {}
    for label, rows in order.items():
        sub = trace.matrix[np.array(rows, dtype=np.intp)][:, np.array(keep, dtype=np.intp)]
        out[label] = Trace(variables, sub)
    return out
