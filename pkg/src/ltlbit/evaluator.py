"""Recursive bitmap evaluation of LTL formulas.

Every subformula maps to a bitmap whose bit i states whether the trace
suffix starting at event i satisfies that subformula.  Atoms resolve to the
ground bitmaps of the environment; propositional connectives reduce to
bitwise operations; the temporal operators rewrite whole run structures:

* next drops the first bit and pads the end with a 0 (the last event has no
  successor);
* globally finds the last 0 and emits zeros up to it, ones after it;
* eventually is the dual, swapping the roles of 0 and 1;
* until walks both operands run by run, emitting whole runs of the answer
  and skipping homogeneous stretches via forward cursors.

The evaluation is a post-order traversal; at any moment the live bitmaps are
the operands and results on the recursion path, and their total payload is
tracked to report the peak working-set size in bytes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Optional

from .bitmaps import Bitmap, make_empty
from .formulas import (And, Atom, Finally, Formula, Globally, Implies, Next,
                       Not, Or, Until)
from .oracle import UnboundAtomError, empty_trace_verdict


@dataclass
class GroundEnv:
    """Ground bitmaps for the atomic propositions of one trace."""

    bindings: Dict[str, Bitmap]
    trace_len: int

    def __post_init__(self):
        for name, bitmap in self.bindings.items():
            if len(bitmap) != self.trace_len:
                raise ValueError(
                    f"ground bitmap for {name!r} has length {len(bitmap)}, "
                    f"expected {self.trace_len}"
                )

    @property
    def backend(self) -> str:
        for bitmap in self.bindings.values():
            return bitmap.backend_name
        return "raw"


@dataclass
class EvalResult:
    bitmap: Bitmap
    verdict: bool
    peak_bitmap_bytes: int


class _PayloadMeter:
    """Running sum / maximum of live bitmap payload bytes."""

    __slots__ = ("current", "peak")

    def __init__(self):
        self.current = 0
        self.peak = 0

    def acquire(self, nbytes: int) -> None:
        self.current += nbytes
        if self.current > self.peak:
            self.peak = self.current

    def release(self, nbytes: int) -> None:
        self.current -= nbytes


# -- operator implementations ---------------------------------------------------


def op_not(a: Bitmap) -> Bitmap:
    return a.not_()


def op_and(a: Bitmap, b: Bitmap) -> Bitmap:
    return a.and_(b)


def op_or(a: Bitmap, b: Bitmap) -> Bitmap:
    return a.or_(b)


def op_implies(a: Bitmap, b: Bitmap) -> Bitmap:
    return a.not_().or_(b)


def op_next(a: Bitmap) -> Bitmap:
    if len(a) == 0:
        return a
    out = a.remove_first_bit()
    return out.add_many(0, 1)


def op_globally(a: Bitmap) -> Bitmap:
    last_zero = a.last_bit(0)
    if last_zero is None:
        return a
    out = a.empty_like()
    out = out.add_many(0, last_zero + 1)
    return out.add_many(1, len(a) - last_zero - 1)


def op_finally(a: Bitmap) -> Bitmap:
    last_one = a.last_bit(1)
    if last_one is None:
        return a
    out = a.empty_like()
    out = out.add_many(1, last_one + 1)
    return out.add_many(0, len(a) - last_one - 1)


def until_scan(a: Bitmap, b: Bitmap) -> Bitmap:
    """Strong until by run-skipping scan over both operands.

    Four forward cursors track the next 0 and the next 1 of each operand.
    Each loop turn classifies the current position and appends a whole run
    of the answer:

    * both operands 0 until the nearest 1: that stretch of the answer is 0;
    * the right operand is 1: the answer is 1 through its current 1-run;
    * the left operand is 1 but the right is 0: the answer follows whether
      the left 1-run reaches the next 1 of the right operand (1s through
      that position) or stops short at a 0 (0s through that 0).

    When one operand runs out of 1s the remainder is resolved wholesale:
    no witness left means zeros; no left-support means the answer is just
    the remainder of the right operand.
    """
    if len(a) != len(b):
        # surface the standard error message of pairwise operations
        a._require_same_length(b)
    n = len(a)
    out = a.empty_like()
    if n == 0:
        return out
    next_a1 = a.cursor(1)
    next_a0 = a.cursor(0)
    next_b1 = b.cursor(1)
    next_b0 = b.cursor(0)
    pos = 0
    a0 = a1 = b0 = b1 = 0
    exhausted = None  # which operand ran out of 1s
    while pos < n:
        if a1 is not None and a1 <= pos:
            a1 = next_a1.next_from(pos)
        if b1 is not None and b1 <= pos:
            b1 = next_b1.next_from(pos)
        if a1 is None or b1 is None:
            exhausted = "b" if b1 is None else "a"
            break
        nearest = a1 if a1 < b1 else b1
        if nearest > pos:
            # both operands are 0 on [pos, nearest)
            out = out.add_many(0, nearest - pos)
            pos = nearest
            continue
        if pos == b1:
            # inside a 1-run of b: witnesses are immediate
            if b0 <= b1:
                b0 = next_b0.next_from(b1)
                if b0 is None:
                    b0 = n
            out = out.add_many(1, b0 - pos)
            pos = b0
            continue
        # a is 1 here, b is 0; see how far a's 1-run carries
        if a0 <= a1:
            a0 = next_a0.next_from(a1)
            if a0 is None:
                a0 = n
        if a0 >= b1:
            # the run reaches b's next 1: satisfied through that position
            out = out.add_many(1, b1 - pos + 1)
            pos = b1 + 1
        else:
            # the run breaks first: everything up to the break fails
            out = out.add_many(0, a0 - pos + 1)
            pos = a0 + 1
    if exhausted == "b":
        out = out.add_many(0, n - len(out))
    elif exhausted == "a":
        out = out.append_slice(b, pos, n - pos)
    return out


def op_until(a: Bitmap, b: Bitmap) -> Bitmap:
    fused = getattr(a, "until_with", None)
    if fused is not None and type(a) is type(b):
        return fused(b)
    return until_scan(a, b)


# -- evaluation --------------------------------------------------------------------


def evaluate(formula: Formula, env: GroundEnv) -> EvalResult:
    """Bitmap of per-suffix satisfaction plus whole-trace verdict.

    The verdict is satisfaction at position 0; a zero-length trace falls
    back to the structural empty-trace rules.
    """
    meter = _PayloadMeter()
    bitmap = _eval(formula, env, meter)
    if env.trace_len > 0:
        verdict = bitmap.get(0) == 1
    else:
        verdict = empty_trace_verdict(formula)
    return EvalResult(bitmap, verdict, meter.peak)


def verdict(formula: Formula, env: GroundEnv) -> bool:
    if env.trace_len == 0:
        return empty_trace_verdict(formula)
    return evaluate(formula, env).verdict


def _eval(node: Formula, env: GroundEnv, meter: _PayloadMeter) -> Bitmap:
    if isinstance(node, Atom):
        try:
            ground = env.bindings[node.name]
        except KeyError:
            raise UnboundAtomError(node.name) from None
        meter.acquire(ground.payload_bytes())
        return ground
    if isinstance(node, (Not, Next, Globally, Finally)):
        child = _eval(node.child, env, meter)
        if isinstance(node, Not):
            result = op_not(child)
        elif isinstance(node, Next):
            result = op_next(child)
        elif isinstance(node, Globally):
            result = op_globally(child)
        else:
            result = op_finally(child)
        meter.acquire(result.payload_bytes())
        meter.release(child.payload_bytes())
        return result
    left = _eval(node.left, env, meter)
    right = _eval(node.right, env, meter)
    if isinstance(node, And):
        result = op_and(left, right)
    elif isinstance(node, Or):
        result = op_or(left, right)
    elif isinstance(node, Implies):
        result = op_implies(left, right)
    elif isinstance(node, Until):
        result = op_until(left, right)
    else:
        raise TypeError(f"not a formula node: {node!r}")
    meter.acquire(result.payload_bytes())
    meter.release(left.payload_bytes())
    meter.release(right.payload_bytes())
    return result


def ground_env_from_columns(columns: Dict[str, list], length: int,
                            backend: str = "raw") -> GroundEnv:
    """Build a ground environment from per-variable bit columns."""
    bindings: Dict[str, Bitmap] = {}
    for name, column in columns.items():
        bitmap = make_empty(backend)
        for bit in column:
            bitmap = bitmap.add_many(1 if bit else 0, 1)
        bindings[name] = bitmap
    return GroundEnv(bindings, length)
