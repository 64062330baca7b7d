"""Backend-independent bitmap contract.

A bitmap is a finite sequence of bits indexed from 0; index 0 is the first
(oldest) trace event.  All backends implement the same small operation set so
that the formula evaluator never needs to know how bits are stored.

Value discipline: bitwise operations (``and_``, ``or_``, ``not_``) and
``remove_first_bit`` always return a fresh bitmap and never touch their
operands.  The append operations (``add_many``, ``append_slice``) are builder
steps: they return the updated bitmap and are allowed to update the receiver
in place, so the caller must rebind the result and drop the old reference.
Bitmaps that are only read may be shared freely (including across threads);
there is no internal locking.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from typing import Iterator, Optional


class LengthMismatchError(ValueError):
    """Raised when a pairwise operation receives bitmaps of unequal length."""


class BitCursor(ABC):
    """Forward-only position finder bound to one bitmap snapshot.

    A cursor remembers where the previous search ended inside the backend's
    internal representation, so a monotone sequence of ``next_from`` calls
    costs O(internal structure) overall instead of rescanning from the start
    each time.  Cursors are single-threaded and must not outlive mutation of
    the underlying bitmap.
    """

    #: last position returned by ``next_from`` (or None before the first hit)
    absolute: Optional[int] = None

    @abstractmethod
    def next_from(self, start: int) -> Optional[int]:
        """Smallest position >= start holding the cursor's bit value, or None.

        ``start`` must be non-decreasing across calls on the same cursor.
        """


class Bitmap(ABC):
    """Abstract bitmap; see the module docstring for the value discipline."""

    backend_name: str = "abstract"

    # -- read operations ---------------------------------------------------

    @abstractmethod
    def __len__(self) -> int:
        """Number of logical bits."""

    @abstractmethod
    def get(self, index: int) -> int:
        """Bit at ``index``; raises IndexError outside [0, len)."""

    @abstractmethod
    def next_bit(self, value: int, start: int) -> Optional[int]:
        """Smallest i >= start with bit i == value, or None; 0 <= start <= len."""

    @abstractmethod
    def last_bit(self, value: int) -> Optional[int]:
        """Largest i with bit i == value, or None if the value never occurs."""

    @abstractmethod
    def cursor(self, value: int) -> BitCursor:
        """Fresh forward cursor locating occurrences of ``value``."""

    @abstractmethod
    def payload_bytes(self) -> int:
        """Bytes of in-memory payload (words / containers), excluding the
        fixed per-object overhead."""

    @abstractmethod
    def to_int(self) -> int:
        """Logical content as one little-endian integer (bit i = position i)."""

    # -- bitwise operations (pure) -----------------------------------------

    @abstractmethod
    def and_(self, other: "Bitmap") -> "Bitmap":
        """Pairwise conjunction; operands must have equal length."""

    @abstractmethod
    def or_(self, other: "Bitmap") -> "Bitmap":
        """Pairwise disjunction; operands must have equal length."""

    @abstractmethod
    def not_(self) -> "Bitmap":
        """Pointwise negation."""

    @abstractmethod
    def remove_first_bit(self) -> "Bitmap":
        """Copy without bit 0 (length shrinks by one); length must be >= 1."""

    # -- builder operations (may update in place; rebind the result) --------

    @abstractmethod
    def add_many(self, value: int, count: int) -> "Bitmap":
        """Append ``count`` copies of ``value``; count == 0 is a no-op."""

    @abstractmethod
    def append_slice(self, src: "Bitmap", start: int, count: int) -> "Bitmap":
        """Append bits ``start .. start+count-1`` of ``src``.

        Requires 0 <= start and start + count <= len(src).
        """

    @abstractmethod
    def empty_like(self) -> "Bitmap":
        """New empty bitmap of the same backend."""

    # -- shared helpers ------------------------------------------------------

    def to01(self) -> str:
        """Debug rendering, index 0 leftmost (e.g. ``"0110"``)."""
        return "".join(str(self.get(i)) for i in range(len(self)))

    def iter_bits(self) -> Iterator[int]:
        for i in range(len(self)):
            yield self.get(i)

    def __eq__(self, other: object) -> bool:
        # Semantic equality: same length, same bit everywhere, any backend.
        if not isinstance(other, Bitmap):
            return NotImplemented
        if len(self) != len(other):
            return False
        return self.to_int() == other.to_int()

    def __hash__(self):
        raise TypeError("bitmaps are not hashable")

    def __repr__(self):
        n = len(self)
        body = self.to01() if n <= 64 else self.to01()[:61] + "..."
        return f"<{type(self).__name__} len={n} bits={body!r}>"

    def _require_same_length(self, other: "Bitmap") -> None:
        if len(self) != len(other):
            raise LengthMismatchError(
                f"bitmap length mismatch: {len(self)} vs {len(other)}"
            )

    def _check_index(self, index: int) -> None:
        if not 0 <= index < len(self):
            raise IndexError(f"bit index {index} out of range [0, {len(self)})")

    def _check_start(self, start: int) -> None:
        if not 0 <= start <= len(self):
            raise IndexError(f"start {start} out of range [0, {len(self)}]")

    def _check_slice(self, start: int, count: int) -> None:
        if count < 0:
            raise ValueError(f"negative slice length {count}")
        if start < 0 or start + count > len(self):
            raise IndexError(
                f"slice [{start}, {start + count}) out of range [0, {len(self)})"
            )


def append_runs(dst: Bitmap, src: Bitmap, start: int, count: int) -> None:
    """Append src[start : start+count] to dst by walking runs of src.

    Uses one forward cursor per bit value, so the cost is proportional to the
    number of runs in the copied range rather than its bit length.
    """
    if count == 0:
        return
    end = start + count
    ones = src.cursor(1)
    zeros = src.cursor(0)
    pos = start
    while pos < end:
        one = ones.next_from(pos)
        if one is None or one >= end:
            dst.add_many(0, end - pos)
            break
        if one > pos:
            dst.add_many(0, one - pos)
        zero = zeros.next_from(one)
        run_end = end if zero is None or zero > end else zero
        dst.add_many(1, run_end - one)
        pos = run_end
