"""Uncompressed packed-word bitmap backend.

Bits are packed LSB-first into 64-bit machine words.  The word array is held
as one arbitrary-precision integer so that whole-bitmap operations (AND, OR,
NOT, shift) run word-parallel inside the interpreter's C bignum kernels; the
``words()`` view exposes the equivalent 64-bit word array.  Padding bits at
indices >= length are kept at zero after every operation, so payload-level
equality implies semantic equality.
"""

from __future__ import annotations

import struct
from typing import Iterator, Optional

from .base import BitCursor, Bitmap

WORD_BITS = 64

# byte -> bit-reversed byte, used to reverse a whole bitmap at C speed
_REVBYTE = bytes(int(format(k, "08b")[::-1], 2) for k in range(256))


def _reverse_bits(value: int, nbits: int) -> int:
    """Mirror the low ``nbits`` of ``value`` (bit i <-> bit nbits-1-i)."""
    if nbits == 0:
        return 0
    nbytes = (nbits + 7) // 8
    raw = value.to_bytes(nbytes, "little")
    flipped = raw.translate(_REVBYTE)[::-1]
    return int.from_bytes(flipped, "little") >> (nbytes * 8 - nbits)


class RawCursor(BitCursor):
    # The integer store has no run structure to resume into, so the cursor
    # only memoises the last hit; each search is a masked find-lowest-set.
    def __init__(self, bitmap: "RawBitmap", value: int):
        self._bitmap = bitmap
        self._value = value
        self.absolute = None

    def next_from(self, start: int) -> Optional[int]:
        pos = self._bitmap.next_bit(self._value, start)
        if pos is not None:
            self.absolute = pos
        return pos


class RawBitmap(Bitmap):
    backend_name = "raw"

    __slots__ = ("_bits", "_len")

    def __init__(self, bits: int = 0, length: int = 0):
        if length < 0:
            raise ValueError("negative bitmap length")
        if bits >> length:
            raise ValueError("payload has bits beyond the stated length")
        self._bits = bits
        self._len = length

    # -- construction helpers ------------------------------------------------

    @classmethod
    def from_bits(cls, bits) -> "RawBitmap":
        value = 0
        n = 0
        for b in bits:
            if b:
                value |= 1 << n
            n += 1
        return cls(value, n)

    @classmethod
    def from_packed_bytes(cls, payload: bytes, length: int) -> "RawBitmap":
        """Adopt LSB-first packed bytes (e.g. a packbits column) as a bitmap."""
        value = int.from_bytes(payload, "little") & ((1 << length) - 1)
        return cls(value, length)

    # -- read ------------------------------------------------------------------

    def __len__(self) -> int:
        return self._len

    def get(self, index: int) -> int:
        self._check_index(index)
        return (self._bits >> index) & 1

    def next_bit(self, value: int, start: int) -> Optional[int]:
        self._check_start(start)
        if start == self._len:
            return None
        if value:
            probe = self._bits >> start
        else:
            probe = (self._bits ^ self._mask()) >> start
        if probe == 0:
            return None
        return start + ((probe & -probe).bit_length() - 1)

    def last_bit(self, value: int) -> Optional[int]:
        probe = self._bits if value else self._bits ^ self._mask()
        if probe == 0:
            return None
        return probe.bit_length() - 1

    def cursor(self, value: int) -> RawCursor:
        return RawCursor(self, value)

    def payload_bytes(self) -> int:
        return self.word_count() * 8

    def word_count(self) -> int:
        return (self._len + WORD_BITS - 1) // WORD_BITS

    def words(self) -> Iterator[int]:
        """The packed 64-bit word array (LSB-first bits within each word)."""
        nwords = self.word_count()
        raw = self._bits.to_bytes(nwords * 8, "little")
        for (word,) in struct.iter_unpack("<Q", raw):
            yield word

    def to_int(self) -> int:
        return self._bits

    # -- bitwise -----------------------------------------------------------------

    def and_(self, other: Bitmap) -> "RawBitmap":
        self._require_same_length(other)
        return RawBitmap(self._bits & _coerce(other), self._len)

    def or_(self, other: Bitmap) -> "RawBitmap":
        self._require_same_length(other)
        return RawBitmap(self._bits | _coerce(other), self._len)

    def not_(self) -> "RawBitmap":
        return RawBitmap(self._bits ^ self._mask(), self._len)

    def remove_first_bit(self) -> "RawBitmap":
        if self._len == 0:
            raise IndexError("cannot remove the first bit of an empty bitmap")
        return RawBitmap(self._bits >> 1, self._len - 1)

    # -- builders ----------------------------------------------------------------

    def add_many(self, value: int, count: int) -> "RawBitmap":
        if count < 0:
            raise ValueError(f"negative run length {count}")
        if count == 0:
            return self
        bits = self._bits
        if value:
            bits |= ((1 << count) - 1) << self._len
        return RawBitmap(bits, self._len + count)

    def append_slice(self, src: Bitmap, start: int, count: int) -> "RawBitmap":
        src._check_slice(start, count)
        if count == 0:
            return self
        if isinstance(src, RawBitmap):
            chunk = (src._bits >> start) & ((1 << count) - 1)
            return RawBitmap(self._bits | (chunk << self._len), self._len + count)
        out: Bitmap = self
        for i in range(start, start + count):
            out = out.add_many(src.get(i), 1)
        return out  # type: ignore[return-value]

    def empty_like(self) -> "RawBitmap":
        return RawBitmap()

    # -- fused kernel -----------------------------------------------------------

    def until_with(self, other: "RawBitmap") -> "RawBitmap":
        """Strong-until result computed word-parallel.

        Mirrored so that bit 0 is the final event, the per-position rule
        ``r[i] = b[i] or (a[i] and r[i+1])`` becomes a carry propagation:
        with generate = b and propagate = a | b, the carries of the addition
        ``b + (a | b)`` smear each set bit of b across the run of set bits of
        a below it.  One addition therefore replaces the run-by-run scan.
        """
        self._require_same_length(other)
        n = self._len
        if n == 0:
            return RawBitmap()
        a = _reverse_bits(self._bits, n)
        b = _reverse_bits(other._bits, n)
        both = a | b
        carries = (b + both) ^ b ^ both
        mirrored = (b | (a & carries)) & ((1 << n) - 1)
        return RawBitmap(_reverse_bits(mirrored, n), n)

    # -- internal ---------------------------------------------------------------

    def _mask(self) -> int:
        return (1 << self._len) - 1


def _coerce(other: Bitmap) -> int:
    if isinstance(other, RawBitmap):
        return other._bits
    value = 0
    for i, bit in enumerate(other.iter_bits()):
        if bit:
            value |= 1 << i
    return value
