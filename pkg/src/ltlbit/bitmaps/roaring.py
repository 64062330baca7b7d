"""Two-level container bitmap backend.

Positions are split into 65536-bit chunks keyed by the 16 high bits.  A chunk
with at most 4096 set bits is stored as a sorted array of 16-bit offsets; a
denser chunk is stored as a packed 65536-bit block.  Containers convert in
both directions whenever an operation crosses the threshold.  Chunks that are
entirely zero are simply absent, so the bit length is stored explicitly
(an all-zero tail would otherwise be unrepresentable).

Appends are staged: the chunk currently being extended lives in a mutable
byte buffer and is normalised into a container when the append frontier
leaves it or a read needs a consistent view.  This keeps run-by-run output
construction linear instead of rebuilding an 8 KiB block per appended run.
"""

from __future__ import annotations

from array import array
from bisect import bisect_left, bisect_right
from typing import Dict, List, Optional, Union

from .base import BitCursor, Bitmap, append_runs

CHUNK_BITS = 1 << 16
CHUNK_MASK = CHUNK_BITS - 1
CHUNK_BYTES = CHUNK_BITS // 8
CHUNK_FULL = (1 << CHUNK_BITS) - 1
ARRAY_LIMIT = 4096

# array('H') of sorted offsets for sparse chunks, int block for dense ones
Container = Union[array, int]


def _to_block(container: Container) -> int:
    if isinstance(container, int):
        return container
    block = bytearray(CHUNK_BYTES)
    for low in container:
        block[low >> 3] |= 1 << (low & 7)
    return int.from_bytes(block, "little")


def _to_array(block: int) -> array:
    out = array("H")
    while block:
        low = block & -block
        out.append(low.bit_length() - 1)
        block ^= low
    return out


def _cardinality(container: Container) -> int:
    if isinstance(container, int):
        return container.bit_count()
    return len(container)


def _normalize(container: Container) -> Optional[Container]:
    """Enforce the array/bitmap threshold; None means an all-zero chunk."""
    card = _cardinality(container)
    if card == 0:
        return None
    if isinstance(container, int):
        return _to_array(container) if card <= ARRAY_LIMIT else container
    return container if card <= ARRAY_LIMIT else _to_block(container)


def _container_bytes(container: Optional[Container]) -> bytes:
    if container is None:
        return bytes(CHUNK_BYTES)
    if isinstance(container, int):
        return container.to_bytes(CHUNK_BYTES, "little")
    block = bytearray(CHUNK_BYTES)
    for low in container:
        block[low >> 3] |= 1 << (low & 7)
    return bytes(block)


class RoaringCursor(BitCursor):
    """Forward scanner caching the bytes of the chunk it is inside."""

    def __init__(self, bitmap: "RoaringBitmap", value: int):
        bitmap._flush()
        self._bitmap = bitmap
        self._value = value
        self._keys: List[int] = sorted(bitmap._containers)
        self._high = -1
        self._arr: Optional[array] = None
        self._bytes: Optional[bytes] = None
        self._absent = True
        self.absolute = None

    def _load(self, high: int) -> None:
        self._high = high
        container = self._bitmap._containers.get(high)
        self._arr = None
        self._bytes = None
        self._absent = container is None
        if isinstance(container, array):
            self._arr = container
        elif isinstance(container, int):
            self._bytes = container.to_bytes(CHUNK_BYTES, "little")

    def next_from(self, start: int) -> Optional[int]:
        n = len(self._bitmap)
        pos = start
        while pos < n:
            high = pos >> 16
            if high != self._high:
                if self._value == 1:
                    # skip straight to the next chunk that holds any bits
                    i = bisect_left(self._keys, high)
                    if i == len(self._keys):
                        return None
                    if self._keys[i] != high:
                        high = self._keys[i]
                        pos = high << 16
                self._load(high)
            found = self._find(pos & CHUNK_MASK)
            if found is not None:
                hit = (high << 16) + found
                if hit >= n:
                    return None
                self.absolute = hit
                return hit
            pos = (high + 1) << 16
        return None

    def _find(self, low: int) -> Optional[int]:
        value = self._value
        if self._absent:
            return low if value == 0 else None
        arr = self._arr
        if arr is not None:
            i = bisect_left(arr, low)
            if value == 1:
                return arr[i] if i < len(arr) else None
            expect = low
            while i < len(arr) and arr[i] == expect:
                i += 1
                expect += 1
            return expect if expect < CHUNK_BITS else None
        data = self._bytes
        i = low >> 3
        if value == 1:
            byte = data[i] >> (low & 7)
            if byte:
                return low + ((byte & -byte).bit_length() - 1)
            i += 1
            while i < CHUNK_BYTES:
                byte = data[i]
                if byte:
                    return (i << 3) + ((byte & -byte).bit_length() - 1)
                i += 1
            return None
        byte = (data[i] >> (low & 7)) ^ (0xFF >> (low & 7))
        if byte:
            return low + ((byte & -byte).bit_length() - 1)
        i += 1
        while i < CHUNK_BYTES:
            byte = data[i] ^ 0xFF
            if byte:
                return (i << 3) + ((byte & -byte).bit_length() - 1)
            i += 1
        return None


class RoaringBitmap(Bitmap):
    backend_name = "roaring"

    __slots__ = ("_containers", "_len", "_stage", "_stage_high")

    def __init__(self):
        self._containers: Dict[int, Container] = {}
        self._len = 0
        self._stage: Optional[bytearray] = None
        self._stage_high = -1

    @classmethod
    def from_bits(cls, bits) -> "RoaringBitmap":
        out = cls()
        for b in bits:
            out.add_many(1 if b else 0, 1)
        return out

    @classmethod
    def from_int(cls, value: int, length: int) -> "RoaringBitmap":
        out = cls()
        out._len = length
        for high in range((length + CHUNK_BITS - 1) // CHUNK_BITS):
            block = (value >> (high * CHUNK_BITS)) & CHUNK_FULL
            container = _normalize(block)
            if container is not None:
                out._containers[high] = container
        return out

    # -- staging ---------------------------------------------------------------

    def _flush(self) -> None:
        if self._stage is None:
            return
        block = int.from_bytes(self._stage, "little")
        norm = _normalize(block)
        if norm is None:
            self._containers.pop(self._stage_high, None)
        else:
            self._containers[self._stage_high] = norm
        self._stage = None
        self._stage_high = -1

    def _open_stage(self, high: int) -> bytearray:
        if self._stage is not None and self._stage_high == high:
            return self._stage
        self._flush()
        self._stage = bytearray(_container_bytes(self._containers.get(high)))
        self._stage_high = high
        return self._stage

    # -- read ------------------------------------------------------------------

    def __len__(self) -> int:
        return self._len

    def get(self, index: int) -> int:
        self._check_index(index)
        self._flush()
        container = self._containers.get(index >> 16)
        if container is None:
            return 0
        low = index & CHUNK_MASK
        if isinstance(container, int):
            return (container >> low) & 1
        i = bisect_left(container, low)
        return 1 if i < len(container) and container[i] == low else 0

    def next_bit(self, value: int, start: int) -> Optional[int]:
        self._check_start(start)
        return RoaringCursor(self, value).next_from(start)

    def last_bit(self, value: int) -> Optional[int]:
        self._flush()
        n = self._len
        if n == 0:
            return None
        top = (n - 1) >> 16
        if value == 1:
            for high in sorted(self._containers, reverse=True):
                if high > top:
                    continue
                width = min(n - (high << 16), CHUNK_BITS)
                found = self._rfind_in_chunk(self._containers[high], width, 1)
                if found is not None:
                    return (high << 16) + found
            return None
        for high in range(top, -1, -1):
            width = min(n - (high << 16), CHUNK_BITS)
            found = self._rfind_in_chunk(self._containers.get(high), width, 0)
            if found is not None:
                return (high << 16) + found
        return None

    def cursor(self, value: int) -> RoaringCursor:
        return RoaringCursor(self, value)

    def payload_bytes(self) -> int:
        self._flush()
        total = 0
        for container in self._containers.values():
            total += 2  # chunk key
            if isinstance(container, int):
                total += CHUNK_BYTES
            else:
                total += 2 * len(container)
        return total

    def to_int(self) -> int:
        self._flush()
        nbytes = (self._len + 7) // 8
        buf = bytearray(nbytes + CHUNK_BYTES)
        for high, container in self._containers.items():
            base = high * CHUNK_BYTES
            buf[base:base + CHUNK_BYTES] = _container_bytes(container)
        return int.from_bytes(buf, "little") & ((1 << self._len) - 1)

    # -- bitwise -----------------------------------------------------------------

    def and_(self, other: Bitmap) -> "RoaringBitmap":
        self._require_same_length(other)
        other = self._expect_roaring(other)
        self._flush()
        other._flush()
        out = RoaringBitmap()
        out._len = self._len
        for high, left in self._containers.items():
            right = other._containers.get(high)
            if right is None:
                continue
            if isinstance(left, array) and isinstance(right, array):
                if len(left) > len(right):
                    left, right = right, left
                merged: Container = array(
                    "H", [v for v in left if _array_has(right, v)]
                )
            elif isinstance(left, array):
                blockbytes = right.to_bytes(CHUNK_BYTES, "little")
                merged = array(
                    "H", [v for v in left if blockbytes[v >> 3] & (1 << (v & 7))]
                )
            elif isinstance(right, array):
                blockbytes = left.to_bytes(CHUNK_BYTES, "little")
                merged = array(
                    "H", [v for v in right if blockbytes[v >> 3] & (1 << (v & 7))]
                )
            else:
                merged = left & right
            norm = _normalize(merged)
            if norm is not None:
                out._containers[high] = norm
        return out

    def or_(self, other: Bitmap) -> "RoaringBitmap":
        self._require_same_length(other)
        other = self._expect_roaring(other)
        self._flush()
        other._flush()
        out = RoaringBitmap()
        out._len = self._len
        for high in self._containers.keys() | other._containers.keys():
            left = self._containers.get(high)
            right = other._containers.get(high)
            if left is None:
                merged = right[:] if isinstance(right, array) else right
            elif right is None:
                merged = left[:] if isinstance(left, array) else left
            elif isinstance(left, array) and isinstance(right, array):
                merged = _union_arrays(left, right)
            else:
                merged = _to_block(left) | _to_block(right)
            norm = _normalize(merged)
            if norm is not None:
                out._containers[high] = norm
        return out

    def not_(self) -> "RoaringBitmap":
        self._flush()
        out = RoaringBitmap()
        out._len = self._len
        n = self._len
        for high in range((n + CHUNK_BITS - 1) // CHUNK_BITS):
            width = min(n - (high << 16), CHUNK_BITS)
            mask = CHUNK_FULL if width == CHUNK_BITS else (1 << width) - 1
            container = self._containers.get(high)
            block = mask if container is None else (_to_block(container) ^ mask)
            norm = _normalize(block)
            if norm is not None:
                out._containers[high] = norm
        return out

    def remove_first_bit(self) -> "RoaringBitmap":
        if self._len == 0:
            raise IndexError("cannot remove the first bit of an empty bitmap")
        return RoaringBitmap.from_int(self.to_int() >> 1, self._len - 1)

    # -- builders ----------------------------------------------------------------

    def add_many(self, value: int, count: int) -> "RoaringBitmap":
        if count < 0:
            raise ValueError(f"negative run length {count}")
        if count == 0:
            return self
        start = self._len
        end = start + count
        self._len = end
        if value == 0:
            # appended zeros are implicit; leave absent chunks absent
            return self
        pos = start
        while pos < end:
            high = pos >> 16
            lo = pos & CHUNK_MASK
            hi = min(end - (high << 16), CHUNK_BITS)
            stage = self._open_stage(high)
            first = lo >> 3
            last = (hi - 1) >> 3
            if first == last:
                stage[first] |= ((1 << (hi - lo)) - 1) << (lo & 7)
            else:
                if lo & 7:
                    stage[first] |= (0xFF << (lo & 7)) & 0xFF
                    first += 1
                tail = hi & 7
                full_end = last if tail else last + 1
                if full_end > first:
                    stage[first:full_end] = b"\xff" * (full_end - first)
                if tail:
                    stage[last] |= (1 << tail) - 1
            pos = (high + 1) << 16
        return self

    def append_slice(self, src: Bitmap, start: int, count: int) -> "RoaringBitmap":
        src._check_slice(start, count)
        append_runs(self, src, start, count)
        return self

    def empty_like(self) -> "RoaringBitmap":
        return RoaringBitmap()

    # -- container invariant check (used by the test suite) ----------------------

    def _check_containers(self) -> None:
        self._flush()
        for high, container in self._containers.items():
            card = _cardinality(container)
            if card == 0:
                raise AssertionError(f"empty container stored for chunk {high}")
            if isinstance(container, array):
                if card > ARRAY_LIMIT:
                    raise AssertionError(
                        f"array container of {card} entries in chunk {high}"
                    )
                if any(container[i] >= container[i + 1]
                       for i in range(card - 1)):
                    raise AssertionError(f"unsorted container in chunk {high}")
            else:
                if card <= ARRAY_LIMIT:
                    raise AssertionError(
                        f"bitmap container of {card} entries in chunk {high}"
                    )
                if container >> CHUNK_BITS:
                    raise AssertionError(f"oversized block in chunk {high}")
        top = self.last_bit(1)
        if top is not None and top >= self._len:
            raise AssertionError("set bit beyond the stated length")

    # -- internal ---------------------------------------------------------------

    @staticmethod
    def _expect_roaring(other: Bitmap) -> "RoaringBitmap":
        if not isinstance(other, RoaringBitmap):
            raise TypeError(
                f"cannot combine RoaringBitmap with {type(other).__name__}"
            )
        return other

    @staticmethod
    def _rfind_in_chunk(container: Optional[Container], width: int,
                        value: int) -> Optional[int]:
        """Last offset < width inside one chunk with the wanted bit value."""
        if container is None:
            return width - 1 if value == 0 else None
        if isinstance(container, int):
            mask = CHUNK_FULL if width == CHUNK_BITS else (1 << width) - 1
            probe = (container if value else container ^ CHUNK_FULL) & mask
            if probe == 0:
                return None
            return probe.bit_length() - 1
        if value:
            i = bisect_right(container, width - 1)
            return container[i - 1] if i > 0 else None
        expect = width - 1
        i = bisect_right(container, width - 1) - 1
        while i >= 0 and container[i] == expect:
            i -= 1
            expect -= 1
        return expect if expect >= 0 else None


def _array_has(arr: array, value: int) -> bool:
    i = bisect_left(arr, value)
    return i < len(arr) and arr[i] == value


def _union_arrays(left: array, right: array) -> array:
    out = array("H")
    i = j = 0
    nl, nr = len(left), len(right)
    while i < nl and j < nr:
        a, b = left[i], right[j]
        if a < b:
            out.append(a)
            i += 1
        elif b < a:
            out.append(b)
            j += 1
        else:
            out.append(a)
            i += 1
            j += 1
    if i < nl:
        out.extend(left[i:])
    if j < nr:
        out.extend(right[j:])
    return out
