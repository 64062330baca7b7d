"""Run-length-encoded bitmap backend (marker words + dirty words).

The payload is a stream of 64-bit words.  A *marker* word describes a run of
homogeneous *fill* words followed by a run of verbatim *dirty* words:

    bit 0        fill value (0 or 1)
    bits 1..32   number of fill words that the marker stands for
    bits 33..63  number of dirty words that follow the marker in the stream

Fill words are never stored; dirty words are stored verbatim.  A partial
trailing word (when the bit length is not a multiple of 64) lives outside the
stream in a small tail buffer.  Appends keep the stream canonical: fill runs
of the same value merge into the previous marker when no dirty words
intervene, and an appended word equal to all-zeros/all-ones becomes a fill
rather than a dirty word.  The stream can only be walked front to back, so
position queries ride on forward cursors that skip whole fill runs in one
step.
"""

from __future__ import annotations

from typing import Iterator, Optional, Tuple

from .base import BitCursor, Bitmap, append_runs

WORD_BITS = 64
WORD_MASK = (1 << WORD_BITS) - 1
FILL_MAX = (1 << 32) - 1   # capacity of the fill-run field
DIRTY_MAX = (1 << 31) - 1  # capacity of the dirty-count field

# segment kinds yielded by RleBitmap._segments()
_FILL = 0
_DIRTY = 1


def _marker(value: int, fills: int, dirties: int) -> int:
    return value | (fills << 1) | (dirties << 33)


def _unmarker(word: int) -> Tuple[int, int, int]:
    return word & 1, (word >> 1) & FILL_MAX, word >> 33


class RleCursor(BitCursor):
    """Forward cursor that resumes from (marker index, covered-bit offset)."""

    def __init__(self, bitmap: "RleBitmap", value: int):
        self._bitmap = bitmap
        self._value = value
        self._mi = 0          # index of the current marker in the word stream
        self._base = 0        # absolute bit position of the marker's coverage
        self._fill_done = False
        self._di = 0          # dirty words consumed within the current marker
        self.absolute = None

    def next_from(self, start: int) -> Optional[int]:
        bm = self._bitmap
        words = bm._words
        value = self._value
        while self._mi < len(words):
            fill_value, fills, dirties = _unmarker(words[self._mi])
            if not self._fill_done:
                span = fills * WORD_BITS
                end = self._base + span
                if start < end and fill_value == value and span:
                    pos = start if start > self._base else self._base
                    self.absolute = pos
                    return pos
                self._base = end
                self._fill_done = True
            while self._di < dirties:
                word = words[self._mi + 1 + self._di]
                end = self._base + WORD_BITS
                if start < end:
                    offset = start - self._base if start > self._base else 0
                    probe = word if value else word ^ WORD_MASK
                    probe >>= offset
                    if probe:
                        pos = self._base + offset + (
                            (probe & -probe).bit_length() - 1
                        )
                        self.absolute = pos
                        return pos
                self._base = end
                self._di += 1
            self._mi += 1 + dirties
            self._fill_done = False
            self._di = 0
        # trailing partial word
        tail_bits = bm._tail_bits
        if tail_bits:
            end = self._base + tail_bits
            if start < end:
                offset = start - self._base if start > self._base else 0
                probe = bm._tail if value else bm._tail ^ ((1 << tail_bits) - 1)
                probe >>= offset
                if probe:
                    pos = self._base + offset + ((probe & -probe).bit_length() - 1)
                    if pos < end:
                        self.absolute = pos
                        return pos
        return None


class RleBitmap(Bitmap):
    backend_name = "rle64"

    __slots__ = ("_words", "_len", "_last_marker", "_tail", "_tail_bits")

    def __init__(self):
        self._words: list[int] = []
        self._len = 0
        self._last_marker = -1  # index of the active marker, -1 when empty
        self._tail = 0          # pending bits not yet forming a full word
        self._tail_bits = 0

    @classmethod
    def from_bits(cls, bits) -> "RleBitmap":
        out = cls()
        for b in bits:
            out.add_many(1 if b else 0, 1)
        return out

    @classmethod
    def from_words(cls, words, length: int) -> "RleBitmap":
        """Encode full 64-bit words (plus a final partial word) of payload."""
        out = cls()
        remaining = length
        for word in words:
            if remaining <= 0:
                break
            take = WORD_BITS if remaining >= WORD_BITS else remaining
            mask = WORD_MASK if take == WORD_BITS else (1 << take) - 1
            out._push_bits(word & mask, take)
            remaining -= take
        if remaining > 0:
            raise ValueError("word payload shorter than the stated length")
        out._len = length
        return out

    # -- read ------------------------------------------------------------------

    def __len__(self) -> int:
        return self._len

    def get(self, index: int) -> int:
        self._check_index(index)
        base = 0
        for kind, payload, span in self._segments():
            end = base + span
            if index < end:
                if kind == _FILL:
                    return payload
                return (payload >> (index - base)) & 1
            base = end
        return (self._tail >> (index - base)) & 1

    def next_bit(self, value: int, start: int) -> Optional[int]:
        self._check_start(start)
        return RleCursor(self, value).next_from(start)

    def last_bit(self, value: int) -> Optional[int]:
        # The stream cannot be walked back to front, so make one forward pass
        # remembering the final run or word that carries the value.
        last = None
        base = 0
        for kind, payload, span in self._segments():
            if kind == _FILL:
                if payload == value and span:
                    last = base + span - 1
            else:
                probe = payload if value else payload ^ WORD_MASK
                if probe:
                    last = base + probe.bit_length() - 1
            base += span
        if self._tail_bits:
            probe = self._tail if value else (
                self._tail ^ ((1 << self._tail_bits) - 1)
            )
            if probe:
                last = base + probe.bit_length() - 1
        return last

    def cursor(self, value: int) -> RleCursor:
        return RleCursor(self, value)

    def payload_bytes(self) -> int:
        return 8 * (len(self._words) + (1 if self._tail_bits else 0))

    def to_int(self) -> int:
        # committed segments are word-aligned, so byte writes line up
        buf = bytearray(((self._len + 7) // 8) + 8)
        bitpos = 0
        for kind, payload, span in self._segments():
            if kind == _FILL:
                if payload:
                    start = bitpos >> 3
                    buf[start:start + (span >> 3)] = b"\xff" * (span >> 3)
                bitpos += span
            else:
                start = bitpos >> 3
                buf[start:start + 8] = payload.to_bytes(8, "little")
                bitpos += WORD_BITS
        if self._tail_bits:
            start = bitpos >> 3
            buf[start:start + 8] = self._tail.to_bytes(8, "little")
        return int.from_bytes(buf, "little") & ((1 << self._len) - 1)

    # -- bitwise -----------------------------------------------------------------

    def and_(self, other: Bitmap) -> "RleBitmap":
        return self._merge(other, lambda x, y: x & y)

    def or_(self, other: Bitmap) -> "RleBitmap":
        return self._merge(other, lambda x, y: x | y)

    def not_(self) -> "RleBitmap":
        out = RleBitmap()
        for kind, payload, span in self._segments():
            if kind == _FILL:
                out._push_fill_words(1 - payload, span // WORD_BITS)
            else:
                out._push_word(payload ^ WORD_MASK)
        out._len = self._len - self._tail_bits
        if self._tail_bits:
            out._push_bits(self._tail ^ ((1 << self._tail_bits) - 1),
                           self._tail_bits)
            out._len += self._tail_bits
        return out

    def remove_first_bit(self) -> "RleBitmap":
        if self._len == 0:
            raise IndexError("cannot remove the first bit of an empty bitmap")
        # Re-encode the stream shifted left by one position.
        out = RleBitmap()
        first = True
        for kind, payload, span in self._segments():
            if kind == _FILL:
                bits = span - 1 if first else span
                if bits:
                    out.add_many(payload, bits)
            else:
                if first:
                    out._push_bits(payload >> 1, WORD_BITS - 1)
                    out._len += WORD_BITS - 1
                else:
                    out._push_bits(payload, WORD_BITS)
                    out._len += WORD_BITS
            first = False
        if self._tail_bits:
            bits = self._tail_bits - 1 if first else self._tail_bits
            if bits:
                word = self._tail >> 1 if first else self._tail
                out._push_bits(word, bits)
                out._len += bits
        return out

    # -- builders ----------------------------------------------------------------

    def add_many(self, value: int, count: int) -> "RleBitmap":
        if count < 0:
            raise ValueError(f"negative run length {count}")
        self._push_run(value, count)
        return self

    def append_slice(self, src: Bitmap, start: int, count: int) -> "RleBitmap":
        src._check_slice(start, count)
        append_runs(self, src, start, count)
        return self

    def empty_like(self) -> "RleBitmap":
        return RleBitmap()

    # -- encoding internals --------------------------------------------------

    def _segments(self) -> Iterator[Tuple[int, int, int]]:
        """Yield (kind, payload, bit span) over the committed word stream.

        Fill segments carry the fill value as payload; dirty segments are
        yielded one word at a time.  The tail is not included.
        """
        words = self._words
        i = 0
        while i < len(words):
            value, fills, dirties = _unmarker(words[i])
            if fills:
                yield _FILL, value, fills * WORD_BITS
            for k in range(dirties):
                yield _DIRTY, words[i + 1 + k], WORD_BITS
            i += 1 + dirties

    def _push_fill_words(self, value: int, nwords: int) -> None:
        while nwords > 0:
            take = nwords if nwords <= FILL_MAX else FILL_MAX
            if self._last_marker >= 0:
                mvalue, fills, dirties = _unmarker(self._words[self._last_marker])
                if dirties == 0 and (mvalue == value or fills == 0):
                    room = FILL_MAX - fills
                    grow = take if take <= room else room
                    if grow:
                        self._words[self._last_marker] = _marker(
                            value, fills + grow, 0
                        )
                        nwords -= grow
                        continue
            self._last_marker = len(self._words)
            self._words.append(_marker(value, take, 0))
            nwords -= take

    def _push_word(self, word: int) -> None:
        """Append one full word, classifying homogeneous words as fills."""
        if word == 0:
            self._push_fill_words(0, 1)
        elif word == WORD_MASK:
            self._push_fill_words(1, 1)
        else:
            if self._last_marker >= 0:
                value, fills, dirties = _unmarker(self._words[self._last_marker])
                if dirties < DIRTY_MAX:
                    self._words[self._last_marker] = _marker(
                        value, fills, dirties + 1
                    )
                    self._words.append(word)
                    return
            self._last_marker = len(self._words)
            self._words.append(_marker(0, 0, 1))
            self._words.append(word)

    def _push_bits(self, word: int, nbits: int) -> None:
        """Append nbits (<= 64) of payload without touching the length."""
        if nbits == 0:
            return
        if self._tail_bits == 0 and nbits == WORD_BITS:
            self._push_word(word)
            return
        self._tail |= (word << self._tail_bits) & WORD_MASK
        total = self._tail_bits + nbits
        if total >= WORD_BITS:
            self._push_word(self._tail)
            spill = WORD_BITS - self._tail_bits
            self._tail = word >> spill
            self._tail_bits = total - WORD_BITS
        else:
            self._tail_bits = total

    def _push_run(self, value: int, count: int) -> None:
        self._len += count
        if self._tail_bits:
            head = WORD_BITS - self._tail_bits
            if head > count:
                head = count
            self._push_bits(((1 << head) - 1) if value else 0, head)
            count -= head
        whole, rest = divmod(count, WORD_BITS)
        if whole:
            self._push_fill_words(value, whole)
        if rest:
            self._push_bits(((1 << rest) - 1) if value else 0, rest)

    def _merge(self, other: Bitmap, op) -> "RleBitmap":
        self._require_same_length(other)
        if not isinstance(other, RleBitmap):
            raise TypeError(
                f"cannot combine {type(self).__name__} with {type(other).__name__}"
            )
        out = RleBitmap()
        left = _SegmentPuller(self)
        right = _SegmentPuller(other)
        words_left = self._len // WORD_BITS
        while words_left:
            lv, rv = left.fill_value(), right.fill_value()
            if lv is not None and rv is not None:
                take = min(left.fill_words(), right.fill_words(), words_left)
                out._push_fill_words(op(lv, rv), take)
                left.consume_fill(take)
                right.consume_fill(take)
                words_left -= take
            elif lv is not None:
                word = right.take_dirty()
                out._push_word(op(WORD_MASK if lv else 0, word) & WORD_MASK)
                left.consume_fill(1)
                words_left -= 1
            elif rv is not None:
                word = left.take_dirty()
                out._push_word(op(word, WORD_MASK if rv else 0) & WORD_MASK)
                right.consume_fill(1)
                words_left -= 1
            else:
                out._push_word(op(left.take_dirty(), right.take_dirty())
                               & WORD_MASK)
                words_left -= 1
        out._len = self._len - self._tail_bits
        if self._tail_bits:
            out._push_bits(op(self._tail, other._tail)
                           & ((1 << self._tail_bits) - 1), self._tail_bits)
            out._len += self._tail_bits
        return out

    def _check_canonical(self) -> None:
        """Validate the stream structure (used by the test suite)."""
        covered = 0
        i = 0
        prev_mergeable: Optional[int] = None  # fill value open for merging
        while i < len(self._words):
            value, fills, dirties = _unmarker(self._words[i])
            if fills == 0 and dirties == 0:
                raise AssertionError(f"empty marker at word {i}")
            if fills and prev_mergeable is not None and prev_mergeable == value:
                raise AssertionError(
                    f"marker at word {i} should have merged with predecessor"
                )
            for k in range(dirties):
                word = self._words[i + 1 + k]
                if word == 0 or word == WORD_MASK:
                    raise AssertionError(
                        f"homogeneous word stored as dirty at {i + 1 + k}"
                    )
            covered += (fills + dirties) * WORD_BITS
            if dirties:
                prev_mergeable = None
            elif fills == FILL_MAX:
                prev_mergeable = None  # saturated marker may not absorb more
            else:
                prev_mergeable = value
            i += 1 + dirties
        if covered != self._len - self._tail_bits:
            raise AssertionError(
                f"stream covers {covered} bits, expected "
                f"{self._len - self._tail_bits}"
            )
        if self._tail_bits != self._len % WORD_BITS:
            raise AssertionError("tail width disagrees with the bit length")
        if self._tail >> self._tail_bits:
            raise AssertionError("tail has bits beyond its width")


class _SegmentPuller:
    """Sequential word-level reader over an RleBitmap's committed stream."""

    def __init__(self, bitmap: RleBitmap):
        self._it = bitmap._segments()
        self._kind: Optional[int] = None
        self._payload = 0
        self._words = 0
        self._advance()

    def _advance(self) -> None:
        try:
            kind, payload, span = next(self._it)
        except StopIteration:
            self._kind = None
            return
        self._kind = kind
        self._payload = payload
        self._words = span // WORD_BITS

    def fill_value(self) -> Optional[int]:
        if self._kind == _FILL:
            return self._payload
        return None

    def fill_words(self) -> int:
        return self._words

    def consume_fill(self, nwords: int) -> None:
        self._words -= nwords
        if self._words == 0:
            self._advance()

    def take_dirty(self) -> int:
        word = self._payload
        self._advance()
        return word


