"""Cross-backend equivalence and backend-specific structure invariants."""

import random

import pytest

from conftest import random_bits, run_structured_bits
from ltlbit.bitmaps import (BACKENDS, RawBitmap, RleBitmap, RoaringBitmap,
                            from_string)
from ltlbit.bitmaps.rle import FILL_MAX, WORD_BITS, _marker, _unmarker

DENSITIES = (0.01, 0.5, 0.99)
RUNS = (1, 32, 64)


def _inputs(seed):
    rng = random.Random(seed)
    cases = []
    for _ in range(12):
        n = rng.randrange(0, 513)
        cases.append(random_bits(rng, n, rng.choice(DENSITIES)))
    for run in RUNS:
        cases.append(run_structured_bits(rng, rng.randrange(0, 513), run))
    return rng, cases


def _check_structure(bitmap):
    if isinstance(bitmap, RleBitmap):
        bitmap._check_canonical()
    elif isinstance(bitmap, RoaringBitmap):
        bitmap._check_containers()


def test_backend_equivalence_on_every_primitive():
    rng, cases = _inputs(20260809)
    for bits in cases:
        n = len(bits)
        raw = RawBitmap.from_bits(bits)
        other_bits = random_bits(rng, n, 0.5)
        raw_other = RawBitmap.from_bits(other_bits)
        start = rng.randrange(0, n + 1)
        slice_len = rng.randrange(0, n + 1 - start) if n else 0
        run_value = rng.randrange(2)
        run_len = rng.randrange(0, 130)
        for name, cls in BACKENDS.items():
            b = cls.from_bits(bits)
            other = cls.from_bits(other_bits)
            assert b == raw, name
            assert b.and_(other) == raw.and_(raw_other), name
            assert b.or_(other) == raw.or_(raw_other), name
            assert b.not_() == raw.not_(), name
            for value in (0, 1):
                assert b.next_bit(value, start) == raw.next_bit(value, start)
                assert b.last_bit(value) == raw.last_bit(value)
            if n:
                assert b.remove_first_bit() == raw.remove_first_bit(), name
            grown = cls.from_bits(bits).add_many(run_value, run_len)
            assert grown == raw.add_many(run_value, run_len), name
            stitched = cls.from_bits([1, 0]).append_slice(b, start, slice_len)
            assert stitched == RawBitmap.from_bits(
                [1, 0] + bits[start:start + slice_len]), name
            for result in (b.and_(other), b.not_(), grown, stitched):
                _check_structure(result)


def test_structure_preserved_under_op_chains():
    rng = random.Random(7)
    for name in ("rle64", "roaring"):
        cls = BACKENDS[name]
        for trial in range(20):
            bits = run_structured_bits(rng, rng.randrange(1, 400),
                                       rng.choice(RUNS))
            b = cls.from_bits(bits)
            for _ in range(5):
                op = rng.randrange(4)
                if op == 0:
                    b = b.not_()
                elif op == 1:
                    b = b.add_many(rng.randrange(2), rng.randrange(0, 200))
                elif op == 2 and len(b):
                    b = b.remove_first_bit()
                else:
                    b = b.or_(b.not_().not_())
                _check_structure(b)


# -- RLE specifics ---------------------------------------------------------------


def test_rle_long_fill_append_is_compact():
    b = RleBitmap().add_many(0, 10 ** 6).add_many(1, 10 ** 6)
    b._check_canonical()
    assert len(b._words) <= 10
    assert b.payload_bytes() <= 80


def test_rle_alternating_bits_store_dirty_words():
    b = RleBitmap()
    for _ in range(32):
        b = b.add_many(0, 1).add_many(1, 1)
    b._check_canonical()
    # 64 bits of alternating values cannot be filled: one dirty word
    dirty = sum(_unmarker(b._words[i])[2] for i in (0,))
    assert dirty >= 1


def test_rle_append_zero_bits_is_noop():
    b = RleBitmap().add_many(1, 5)
    words_before = list(b._words)
    b = b.add_many(0, 0).add_many(1, 0)
    assert list(b._words) == words_before
    assert len(b) == 5


def test_rle_run_skipping_next():
    bits = [0] * 1000 + [1] + [0] * 23
    b = RleBitmap.from_bits(bits)
    assert b.next_bit(1, 0) == 1000
    assert RleBitmap.from_bits([1] * 64).next_bit(0, 0) is None
    rng = random.Random(3)
    raw_bits = run_structured_bits(rng, 500, 32)
    raw = RawBitmap.from_bits(raw_bits)
    rle = RleBitmap.from_bits(raw_bits)
    for start in range(0, 500, 37):
        assert rle.next_bit(1, start) == raw.next_bit(1, start)


def test_rle_marker_field_capacity():
    assert _unmarker(_marker(1, FILL_MAX, 2 ** 31 - 1)) == (
        1, FILL_MAX, 2 ** 31 - 1)
    # fills beyond one marker's field spill into a second marker
    huge = (FILL_MAX + 5) * WORD_BITS
    b = RleBitmap().add_many(0, huge)
    b._check_canonical()
    assert len(b) == huge
    assert len(b._words) == 2
    assert b.last_bit(0) == huge - 1
    assert b.next_bit(1, 0) is None


def test_rle_payload_of_fill_only_bitmap():
    assert RleBitmap().add_many(0, 640).payload_bytes() <= 16


# -- Roaring specifics --------------------------------------------------------------


def test_roaring_sparse_set_probes():
    b = RoaringBitmap().add_many(0, 5).add_many(1, 1)
    b = b.add_many(0, 70000 - 6).add_many(1, 1)
    assert len(b) == 70001
    assert b.get(5) == 1
    assert b.get(70000) == 1
    assert b.get(6) == 0
    b._check_containers()


def test_roaring_random_sets_match_raw():
    rng = random.Random(9)
    positions = sorted(rng.sample(range(10 ** 5), 2000))
    bits = [0] * 10 ** 5
    for p in positions:
        bits[p] = 1
    raw = RawBitmap.from_bits(bits)
    roaring = RoaringBitmap.from_int(raw.to_int(), len(bits))
    roaring._check_containers()
    for p in rng.sample(range(10 ** 5), 400):
        assert roaring.get(p) == raw.get(p)


def test_roaring_container_threshold_conversions():
    # 4096 entries stay an array; one more converts to a block
    b = RoaringBitmap()
    for i in range(4096):
        b = b.add_many(1, 1).add_many(0, 1)
    b._flush()
    container = b._containers[0]
    assert not isinstance(container, int)
    assert len(container) == 4096
    b = b.add_many(1, 1)
    b._flush()
    assert isinstance(b._containers[0], int)
    b._check_containers()
    # dropping bits below the threshold converts back
    mask = RoaringBitmap().add_many(1, 10).add_many(0, len(b) - 10)
    small = b.and_(mask)
    small._check_containers()
    assert not isinstance(small._containers[0], int)


def test_roaring_empty_tail_is_free():
    b = RoaringBitmap().add_many(0, 640)
    assert b.payload_bytes() <= 8
    assert len(b) == 640


# -- compression ratios ------------------------------------------------------------


def test_rle_compression_on_long_runs():
    # Word-aligned runs (>= the 64-bit word width) become pure fills; runs of
    # half a word leave every mixed word dirty plus marker overhead, so the
    # achievable ratio there sits near 0.88, not below 0.75.
    rng = random.Random(42)
    n = 1 << 16
    for run, bound in ((64, 0.75), (32, 0.95)):
        bits = run_structured_bits(rng, n, run)
        raw = RawBitmap.from_bits(bits)
        rle = RleBitmap.from_bits(bits)
        ratio = rle.payload_bytes() / raw.payload_bytes()
        assert ratio <= bound, (run, ratio)


def test_rle_dense_random_overhead_is_bounded():
    rng = random.Random(43)
    bits = random_bits(rng, 1 << 16, 0.5)
    raw = RawBitmap.from_bits(bits)
    rle = RleBitmap.from_bits(bits)
    assert rle.payload_bytes() / raw.payload_bytes() <= 1.25
