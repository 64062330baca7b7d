"""Contract tests for the bitmap operation set, checked per backend against
a plain list-of-bits reference model."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import ref_last, ref_next
from ltlbit.bitmaps import (BACKENDS, LengthMismatchError, RawBitmap,
                            from_string, make_empty)

bit_lists = st.lists(st.integers(0, 1), max_size=512)
backends = st.sampled_from(sorted(BACKENDS))


def build(bits, backend):
    return BACKENDS[backend].from_bits(bits)


# -- construction / length / get ------------------------------------------------


def test_length_examples(backend):
    assert len(from_string("", backend)) == 0
    assert len(from_string("0110", backend)) == 4
    assert len(make_empty(backend).add_many(1, 70)) == 70


def test_get_examples(backend):
    b = from_string("0110", backend)
    assert b.get(1) == 1
    assert b.get(0) == 0
    assert from_string("1", backend).get(0) == 1


def test_get_rejects_out_of_range(backend):
    b = from_string("0110", backend)
    with pytest.raises(IndexError):
        b.get(4)
    with pytest.raises(IndexError):
        b.get(-1)
    with pytest.raises(IndexError):
        make_empty(backend).get(0)


@given(bits=bit_lists, backend=backends)
@settings(max_examples=150, deadline=None)
def test_roundtrip_against_reference(bits, backend):
    b = build(bits, backend)
    assert len(b) == len(bits)
    assert [b.get(i) for i in range(len(bits))] == bits
    assert b.to01() == "".join(map(str, bits))


# -- bitwise operations ------------------------------------------------------------


def test_and_or_examples(backend):
    a = from_string("0110", backend)
    b = from_string("0011", backend)
    assert a.and_(b).to01() == "0010"
    assert a.or_(b).to01() == "0111"
    ones = from_string("1111", backend)
    zeros = from_string("0000", backend)
    assert ones.and_(a) == a
    assert zeros.and_(a) == zeros
    assert zeros.or_(a) == a
    assert ones.or_(a) == ones


def test_not_examples(backend):
    assert from_string("0110", backend).not_().to01() == "1001"
    assert make_empty(backend).not_().to01() == ""


def test_length_mismatch_rejected(backend):
    a = from_string("01", backend)
    b = from_string("011", backend)
    with pytest.raises(LengthMismatchError):
        a.and_(b)
    with pytest.raises(LengthMismatchError):
        a.or_(b)


@given(xs=bit_lists, backend=backends, data=st.data())
@settings(max_examples=150, deadline=None)
def test_de_morgan_and_involution(xs, backend, data):
    ys = data.draw(st.lists(st.integers(0, 1),
                            min_size=len(xs), max_size=len(xs)))
    a, b = build(xs, backend), build(ys, backend)
    assert a.and_(b).not_() == a.not_().or_(b.not_())
    assert a.or_(b).not_() == a.not_().and_(b.not_())
    assert a.not_().not_() == a


# -- append / remove ---------------------------------------------------------------


def test_add_many_examples(backend):
    assert from_string("01", backend).add_many(1, 3).to01() == "01111"
    assert make_empty(backend).add_many(0, 2).to01() == "00"
    assert from_string("1", backend).add_many(0, 0).to01() == "1"


def test_append_slice_examples(backend):
    src = from_string("0110", backend)
    assert from_string("1", backend).append_slice(src, 1, 2).to01() == "111"
    assert make_empty(backend).append_slice(
        from_string("01", backend), 0, 2).to01() == "01"
    one = from_string("1", backend)
    assert from_string("0", backend).append_slice(one, 1, 0).to01() == "0"


def test_append_slice_rejects_overflow(backend):
    src = from_string("0110", backend)
    with pytest.raises(IndexError):
        make_empty(backend).append_slice(src, 2, 3)


def test_remove_first_bit_examples(backend):
    assert from_string("0110", backend).remove_first_bit().to01() == "110"
    assert from_string("1", backend).remove_first_bit().to01() == ""
    with pytest.raises(IndexError):
        make_empty(backend).remove_first_bit()


@given(bits=st.lists(st.integers(0, 1), min_size=1, max_size=512),
       backend=backends)
@settings(max_examples=100, deadline=None)
def test_remove_first_bit_matches_shift(bits, backend):
    b = build(bits, backend)
    assert b.remove_first_bit().to01() == "".join(map(str, bits[1:]))


# -- next / last --------------------------------------------------------------------


def test_next_examples(backend):
    b = from_string("0010", backend)
    assert b.next_bit(1, 0) == 2
    assert from_string("1111", backend).next_bit(0, 0) is None
    assert b.next_bit(1, 3) is None


def test_last_examples(backend):
    assert from_string("1101", backend).last_bit(0) == 2
    assert from_string("1111", backend).last_bit(0) is None
    assert make_empty(backend).last_bit(1) is None


@given(bits=bit_lists, backend=backends, data=st.data())
@settings(max_examples=200, deadline=None)
def test_next_matches_reference_and_is_monotone(bits, backend, data):
    start = data.draw(st.integers(0, len(bits)))
    value = data.draw(st.integers(0, 1))
    b = build(bits, backend)
    pos = b.next_bit(value, start)
    assert pos == ref_next(bits, value, start)
    if pos is not None:
        assert pos >= start
        assert b.get(pos) == value
        assert all(bits[i] != value for i in range(start, pos))


@given(bits=bit_lists, backend=backends, value=st.integers(0, 1))
@settings(max_examples=150, deadline=None)
def test_last_matches_reference_and_next_iteration(bits, backend, value):
    b = build(bits, backend)
    assert b.last_bit(value) == ref_last(bits, value)
    # the last occurrence is the fixpoint of iterating next
    seen = None
    pos = b.next_bit(value, 0)
    while pos is not None:
        seen = pos
        pos = b.next_bit(value, pos + 1)
    assert seen == b.last_bit(value)


@given(bits=bit_lists, backend=backends, value=st.integers(0, 1))
@settings(max_examples=100, deadline=None)
def test_cursor_agrees_with_point_queries(bits, backend, value):
    b = build(bits, backend)
    cursor = b.cursor(value)
    pos = 0
    while True:
        hit = cursor.next_from(pos)
        assert hit == ref_next(bits, value, pos)
        if hit is None:
            break
        assert cursor.absolute == hit
        pos = hit + 1
        if pos > len(bits):
            break


# -- raw backend specifics ----------------------------------------------------------


def test_raw_padding_is_canonical():
    b = RawBitmap.from_bits([1] * 70)
    words = list(b.words())
    assert len(words) == 2
    assert words[1] >> (70 - 64) == 0  # bits past the length stay zero
    c = b.not_()
    assert all(word >> 64 == 0 for word in c.words())
    assert list(c.words())[1] == 0


def test_raw_word_payload():
    assert RawBitmap().add_many(0, 640).payload_bytes() == 80
