"""Parser, renderer, and metric tests for the formula layer."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_formula
from ltlbit.formulas import (And, Atom, Finally, FormulaSyntaxError, Globally,
                             Implies, Next, Not, Or, Until, depth, parse,
                             render, size)


def test_parse_examples():
    assert parse("G (p -> X q)") == Globally(Implies(Atom("p"), Next(Atom("q"))))
    assert parse("a U b U c") == Until(Atom("a"), Until(Atom("b"), Atom("c")))
    assert parse("!(s0) & s1") == And(Not(Atom("s0")), Atom("s1"))


def test_precedence_ladder():
    # tightest to loosest: unary, U, &, |, ->
    assert parse("!a U b") == Until(Not(Atom("a")), Atom("b"))
    assert parse("a U b & c") == And(Until(Atom("a"), Atom("b")), Atom("c"))
    assert parse("a & b | c") == Or(And(Atom("a"), Atom("b")), Atom("c"))
    assert parse("a | b -> c") == Implies(Or(Atom("a"), Atom("b")), Atom("c"))
    assert parse("a -> b -> c") == Implies(Atom("a"),
                                           Implies(Atom("b"), Atom("c")))
    assert parse("a & b & c") == And(And(Atom("a"), Atom("b")), Atom("c"))
    assert parse("a | b | c") == Or(Or(Atom("a"), Atom("b")), Atom("c"))
    assert parse("X G F ! p") == Next(Globally(Finally(Not(Atom("p")))))
    assert parse("GFp") == parse("G F p") == parse("G(F(p))")


def test_whitespace_insignificant():
    assert parse(" G ( p ->X q ) ") == parse("G(p->Xq)")


def test_reserved_letters_are_not_atoms():
    for letter in "XGFU":
        with pytest.raises(FormulaSyntaxError):
            parse(f"{letter} U {letter}")
    with pytest.raises(ValueError):
        Atom("U")
    # but identifiers merely containing them are fine
    assert parse("Gp U Xq") == Until(Atom("Gp"), Atom("Xq"))


@pytest.mark.parametrize("text,position", [
    ("G (p ->", 7),
    ("(p", 2),
    ("p & & q", 4),
    ("U p", 0),
    ("p q", 2),
    ("", 0),
    ("p @ q", 2),
])
def test_syntax_errors_carry_positions(text, position):
    with pytest.raises(FormulaSyntaxError) as info:
        parse(text)
    assert info.value.position == position


def test_size_examples():
    assert size(Atom("p")) == 1
    assert size(parse("!s0")) == 1
    assert size(parse("G (!s0)")) == 2
    assert size(parse("G ((!s1) | (s2 | ((!s2) U (s0 & (!s2)))))")) == 8


def test_depth_examples():
    assert depth(Atom("p")) == 0
    assert depth(parse("X s0")) == 1
    assert depth(parse("G ((!s1) | (G (!s0)))")) == 4


@given(st.data())
@settings(max_examples=300, deadline=None)
def test_parse_render_roundtrip(data):
    seed = data.draw(st.integers(0, 2 ** 32))
    rng = random.Random(seed)
    formula = random_formula(rng, max_depth=8, variables=["p", "q", "r", "s_1"])
    assert parse(render(formula)) == formula


@given(st.data())
@settings(max_examples=100, deadline=None)
def test_metrics_are_structural(data):
    seed = data.draw(st.integers(0, 2 ** 32))
    rng = random.Random(seed)
    f = random_formula(rng, max_depth=6, variables=["p", "q"])
    g = random_formula(rng, max_depth=6, variables=["p", "q"])
    assert size(And(f, g)) == _ops(f) + _ops(g) + 1
    assert depth(And(f, g)) == 1 + max(depth(f), depth(g))
    assert depth(Not(f)) == depth(f) + 1


def _ops(f):
    return 0 if isinstance(f, Atom) else size(f)
