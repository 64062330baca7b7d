"""Shared test helpers: reference models and random structure generators."""

from __future__ import annotations

import random
from typing import List, Optional

import pytest

from ltlbit.bitmaps import BACKENDS
from ltlbit.formulas import (And, Atom, Finally, Formula, Globally, Implies,
                             Next, Not, Or, Until)

ALL_BACKENDS = sorted(BACKENDS)


@pytest.fixture(params=ALL_BACKENDS)
def backend(request):
    return request.param


# -- reference bit-list model -----------------------------------------------------


def ref_next(bits: List[int], value: int, start: int) -> Optional[int]:
    for i in range(start, len(bits)):
        if bits[i] == value:
            return i
    return None


def ref_last(bits: List[int], value: int) -> Optional[int]:
    for i in range(len(bits) - 1, -1, -1):
        if bits[i] == value:
            return i
    return None


def ref_until(a: List[int], b: List[int]) -> List[int]:
    out = [0] * len(a)
    carry = 0
    for i in range(len(a) - 1, -1, -1):
        out[i] = 1 if (b[i] or (a[i] and carry)) else 0
        carry = out[i]
    return out


def random_bits(rng: random.Random, n: int, density: float) -> List[int]:
    return [1 if rng.random() < density else 0 for _ in range(n)]


def run_structured_bits(rng: random.Random, n: int, run: int) -> List[int]:
    out: List[int] = []
    while len(out) < n:
        out.extend([rng.randrange(2)] * run)
    return out[:n]


# -- random formulas ----------------------------------------------------------------

_BINARY = (And, Or, Implies, Until)
_UNARY = (Not, Next, Globally, Finally)


def random_formula(rng: random.Random, max_depth: int,
                   variables: List[str]) -> Formula:
    if max_depth == 0 or rng.random() < 0.25:
        return Atom(rng.choice(variables))
    if rng.random() < 0.5:
        cls = rng.choice(_UNARY)
        return cls(random_formula(rng, max_depth - 1, variables))
    cls = rng.choice(_BINARY)
    return cls(random_formula(rng, max_depth - 1, variables),
               random_formula(rng, max_depth - 1, variables))
