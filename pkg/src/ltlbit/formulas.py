"""LTL formula representation, text syntax, and structural metrics.

Concrete syntax::

    atom      ::=  identifier            (not one of the operator letters)
    unary     ::=  '!' | 'X' | 'G' | 'F'
    formula   ::=  unary formula | formula 'U' formula
                |  formula '&' formula | formula '|' formula
                |  formula '->' formula | '(' formula ')' | atom

Binding strength, tightest first: unary, ``U``, ``&``, ``|``, ``->``.
``U`` and ``->`` associate to the right, ``&`` and ``|`` to the left.
Whitespace is insignificant.  ``X``, ``G``, ``F`` and ``U`` are reserved and
cannot be atom names.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Union

RESERVED = {"X", "G", "F", "U"}

_ATOM_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_TOKEN_RE = re.compile(r"\s*(->|[A-Za-z_][A-Za-z0-9_]*|[!&|()])")


class FormulaSyntaxError(ValueError):
    """Parse failure; ``position`` is the character offset in the input."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


@dataclass(frozen=True)
class Atom:
    name: str

    def __post_init__(self):
        if not _ATOM_RE.fullmatch(self.name) or self.name in RESERVED:
            raise ValueError(f"invalid atom name {self.name!r}")


@dataclass(frozen=True)
class Not:
    child: "Formula"


@dataclass(frozen=True)
class Next:
    child: "Formula"


@dataclass(frozen=True)
class Globally:
    child: "Formula"


@dataclass(frozen=True)
class Finally:
    child: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Until:
    left: "Formula"
    right: "Formula"


Formula = Union[Atom, Not, Next, Globally, Finally, And, Or, Implies, Until]

_UNARY = {"!": Not, "X": Next, "G": Globally, "F": Finally}


def atoms(formula: Formula) -> Iterator[str]:
    """Atom names in first-occurrence order (may repeat)."""
    if isinstance(formula, Atom):
        yield formula.name
    elif isinstance(formula, (Not, Next, Globally, Finally)):
        yield from atoms(formula.child)
    else:
        yield from atoms(formula.left)
        yield from atoms(formula.right)


def size(formula: Formula) -> int:
    """Number of operators and connectives.

    A bare atom counts as 1 so that the metric never reports an empty
    formula; atoms under an operator contribute nothing.
    """
    if isinstance(formula, Atom):
        return 1
    return _operator_count(formula)


def _operator_count(formula: Formula) -> int:
    if isinstance(formula, Atom):
        return 0
    if isinstance(formula, (Not, Next, Globally, Finally)):
        return 1 + _operator_count(formula.child)
    return 1 + _operator_count(formula.left) + _operator_count(formula.right)


def depth(formula: Formula) -> int:
    """Maximum operator-nesting depth; atoms are depth 0."""
    if isinstance(formula, Atom):
        return 0
    if isinstance(formula, (Not, Next, Globally, Finally)):
        return 1 + depth(formula.child)
    return 1 + max(depth(formula.left), depth(formula.right))


# -- parsing ------------------------------------------------------------------


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.token: str | None = None
        self.token_pos = 0
        self._advance()

    def _advance(self) -> None:
        match = _TOKEN_RE.match(self.text, self.pos)
        if match is None:
            rest = self.text[self.pos:].lstrip()
            if rest:
                raise FormulaSyntaxError(
                    f"unexpected character {rest[0]!r}",
                    len(self.text) - len(rest),
                )
            self.token = None
            self.token_pos = len(self.text)
            return
        self.token = match.group(1)
        self.token_pos = match.start(1)
        self.pos = match.end()

    def parse(self):
        node = self.implication()
        if self.token is not None:
            raise FormulaSyntaxError(
                f"unexpected token {self.token!r}", self.token_pos
            )
        return node

    def implication(self):
        left = self.disjunction()
        if self.token == "->":
            self._advance()
            return Implies(left, self.implication())
        return left

    def disjunction(self):
        node = self.conjunction()
        while self.token == "|":
            self._advance()
            node = Or(node, self.conjunction())
        return node

    def conjunction(self):
        node = self.until()
        while self.token == "&":
            self._advance()
            node = And(node, self.until())
        return node

    def until(self):
        left = self.unary()
        if self.token == "U":
            self._advance()
            return Until(left, self.until())
        return left

    def unary(self):
        token = self.token
        if token in _UNARY:
            self._advance()
            return _UNARY[token](self.unary())
        if token == "(":
            self._advance()
            node = self.implication()
            if self.token != ")":
                raise FormulaSyntaxError("expected ')'", self.token_pos)
            self._advance()
            return node
        if token is None:
            raise FormulaSyntaxError("unexpected end of input", self.token_pos)
        if _ATOM_RE.fullmatch(token) and token not in RESERVED:
            self._advance()
            return Atom(token)
        raise FormulaSyntaxError(f"unexpected token {token!r}", self.token_pos)


def parse(text: str) -> Formula:
    """Parse the text syntax described in the module docstring."""
    return _Parser(text).parse()


# -- rendering ---------------------------------------------------------------

# binding strength of each node kind; parenthesise a child when it binds
# more loosely than its parent (or equally, on the disfavoured side)
_LEVEL = {
    Implies: 1,
    Or: 2,
    And: 3,
    Until: 4,
    Not: 5,
    Next: 5,
    Globally: 5,
    Finally: 5,
    Atom: 6,
}

_SYMBOL = {Not: "!", Next: "X", Globally: "G", Finally: "F",
           And: "&", Or: "|", Implies: "->", Until: "U"}


def render(formula: Formula) -> str:
    """Canonical text form; ``parse(render(f)) == f`` for every formula."""
    if isinstance(formula, Atom):
        return formula.name
    level = _LEVEL[type(formula)]
    symbol = _SYMBOL[type(formula)]
    if isinstance(formula, (Not, Next, Globally, Finally)):
        child = _wrap(formula.child, level)
        space = "" if child.startswith("(") or symbol == "!" else " "
        return f"{symbol}{space}{child}"
    if isinstance(formula, (Implies, Until)):
        # right-associative: the left child needs parens at equal level
        left = _wrap(formula.left, level + 1)
        right = _wrap(formula.right, level)
        return f"{left} {symbol} {right}"
    left = _wrap(formula.left, level)
    right = _wrap(formula.right, level + 1)
    return f"{left} {symbol} {right}"


def _wrap(formula: Formula, minimum: int) -> str:
    text = render(formula)
    if _LEVEL[type(formula)] < minimum:
        return f"({text})"
    return text
