"""Per-position ground-truth evaluator used to test the bitmap path.

Evaluates a formula on every suffix of a trace by direct recursion on the
finite-trace satisfaction rules, with no bitmap machinery whatsoever: the
next operator looks at position i+1 (false on the last event), globally
checks every remaining position, eventually searches for a witness, and
until searches for a witness position whose prefix keeps the left operand
true.  Results are memoised per (subformula, position) so that deeply nested
temporal operators stay affordable, but each value still comes straight from
the defining rule.
"""

from __future__ import annotations

from typing import Dict, List, Sequence, Tuple

from .formulas import (And, Atom, Finally, Formula, Globally, Implies, Next,
                       Not, Or, Until)


class UnboundAtomError(KeyError):
    def __init__(self, name: str):
        super().__init__(name)
        self.name = name

    def __str__(self):
        return f"formula references unbound atom {self.name!r}"


def oracle_bits(formula: Formula, columns: Dict[str, Sequence[int]],
                length: int) -> List[int]:
    """Suffix-satisfaction bits: out[i] == 1 iff the suffix at i satisfies.

    ``columns`` maps each atom name to its per-event truth values.
    """
    memo: Dict[Tuple[int, int], bool] = {}

    def holds(node: Formula, i: int) -> bool:
        key = (id(node), i)
        cached = memo.get(key)
        if cached is not None:
            return cached
        if isinstance(node, Atom):
            try:
                value = bool(columns[node.name][i])
            except KeyError:
                raise UnboundAtomError(node.name) from None
        elif isinstance(node, Not):
            value = not holds(node.child, i)
        elif isinstance(node, And):
            value = holds(node.left, i) and holds(node.right, i)
        elif isinstance(node, Or):
            value = holds(node.left, i) or holds(node.right, i)
        elif isinstance(node, Implies):
            value = (not holds(node.left, i)) or holds(node.right, i)
        elif isinstance(node, Next):
            value = i + 1 < length and holds(node.child, i + 1)
        elif isinstance(node, Globally):
            value = all(holds(node.child, j) for j in range(i, length))
        elif isinstance(node, Finally):
            value = any(holds(node.child, j) for j in range(i, length))
        elif isinstance(node, Until):
            value = any(
                holds(node.right, j)
                and all(holds(node.left, k) for k in range(i, j))
                for j in range(i, length)
            )
        else:
            raise TypeError(f"not a formula node: {node!r}")
        memo[key] = value
        return value

    return [1 if holds(formula, i) else 0 for i in range(length)]


def empty_trace_verdict(formula: Formula) -> bool:
    """Satisfaction of the zero-event trace, by structural recursion.

    Globally holds vacuously; next, eventually and until have no position to
    point at; an atom has no event 0 to witness it and is taken as false.
    """
    if isinstance(formula, Atom):
        return False
    if isinstance(formula, Not):
        return not empty_trace_verdict(formula.child)
    if isinstance(formula, And):
        return (empty_trace_verdict(formula.left)
                and empty_trace_verdict(formula.right))
    if isinstance(formula, Or):
        return (empty_trace_verdict(formula.left)
                or empty_trace_verdict(formula.right))
    if isinstance(formula, Implies):
        return ((not empty_trace_verdict(formula.left))
                or empty_trace_verdict(formula.right))
    if isinstance(formula, Globally):
        return True
    if isinstance(formula, (Next, Finally, Until)):
        return False
    raise TypeError(f"not a formula node: {formula!r}")
