"""Built-in benchmark formula corpus.

Three groups over the state variables s0..s9: the "A" entries exercise one
operator each, the "D" entries are classical temporal specification patterns,
and the "S" entries are randomly generated stress formulas.  D04/D05 are
intentionally identical twins in the source material and are kept as such.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Tuple

from .formulas import Formula, parse

_CORPUS_TEXT: Tuple[Tuple[str, str], ...] = (
    ("A1", "!(s0)"),
    ("A2", "(s0) & (s1)"),
    ("A3", "(s0) | (s1)"),
    ("A4", "X (s0)"),
    ("A5", "G (s0)"),
    ("A6", "F (s0)"),
    ("A7", "(s0) U (s1)"),
    ("D01", "G (!s0)"),
    ("D02", "((!s0) U s2) | (G (!s2))"),
    ("D03", "G ((!s1) | (G (!s0)))"),
    ("D04", "G ((!s1) | ((!s0) U s2))"),
    ("D05", "G ((!s1) | ((!s0) U s2))"),
    ("D06", "F s0"),
    ("D07", "(G (!s1)) | (F (s1 | (F s0)))"),
    ("D08", "G ((!s1) | (s2 | ((!s2) U (s0 & (!s2)))))"),
    ("D09", "(!s0) U (s0 U ((!s0) U (s0 U (G (!s0)))))"),
    ("D10", "(G (!s2)) | (((!s0) & (!s2)) U ((s0 & (!s2)) U (((!s0) & (!s2))"
            " U ((s0 & (!s2)) U ((!s0) U s2)))))"),
    ("D11", "(!s1) U (s1 & ((!s0) U (s0 U ((!s0) U (s0 U (G (!s0)))))))"),
    ("D14", "G s0"),
    ("D15", "(s0 U s2) | (G (!s2))"),
    ("D16", "G ((!s1) | (G s0))"),
    ("D17", "G ((!s1) | ((s0 U s2) | (G (!s2))))"),
    ("D18", "G ((!s1) | (s0 U s2))"),
    ("D19", "(!s0) U s3"),
    ("D20", "((!s0) U (s2 | s3)) | (G (!s2))"),
    ("D21", "(G (!s1)) | (F (s1 & ((!s0) U s3)))"),
    ("D22", "G ((!s1) | (((!s0) U (s2 | s3)) | (G (!s2))))"),
    ("D23", "G ((!s1) | ((!s0) U (s2 | s3)))"),
    ("D24", "G ((!s0) | (F s3))"),
    ("D25", "(((!s0) | ((!s2) U ((!s2) & s3))) U s2) | (G (!s2))"),
    ("D26", "G ((!s1) | (G ((!s0) | (F s3))))"),
    ("D27", "G (((!s1) | ((!s0) | ((!s2) U ((!s2) & s3)))) | (G (!s2)))"),
    ("D28", "G ((!s1) | (((!s0) | ((!s2) U ((!s2) & s3))) U s2))"),
    ("D29", "((!s0) U (s2 | ((!s0) & (s3 & (X ((!s0) U s4)))))) | (G (!s2))"),
    ("D31", "G ((!s1) | ((!s0) U (s2 | ((!s0) & (s3 & (X ((!s0) U s4)))))))"),
    ("D32", "((!s3) U s0) | (G ((!s3) | (X (G (!s4)))))"),
    ("D33", "(G (!s2)) | ((s2 | ((!s3) | (X ((!s4) U s2)))) U (s0 | s2))"),
    ("D34", "(!s1) U (s1 & (((!s3) U s0) | (G ((!s3) | (X (G (!s4)))))))"),
    ("D37", "G ((!s3) | (X ((F (s4 & (F s0))) | (G (!s4)))))"),
    ("D38", "G ((!s1) | (G ((!s3) | (X ((!s4) U (s4 & (F s0)))))))"),
    ("D39", "G ((!s0) | (F (s3 & (X (F s4)))))"),
    ("D40", "G ((!s1) | (G ((!s0) | (s3 & (X (F s4))))))"),
    ("D41", "G ((!s0) | (F (s3 & ((!s5) & (X ((!s5) U s4))))))"),
    ("D42", "G ((!s1) | (G ((!s0) | (s3 & ((!s5) & (X ((!s5) U s4)))))))"),
    ("S01", "(!(X (X ((G s5) & (X ((!s0) | s3)))))) ->"
            " ((X s8) & (X (s8 -> s4)))"),
    ("S02", "((X (s6 -> s1)) & ((!s6) -> ((!(X (X (G (F (s1 & s2)))))) -> s5)))"
            " | (F ((G (F (X s6))) ->"
            " ((!(s2 | s6)) -> (s4 | (G (!s0))))))"),
    ("S03", "F ((!(s3 | s9)) U (s5 | s6))"),
    ("S04", "(s3 U s2) U s6"),
    ("S05", "s5 | (((G (F s6)) -> (!(X (F s6)))) U ((F s6) -> (X s6)))"),
    ("S06", "(!s9) & ((G s4) & ((X (F ((s7 | (G s7)) & (F (G s0))))) U"
            " (X (X (s7 U ((s0 -> (!s1)) & (s3 | (s7 & (!(X s9))))))))))"),
    ("S07", "(G (!(F s3))) U ((F s6) |"
            " ((((X s7) -> (F (!s2))) | (X (X (X s6)))) -> (G s7)))"),
    ("S08", "F (s7 & ((G (F ((X (!(s3 U s4))) | ((G s8) U (!s1))))) |"
            " (s3 U (s7 U s1))))"),
    ("S09", "(!(G ((((G (F (G s0))) U (s2 U s9)) U (!(X s0))) U s7)))"
            " -> (F (!s4))"),
    ("S10", "(!((X (G s2)) U (G (X (F (X (X s1))))))) &"
            " (s0 | (X (X (X s3))))"),
    ("S11", "X ((!s0) & (s4 U s2))"),
    ("S12", "(X (G (X (X (((G (!(G (s1 | s4)))) U (F (s1 & s6))) ->"
            " (X ((X (s0 & s7)) U s4))))))) -> ((!s3) & (s5 U s2))"),
    ("S13", "X ((s9 & (s1 | (!s6))) -> (s4 | (!(X s5))))"),
)


@dataclass(frozen=True)
class CorpusEntry:
    id: str
    text: str
    formula: Formula


class FormulaCorpus:
    """Ordered, id-addressable collection of benchmark formulas."""

    def __init__(self, entries: List[CorpusEntry]):
        self.entries = entries
        self._by_id: Dict[str, CorpusEntry] = {e.id: e for e in entries}
        if len(self._by_id) != len(entries):
            raise ValueError("duplicate formula ids in corpus")

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def ids(self) -> List[str]:
        return [e.id for e in self.entries]

    def __contains__(self, formula_id: str) -> bool:
        return formula_id in self._by_id

    def get(self, formula_id: str) -> CorpusEntry:
        try:
            return self._by_id[formula_id]
        except KeyError:
            raise KeyError(f"no corpus formula with id {formula_id!r}") from None


@lru_cache(maxsize=1)
def corpus() -> FormulaCorpus:
    """The full built-in corpus, parsed and validated."""
    return FormulaCorpus(
        [CorpusEntry(fid, text, parse(text)) for fid, text in _CORPUS_TEXT]
    )
