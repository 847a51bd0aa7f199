"""Exact experiments with word maps on finite matrix groups."""

__version__ = "0.1.0"

from .ff import FieldElement, FieldSpec, field_make, field_of_order
from .grp import GroupElement, MatrixGroup, PSL2, SL2, SL3, make_group, parse_group, suzuki_point
from .word import Word, commutator, evaluate, get_law, parse_word, sequence_word
from .trace import Poly, compile_trace2, dickson

__all__ = [
    "FieldElement", "FieldSpec", "field_make", "field_of_order",
    "GroupElement", "MatrixGroup", "PSL2", "SL2", "SL3", "make_group", "parse_group",
    "suzuki_point", "Word", "commutator", "evaluate", "get_law", "parse_word",
    "sequence_word", "Poly", "compile_trace2", "dickson",
]
