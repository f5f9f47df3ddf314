"""Unit groups of quaternion orders over F_q[T] acting on the Bruhat-Tits tree.

Builds the quotient graph of the action, reads off an explicit generating
set and rewrites units as words in it.
"""

from .base_algebra import FqConfig, Poly, format_poly, parse_poly, parse_poly_list
from .generators import GeneratorSet, Word, generating_set, reduce_word, theorem_bound_check
from .quaternion import AlgebraData, QuatOrderElem, UnitElem, build_algebra, embed
from .quotient import QuotientGraph, build_quotient, find_unit_mapping, stabilizer
from .tree import ORIGIN, TreeVertex, act_elem, distance, normalize

__all__ = [
    "AlgebraData", "FqConfig", "GeneratorSet", "ORIGIN", "Poly", "QuatOrderElem",
    "QuotientGraph", "TreeVertex", "UnitElem", "Word", "act_elem", "build_algebra",
    "build_quotient", "distance", "embed", "find_unit_mapping", "format_poly",
    "generating_set", "normalize", "parse_poly", "parse_poly_list", "reduce_word",
    "stabilizer", "theorem_bound_check",
]
