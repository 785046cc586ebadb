"""Lie ideals of digraph algebras: exact construction, classification and verification."""

__version__ = "0.1.0"

from .algebra import DigraphAlgebra, Pattern, bracket, matrix_units, pi, read_pattern, validate_pattern
from .exactmat import Mat, Subspace, span
from .ideals import BlockIdeal, enumerate_offdiag_ideals, ideal_closure, is_associative_ideal
from .lie import (
    LieIdealDescriptor, classify_addend, decompose, describe, enumerate_descriptors, is_lie_ideal,
    lie_generate, maximal_addend,
)
from .similarity import check_similarity_invariance, conjugate, factor_dn, telescoping_conjugation

__all__ = [
    "BlockIdeal", "DigraphAlgebra", "LieIdealDescriptor", "Mat", "Pattern", "Subspace",
    "bracket", "check_similarity_invariance", "classify_addend", "conjugate", "decompose", "describe",
    "enumerate_descriptors", "enumerate_offdiag_ideals", "factor_dn", "ideal_closure",
    "is_associative_ideal", "is_lie_ideal", "lie_generate", "matrix_units", "maximal_addend", "pi",
    "read_pattern", "span", "telescoping_conjugation", "validate_pattern",
]
