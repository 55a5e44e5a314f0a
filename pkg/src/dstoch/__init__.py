"""Exact analysis of semigroups generated by doubly stochastic matrices."""

from .exact import (
    DSMatrix,
    GeneratorSet,
    Partition,
    Permutation,
    SimplexVector,
    SubsetPair,
    averaging,
    averaging_over,
    canonical_key,
    ds_from_rows,
    multiply,
    permutation_matrix,
)

__all__ = [
    "DSMatrix",
    "GeneratorSet",
    "Partition",
    "Permutation",
    "SimplexVector",
    "SubsetPair",
    "averaging",
    "averaging_over",
    "canonical_key",
    "ds_from_rows",
    "multiply",
    "permutation_matrix",
]
