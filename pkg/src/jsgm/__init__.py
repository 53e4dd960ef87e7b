"""Godsil-McKay switching in unions of classes of the Johnson scheme."""

from .combin import KSubset, binom, intersection_size, rank, unrank
from .graph import (
    BudgetExceeded,
    Graph,
    JohnsonOracle,
    JohnsonSpec,
    build_johnson,
    complement,
    parse_spec,
    reflect,
)
from .invariants import exact_iso, noniso_certificate, pattern_census
from .spectra import DEFAULT_PRIMES, char_poly_mod, cospectral
from .switching import (
    SwitchingPartition,
    apply_switch,
    family_A,
    family_B,
    johnson_multiblock,
    k2prefix_counts,
    k2prefix_predicate,
    multiblock_generalization_check,
    predict_lambda_A,
    predict_lambda_B,
    validate_partition,
)

__version__ = "0.1.0"

__all__ = [
    "KSubset",
    "binom",
    "intersection_size",
    "rank",
    "unrank",
    "BudgetExceeded",
    "Graph",
    "JohnsonOracle",
    "JohnsonSpec",
    "build_johnson",
    "complement",
    "parse_spec",
    "reflect",
    "exact_iso",
    "noniso_certificate",
    "pattern_census",
    "DEFAULT_PRIMES",
    "char_poly_mod",
    "cospectral",
    "SwitchingPartition",
    "apply_switch",
    "family_A",
    "family_B",
    "johnson_multiblock",
    "k2prefix_counts",
    "k2prefix_predicate",
    "multiblock_generalization_check",
    "predict_lambda_A",
    "predict_lambda_B",
    "validate_partition",
]
