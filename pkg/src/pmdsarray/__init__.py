"""Partial-MDS array codes with efficient single-node repair."""
from .gf import FieldElement, FieldSpec, SubgroupSpec, field_new, find_subgroup
from .matrix import BlockMatrix, DenseMatrix, Diagonal, cv_det, det, expand, rank, solve
from .pmds import (
    CodeInstance,
    CodeSpec,
    StripeState,
    Unrecoverable,
    assemble,
    build,
    build_c2,
    build_c3,
    build_c4,
)
from .verify import PatternReport, oracle_suite, verify_local_mds, verify_pmds

__all__ = [
    "BlockMatrix", "CodeInstance", "CodeSpec", "DenseMatrix", "Diagonal", "FieldElement",
    "FieldSpec", "PatternReport", "StripeState", "SubgroupSpec", "Unrecoverable", "assemble",
    "build", "build_c2", "build_c3", "build_c4", "cv_det", "det", "expand", "field_new",
    "find_subgroup", "oracle_suite", "rank", "solve", "verify_local_mds", "verify_pmds",
]
