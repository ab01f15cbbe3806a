"""Exact integer-programming gap analysis for binary-table margin matrices.

The package builds margin matrices of hierarchical models on binary
variables, solves the cell-entry programs exactly (rational LP, branch
and bound IP, fiber enumeration), computes Graver and reduced Groebner
bases of the associated lattices, enumerates standard pairs with
per-pair gap brackets, verifies the large-gap certificates of the
lifted families, and measures how rarely the large-gap margins occur
under random sampling.
"""

from .errors import (BudgetExceededError, FormatError, MargingapError,
                     VerificationError)
from .linalg import (LatticeElement, SullivantRelation, checkerboard,
                     delta_column, gamma_column, integer_kernel_basis,
                     is_circuit, lift_kernel_vector, rank, sullivant_relation)
from .models import (CellIndex, HierarchicalModel, MarginMatrix,
                     SimplicialComplex, as_rows, binary_model, build_complex,
                     build_named_model, cell_rank, cell_unrank, cells,
                     column_submatrix, delta_block_matrix, gamma_block_matrix,
                     lawrence_lift, logit, margin_matrix, margins_of)
from .rarity import (DimensionReport, RarityReport, SampleConfig,
                     dimension_report, rarity_run, sample_table)
from .rationals import QQ, format_q, parse_q
from .solvers import (CellBounds, GapReport, IPResult, LPResult, cell_bounds,
                      enumerate_fiber, fiber_nonempty, gap, solve_ip, solve_lp,
                      unit_cost)
from .stdpairs import (CertificateReport, PairGapEstimate, PairStatus,
                       StandardPair, classify_pair, enumerate_standard_pairs,
                       margin_membership, pair_gap, pair_survey,
                       verify_sullivant_certificates, w_vectors)
from .toric import (BasisSet, OrientedBinomial, TermOrder, gap_witnesses,
                    graver_basis, inter_reduce, is_optimal,
                    markov_entry_check, reduced_groebner, split_lawrence)

__version__ = "0.1.0"

__all__ = [
    "BudgetExceededError", "FormatError", "MargingapError", "VerificationError",
    "LatticeElement", "SullivantRelation", "checkerboard", "delta_column",
    "gamma_column", "integer_kernel_basis", "is_circuit", "lift_kernel_vector",
    "rank", "sullivant_relation",
    "CellIndex", "HierarchicalModel", "MarginMatrix", "SimplicialComplex",
    "as_rows", "binary_model", "build_complex", "build_named_model", "cell_rank",
    "cell_unrank", "cells", "column_submatrix", "delta_block_matrix",
    "gamma_block_matrix", "lawrence_lift", "logit", "margin_matrix",
    "margins_of",
    "DimensionReport", "RarityReport", "SampleConfig", "dimension_report",
    "rarity_run", "sample_table",
    "QQ", "format_q", "parse_q",
    "CellBounds", "GapReport", "IPResult", "LPResult", "cell_bounds",
    "enumerate_fiber", "fiber_nonempty", "gap", "solve_ip", "solve_lp",
    "unit_cost",
    "CertificateReport", "PairGapEstimate", "PairStatus", "StandardPair",
    "classify_pair", "enumerate_standard_pairs", "margin_membership",
    "pair_gap", "pair_survey", "verify_sullivant_certificates", "w_vectors",
    "BasisSet", "OrientedBinomial", "TermOrder", "gap_witnesses",
    "graver_basis", "inter_reduce", "is_optimal", "markov_entry_check",
    "reduced_groebner", "split_lawrence",
]
