"""Predimension calculus and strong amalgamation over 3-sorted incidence
graphs, with a generic-model builder and certificate-producing checkers."""

from .amalgam import (
    AmalgamResult,
    MuPolicy,
    PairOverBase,
    amalgamate,
    check_Kmu,
    chi,
    classify_extension,
    decompose_minimal,
    enumerate_copies,
    free_amalgam,
    mu_value,
    pair_core,
)
from .builder import (
    AmpleReport,
    BuilderState,
    ample_check,
    build,
    extract_flag_residue,
    seed_flag,
    verify_Tmu,
)
from .config import Budgets, RunConfig, StrongnessMode, Verdict
from .graph import Embedding, Sort, TriGraph, canonical_code, parse_graph
from .kclass import GeometryReport, KCertificate, check_K, check_geometry, in_K
from .kernels import BACKEND
from .predim import (
    closure,
    d_independent,
    d_rel,
    d_value,
    delta,
    delta1,
    delta_rel,
    is_L_strong,
    is_algebraic,
    is_k_strong,
    is_strong,
)

__version__ = "0.1.0"

__all__ = [
    "AmalgamResult",
    "AmpleReport",
    "BACKEND",
    "Budgets",
    "BuilderState",
    "Embedding",
    "GeometryReport",
    "KCertificate",
    "MuPolicy",
    "PairOverBase",
    "RunConfig",
    "Sort",
    "StrongnessMode",
    "TriGraph",
    "Verdict",
    "amalgamate",
    "ample_check",
    "build",
    "canonical_code",
    "check_K",
    "check_Kmu",
    "check_geometry",
    "chi",
    "classify_extension",
    "closure",
    "d_independent",
    "d_rel",
    "d_value",
    "decompose_minimal",
    "delta",
    "delta1",
    "delta_rel",
    "enumerate_copies",
    "extract_flag_residue",
    "free_amalgam",
    "in_K",
    "is_L_strong",
    "is_algebraic",
    "is_k_strong",
    "is_strong",
    "mu_value",
    "pair_core",
    "parse_graph",
    "seed_flag",
    "verify_Tmu",
]
