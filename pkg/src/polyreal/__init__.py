"""Realizing simplicial spheres as (inscribed) polytopes, with exact certificates."""

from .certify import BfpCertificate, bfp, certify_nonrealizable, complete, gp_propagate, verify_certificate
from .core import (
    Chirotope,
    NumericConfiguration,
    RationalConfiguration,
    check_axioms,
    chirotope_of_points,
    facets_of,
    is_k_neighborly,
    is_matroid_polytope,
)
from .exact import RationalizationParams, VerificationReport, rationalize_config, rationalize_on_sphere, verify
from .pipeline import ClassifyOptions, LedgerRecord, classify, realize, replay, run_batch
from .solver import Budget, FeasibilityProblem, build_face_system, build_full_system, solve_feasibility
from .sphere import PartialChirotope, SimplicialSphere, f_vector, load_sphere, partial_from_sphere, tuples_with_face

__version__ = "0.1.0"

__all__ = [
    "BfpCertificate",
    "Budget",
    "Chirotope",
    "ClassifyOptions",
    "FeasibilityProblem",
    "LedgerRecord",
    "NumericConfiguration",
    "PartialChirotope",
    "RationalConfiguration",
    "RationalizationParams",
    "SimplicialSphere",
    "VerificationReport",
    "bfp",
    "build_face_system",
    "build_full_system",
    "certify_nonrealizable",
    "check_axioms",
    "chirotope_of_points",
    "classify",
    "complete",
    "f_vector",
    "facets_of",
    "gp_propagate",
    "is_k_neighborly",
    "is_matroid_polytope",
    "load_sphere",
    "partial_from_sphere",
    "rationalize_config",
    "rationalize_on_sphere",
    "realize",
    "replay",
    "run_batch",
    "solve_feasibility",
    "tuples_with_face",
    "verify",
    "verify_certificate",
]
