"""Convexity of the joint range of two quadratic functions.

The joint range of a pair of quadratics ``f, g`` on R^n is the planar set
``{(f(x), g(x)) : x in R^n}``.  This package decides whether that set is
convex, and when it is not, produces a checkable certificate: a level of one
function whose level set is split into two nonempty open pieces by a level
set of the other, together with two concrete points exhibiting the split and
the midpoint of their range images that the range misses.

Main entry points:

* :func:`check_convexity` — verdict plus certificate and decision trail.
* :func:`check_flores_bazan` — independent verdict via a direction criterion.
* :func:`cross_check` — run both and compare.
* :func:`level_pair_separation` — the two-way separation test at fixed levels.
* :func:`sample_range` / :func:`detect_holes` — sampling oracle.
* :func:`run_curated_suite` — re-derive the bundled reference instances.
"""

from .convexity import (
    VERDICT_CONVEX,
    VERDICT_NONCONVEX,
    ConvexityCertificate,
    CrossCheckResult,
    FBReport,
    NonconvexityWitness,
    check_convexity,
    check_flores_bazan,
    cross_check,
    verify_certificate,
)
from .errors import (
    AsymmetricInput,
    ConvergenceFailure,
    DegenerateCloud,
    DimensionMismatch,
    InvalidInstance,
    InvalidReport,
    IoFailure,
    NotReducible,
    OutOfRange,
    QRangeError,
    RootFailure,
    ZeroMatrix,
    ZeroVector,
)
from .instances import (
    CuratedCase,
    SuiteRow,
    case_file_document,
    curated_cases,
    evaluate_case,
    get_case,
    run_curated_suite,
    suite_passed,
)
from .quadratic import (
    ProblemInstance,
    QuadraticFunction,
    ToleranceSet,
    compose_affine,
    evaluate,
    evaluate_many,
    homogeneous_part,
    linear_combination,
    load_problem,
    make_quadratic,
    problem_from_dict,
    problem_to_dict,
    save_problem,
)
from .range_oracle import (
    HoleReport,
    RangeSample,
    SampleMode,
    detect_holes,
    domain_points,
    emit_plot_data,
    sample_range,
)
from .separation import (
    AffineForm,
    LevelPairReport,
    LevelSearchResult,
    SeparationReport,
    SeparationWitness,
    affine_separates_quadratic,
    combination_affine_form,
    construct_separation_witness,
    exists_separating_affine_levels,
    level_pair_separation,
)
from .spectral import (
    Inertia,
    PsdClass,
    SpectralData,
    apply_pseudoinverse,
    eigh,
    inertia,
    null_space_basis,
    pencil_dependence,
    psd_check,
    range_membership,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # verdicts and reports
    "VERDICT_CONVEX",
    "VERDICT_NONCONVEX",
    "ConvexityCertificate",
    "CrossCheckResult",
    "FBReport",
    "NonconvexityWitness",
    "check_convexity",
    "check_flores_bazan",
    "cross_check",
    "verify_certificate",
    # problem data
    "ProblemInstance",
    "QuadraticFunction",
    "ToleranceSet",
    "compose_affine",
    "evaluate",
    "evaluate_many",
    "homogeneous_part",
    "linear_combination",
    "load_problem",
    "make_quadratic",
    "problem_from_dict",
    "problem_to_dict",
    "save_problem",
    # separation machinery
    "AffineForm",
    "LevelPairReport",
    "LevelSearchResult",
    "SeparationReport",
    "SeparationWitness",
    "affine_separates_quadratic",
    "combination_affine_form",
    "construct_separation_witness",
    "exists_separating_affine_levels",
    "level_pair_separation",
    # spectral helpers
    "Inertia",
    "PsdClass",
    "SpectralData",
    "apply_pseudoinverse",
    "eigh",
    "inertia",
    "null_space_basis",
    "pencil_dependence",
    "psd_check",
    "range_membership",
    # sampling oracle
    "HoleReport",
    "RangeSample",
    "SampleMode",
    "detect_holes",
    "domain_points",
    "emit_plot_data",
    "sample_range",
    # curated instances
    "CuratedCase",
    "SuiteRow",
    "case_file_document",
    "curated_cases",
    "evaluate_case",
    "get_case",
    "run_curated_suite",
    "suite_passed",
    # errors
    "QRangeError",
    "AsymmetricInput",
    "ConvergenceFailure",
    "DegenerateCloud",
    "DimensionMismatch",
    "InvalidInstance",
    "InvalidReport",
    "IoFailure",
    "NotReducible",
    "OutOfRange",
    "RootFailure",
    "ZeroMatrix",
    "ZeroVector",
]
