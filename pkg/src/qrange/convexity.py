"""Convexity of the joint range of two quadratics, with certificates.

The joint range of ``(f, g)`` is ``{(f(x), g(x)) : x in R^n}``.  Two
independent decision procedures are provided:

* :func:`check_convexity` — the separation path.  The range is nonconvex
  exactly when some level set of one function separates a level set of the
  other, which (after reducing the pencil) collapses to the affine-separation
  conditions of :mod:`qrange.separation`.  On a NONCONVEX verdict it builds a
  full certificate: concrete levels, two attained range points, and the
  unattained point between them.

* :func:`check_flores_bazan` — an independent direction-based criterion,
  phrased through a direction ``d`` in range space that the homogeneous
  range must avoid.  For a dependent pencil only two candidate directions
  (up to positive scaling) can qualify, so the check is finite.

:func:`cross_check` runs both and reports agreement; they are algebraically
equivalent, so a mismatch indicates a tolerance or implementation bug rather
than a property of the input.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from .errors import InvalidReport
from .quadratic import ProblemInstance, QuadraticFunction, ToleranceSet, evaluate
from .separation import (
    AffineForm,
    affine_separates_quadratic,
    combination_affine_form,
    construct_separation_witness,
    exists_separating_affine_levels,
)
from .spectral import eigh, inertia, null_space_basis, pencil_dependence, range_membership

__all__ = [
    "VERDICT_CONVEX",
    "VERDICT_NONCONVEX",
    "NonconvexityWitness",
    "ConvexityCertificate",
    "FBReport",
    "CrossCheckResult",
    "check_convexity",
    "check_flores_bazan",
    "cross_check",
    "verify_certificate",
]

VERDICT_CONVEX = "CONVEX"
VERDICT_NONCONVEX = "NONCONVEX"


@dataclass(frozen=True, eq=False)
class NonconvexityWitness:
    """Certificate data for a nonconvex joint range.

    ``range_at_u`` and ``range_at_v`` are attained range points with the same
    first coordinate, and ``gap_point`` lies strictly between them on that
    vertical segment but is not attained — so the range fails convexity.
    """

    u: np.ndarray
    v: np.ndarray
    range_at_u: np.ndarray
    range_at_v: np.ndarray
    gap_point: np.ndarray

    def to_jsonable(self) -> dict[str, Any]:
        return {
            "u": self.u.tolist(),
            "v": self.v.tolist(),
            "range_at_u": self.range_at_u.tolist(),
            "range_at_v": self.range_at_v.tolist(),
            "gap_point": self.gap_point.tolist(),
        }


@dataclass(frozen=True, eq=False)
class ConvexityCertificate:
    """Verdict plus the full decision path that produced it.

    ``path`` is an ordered list of JSON-ready records, one per decision the
    algorithm took.  When ``swapped`` is true the analysis ran on the swapped
    pair ``(g, f)`` (needed when ``f`` alone is affine); ``pencil_ratio`` and
    ``orientation`` refer to the swapped pair, while the witness's range
    points and ``gap_point`` — and ``f_level``/``g_level`` — are reported in
    the original coordinate order.
    """

    verdict: str
    swapped: bool
    pencil_ratio: float | None
    orientation: int | None
    f_level: float | None
    g_level: float | None
    witness: NonconvexityWitness | None
    path: tuple[dict[str, Any], ...]

    def to_jsonable(self) -> dict[str, Any]:
        return {
            "verdict": self.verdict,
            "swapped": self.swapped,
            "pencil_ratio": self.pencil_ratio,
            "orientation": self.orientation,
            "f_level": self.f_level,
            "g_level": self.g_level,
            "witness": self.witness.to_jsonable() if self.witness else None,
            "path": list(self.path),
        }


@dataclass(frozen=True, eq=False)
class FBReport:
    """Outcome of the joint-range direction criterion."""

    verdict: str
    swapped: bool
    certificate: np.ndarray | None
    conditions: dict[str, Any]

    def to_jsonable(self) -> dict[str, Any]:
        return {
            "verdict": self.verdict,
            "swapped": self.swapped,
            "certificate": self.certificate.tolist() if self.certificate is not None else None,
            "conditions": self.conditions,
        }


@dataclass(frozen=True, eq=False)
class CrossCheckResult:
    agree: bool
    separation_verdict: str
    flores_bazan_verdict: str
    certificate: ConvexityCertificate
    fb_report: FBReport
    diagnostics: dict[str, Any] | None

    def to_jsonable(self) -> dict[str, Any]:
        return {
            "agree": self.agree,
            "separation_verdict": self.separation_verdict,
            "flores_bazan_verdict": self.flores_bazan_verdict,
            "diagnostics": self.diagnostics,
        }


def _norms(f: QuadraticFunction, g: QuadraticFunction) -> dict[str, float]:
    return {
        "f_matrix": float(np.linalg.norm(f.A)),
        "g_matrix": float(np.linalg.norm(g.A)),
        "f_linear": float(np.linalg.norm(f.a)),
        "g_linear": float(np.linalg.norm(g.a)),
    }


def _degenerate_screen(
    f: QuadraticFunction, g: QuadraticFunction, tol: ToleranceSet
) -> tuple[bool, bool, bool, bool, dict[str, float]]:
    """Zero tests for the two matrices and the two linear terms.

    Each object is "zero" relative to the larger of 1 and the pair's shared
    scale, so a pair like ``(1e-14 * M, M)`` screens the tiny member as zero.
    """
    norms = _norms(f, g)
    mat_scale = max(1.0, norms["f_matrix"], norms["g_matrix"])
    vec_scale = max(1.0, norms["f_linear"], norms["g_linear"])
    return (
        norms["f_matrix"] <= tol.tol_dep * mat_scale,
        norms["g_matrix"] <= tol.tol_dep * mat_scale,
        norms["f_linear"] <= tol.tol_dep * vec_scale,
        norms["g_linear"] <= tol.tol_dep * vec_scale,
        norms,
    )


def _combined_gradient_zero(
    c: np.ndarray, ratio: float, f: QuadraticFunction, g: QuadraticFunction, tol: ToleranceSet
) -> bool:
    # c = -ratio*f.a + g.a can vanish by cancellation, so measure it against
    # the magnitudes that entered the subtraction.
    scale = max(1.0, abs(ratio) * float(np.linalg.norm(f.a)) + float(np.linalg.norm(g.a)))
    return float(np.linalg.norm(c)) <= tol.tol_dep * scale


def check_convexity(p: ProblemInstance) -> ConvexityCertificate:
    """Decide convexity of the joint range of ``(p.f, p.g)``.

    Decision path: degenerate screen (either both quadratic parts or both
    linear terms vanish => convex, swapping the pair if only ``f``'s matrix
    vanishes); matrix dependence (independent => convex); combined gradient
    and column-space membership (any failure => convex); and finally the
    orientation conditions, whose success yields a NONCONVEX verdict with a
    constructed witness.
    """
    tol = p.tolerances
    f, g = p.f, p.g
    path: list[dict[str, Any]] = []

    fa_zero, ga_zero, a_zero, b_zero, norms = _degenerate_screen(f, g, tol)
    swapped = bool(fa_zero and not ga_zero)
    record0: dict[str, Any] = {
        "step": 0,
        "check": "degenerate_screen",
        "norms": norms,
        "both_matrices_zero": bool(fa_zero and ga_zero),
        "both_linear_terms_zero": bool(a_zero and b_zero),
        "swapped": swapped,
    }
    if fa_zero and ga_zero:
        record0["outcome"] = "convex_affine_pair"
        path.append(record0)
        return _convex(path, swapped=False)
    if a_zero and b_zero:
        record0["outcome"] = "convex_homogeneous_pair"
        path.append(record0)
        return _convex(path, swapped=False)
    record0["outcome"] = "continue"
    path.append(record0)
    if swapped:
        f, g = g, f

    projected = float(np.sum(f.A * g.A)) / float(np.sum(f.A * f.A))
    residual = float(np.linalg.norm(g.A - projected * f.A))
    ratio = pencil_dependence(f.A, g.A, tol.tol_dep)
    record1 = {
        "step": 1,
        "check": "matrix_dependence",
        "projected_ratio": projected,
        "residual": residual,
        "dependent": ratio is not None,
        "outcome": "continue" if ratio is not None else "convex_independent_matrices",
    }
    path.append(record1)
    if ratio is None:
        return _convex(path, swapped)

    sd = eigh(f.A)
    c = -ratio * f.a + g.a
    c_zero = _combined_gradient_zero(c, ratio, f, g, tol)
    a_in, _ = range_membership(f.A, f.a, tol.tol_rank, spectral=sd)
    c_in = False
    if not c_zero:
        c_in, _ = range_membership(f.A, c, tol.tol_rank, spectral=sd)
    passes2 = (not c_zero) and a_in and c_in
    record2 = {
        "step": 2,
        "check": "combined_gradient_and_ranges",
        "pencil_ratio": ratio,
        "combined_gradient": c.tolist(),
        "gradient_zero": c_zero,
        "linear_term_in_range": bool(a_in),
        "gradient_in_range": bool(c_in),
        "outcome": "continue" if passes2 else "convex_gradient_conditions",
    }
    path.append(record2)
    if not passes2:
        return _convex(path, swapped)

    ine = inertia(sd, tol.tol_eig)
    V = null_space_basis(c)
    W = V.T @ f.A @ V
    W = (W + W.T) / 2.0
    sd_w = eigh(W)
    ine_w = inertia(sd_w, tol.tol_psd)
    pos_ok = ine.n_neg == 1 and ine_w.n_neg == 0
    neg_ok = ine.n_pos == 1 and ine_w.n_pos == 0
    record3 = {
        "step": 3,
        "check": "orientation_conditions",
        "eigenvalues": sd.eigenvalues.tolist(),
        "inertia": list(ine.as_tuple()),
        "restricted_eigenvalues": sd_w.eigenvalues.tolist(),
        "orientation_pos": bool(pos_ok),
        "orientation_neg": bool(neg_ok),
        "outcome": "nonconvex" if (pos_ok or neg_ok) else "convex_orientation_conditions",
    }
    path.append(record3)
    if not (pos_ok or neg_ok):
        return _convex(path, swapped)
    orientation = +1 if pos_ok else -1

    # Construct the certificate: concrete levels, then witness points.
    base_form = combination_affine_form(f, g, ratio)
    search = exists_separating_affine_levels(f, base_form.c, tol, c0=base_form.c0)
    if not search.exists or search.orientation != orientation:
        raise InvalidReport(
            "internal inconsistency: level search disagrees with orientation conditions"
        )
    gamma, alpha = search.gamma, search.alpha
    beta = ratio * alpha + gamma
    level_form = AffineForm(base_form.c, base_form.c0 - gamma)
    report = affine_separates_quadratic(f.add_constant(-alpha), level_form, tol)
    if not report.separates:
        raise InvalidReport(
            "internal inconsistency: constructed levels failed the separation check"
        )
    wit = construct_separation_witness(f, level_form, report, tol, alpha=alpha)
    range_u = np.array([evaluate(f, wit.u), evaluate(g, wit.u)])
    range_v = np.array([evaluate(f, wit.v), evaluate(g, wit.v)])
    gap = np.array([alpha, beta])
    f_level, g_level = alpha, beta
    if swapped:
        range_u, range_v, gap = range_u[::-1], range_v[::-1], gap[::-1]
        f_level, g_level = beta, alpha
    path.append(
        {
            "step": 3,
            "check": "certificate_construction",
            "orientation": orientation,
            "separating_level": gamma,
            "f_level": f_level,
            "g_level": g_level,
            "margin": report.margin,
            "outcome": "nonconvex",
        }
    )
    witness = NonconvexityWitness(wit.u, wit.v, range_u, range_v, gap)
    return ConvexityCertificate(
        verdict=VERDICT_NONCONVEX,
        swapped=swapped,
        pencil_ratio=float(ratio),
        orientation=orientation,
        f_level=float(f_level),
        g_level=float(g_level),
        witness=witness,
        path=tuple(path),
    )


def _convex(path: list[dict[str, Any]], swapped: bool) -> ConvexityCertificate:
    return ConvexityCertificate(
        verdict=VERDICT_CONVEX,
        swapped=swapped,
        pencil_ratio=None,
        orientation=None,
        f_level=None,
        g_level=None,
        witness=None,
        path=tuple(path),
    )


def check_flores_bazan(p: ProblemInstance) -> FBReport:
    """Joint-range convexity via the direction criterion.

    The range of the homogeneous pair is a closed convex cone; the full range
    is nonconvex iff some nonzero direction ``d`` satisfies: the linear terms
    vanish on the common kernel (here: both lie in the column space of the
    base matrix); ``d`` annihilates the matrix pencil; ``-d`` is attained by
    the homogeneous pair; and every attaining point has a nonzero combined
    linear term.  For a dependent pencil ``g.A = r * f.A`` only the two
    directions ``(1, r)`` and ``(-1, -r)`` can qualify, and the last condition
    reduces to: nonzero combined gradient, semidefinite restriction to its
    hyperplane, and a unique oriented negative eigenvalue.
    """
    tol = p.tolerances
    f, g = p.f, p.g
    conditions: dict[str, Any] = {}

    fa_zero, ga_zero, _, _, norms = _degenerate_screen(f, g, tol)
    conditions["norms"] = norms
    if fa_zero and ga_zero:
        conditions["matrix_dependence"] = {
            "dependent": True,
            "note": "both quadratic parts vanish; the homogeneous range is the origin",
        }
        return FBReport(VERDICT_CONVEX, False, None, conditions)
    swapped = bool(fa_zero and not ga_zero)
    conditions["swapped"] = swapped
    if swapped:
        f, g = g, f

    ratio = pencil_dependence(f.A, g.A, tol.tol_dep)
    conditions["matrix_dependence"] = {"dependent": ratio is not None, "ratio": ratio}
    if ratio is None:
        # Independent quadratic parts: only d = 0 annihilates the pencil.
        return FBReport(VERDICT_CONVEX, swapped, None, conditions)

    sd = eigh(f.A)
    ine = inertia(sd, tol.tol_eig)
    a_in, _ = range_membership(f.A, f.a, tol.tol_rank, spectral=sd)
    b_in, _ = range_membership(f.A, g.a, tol.tol_rank, spectral=sd)
    conditions["linear_terms_in_column_space"] = {"f": bool(a_in), "g": bool(b_in)}

    c = -ratio * f.a + g.a
    c_zero = _combined_gradient_zero(c, ratio, f, g, tol)
    conditions["combined_gradient_nonzero"] = not c_zero
    ine_w = None
    if not c_zero:
        V = null_space_basis(c)
        W = V.T @ f.A @ V
        W = (W + W.T) / 2.0
        ine_w = inertia(eigh(W), tol.tol_psd)

    certificate: np.ndarray | None = None
    for label, direction_sign in (("candidate_pos", +1), ("candidate_neg", -1)):
        d = direction_sign * np.array([1.0, ratio])
        attains = (ine.n_neg if direction_sign > 0 else ine.n_pos) >= 1
        if c_zero or ine_w is None:
            definite = False
        elif direction_sign > 0:
            definite = ine_w.n_neg == 0 and ine.n_neg == 1
        else:
            definite = ine_w.n_pos == 0 and ine.n_pos == 1
        qualified = bool(a_in and b_in and attains and definite)
        conditions[label] = {
            "d": d.tolist(),
            "negated_direction_attained": bool(attains),
            "hyperplane_restriction_definite": bool(definite),
            "qualified": qualified,
        }
        if qualified and certificate is None:
            certificate = d[::-1].copy() if swapped else d

    if certificate is None:
        return FBReport(VERDICT_CONVEX, swapped, None, conditions)
    return FBReport(VERDICT_NONCONVEX, swapped, certificate, conditions)


def verify_certificate(p: ProblemInstance, cert: ConvexityCertificate) -> dict[str, Any]:
    """Independently re-check a NONCONVEX certificate against the instance.

    The witness promises two attained range points and an unattained point
    between them: both witness points hit the analyzed quadratic's level
    within ``tol_residual``, the other function's values straddle its level
    strictly, and the stored range points match fresh evaluations.  When the
    certificate analyzed the swapped pair, the roles of ``f`` and ``g`` in
    those checks swap accordingly.

    Returns a JSON-ready dict with per-check booleans, residuals, and an
    overall ``valid`` flag (vacuously true for CONVEX certificates).
    """
    if cert.verdict != VERDICT_NONCONVEX:
        return {"applicable": False, "valid": True}
    if cert.witness is None or cert.f_level is None or cert.g_level is None:
        return {"applicable": True, "valid": False, "reason": "certificate lacks witness data"}
    tol = p.tolerances
    wit = cert.witness
    if cert.swapped:
        hit_fn, hit_level = p.g, cert.g_level
        sign_fn, sign_level = p.f, cert.f_level
    else:
        hit_fn, hit_level = p.f, cert.f_level
        sign_fn, sign_level = p.g, cert.g_level

    residual_u = abs(evaluate(hit_fn, wit.u) - hit_level)
    residual_v = abs(evaluate(hit_fn, wit.v) - hit_level)
    level_scale = max(1.0, abs(hit_level))
    levels_hit = residual_u <= tol.tol_residual * level_scale and residual_v <= tol.tol_residual * level_scale

    side_u = evaluate(sign_fn, wit.u) - sign_level
    side_v = evaluate(sign_fn, wit.v) - sign_level
    strictly_straddles = side_u * side_v < 0.0

    fresh_u = np.array([evaluate(p.f, wit.u), evaluate(p.g, wit.u)])
    fresh_v = np.array([evaluate(p.f, wit.v), evaluate(p.g, wit.v)])
    points_consistent = bool(
        np.allclose(fresh_u, wit.range_at_u, rtol=1e-12, atol=1e-12)
        and np.allclose(fresh_v, wit.range_at_v, rtol=1e-12, atol=1e-12)
    )
    gap_consistent = bool(
        np.allclose(wit.gap_point, [cert.f_level, cert.g_level], rtol=0.0, atol=0.0)
    )

    return {
        "applicable": True,
        "levels_hit": bool(levels_hit),
        "residual_u": float(residual_u),
        "residual_v": float(residual_v),
        "strictly_straddles": bool(strictly_straddles),
        "points_consistent": points_consistent,
        "gap_consistent": gap_consistent,
        "valid": bool(levels_hit and strictly_straddles and points_consistent and gap_consistent),
    }


def cross_check(p: ProblemInstance) -> CrossCheckResult:
    """Run both checkers and compare verdicts.

    The two criteria are equivalent, so ``agree`` should always be true; a
    false value comes with both evidence trails in ``diagnostics``.
    """
    certificate = check_convexity(p)
    fb = check_flores_bazan(p)
    agree = certificate.verdict == fb.verdict
    diagnostics = None
    if not agree:
        diagnostics = {
            "separation_path": list(certificate.path),
            "fb_conditions": fb.conditions,
        }
    return CrossCheckResult(
        agree=agree,
        separation_verdict=certificate.verdict,
        flores_bazan_verdict=fb.verdict,
        certificate=certificate,
        fb_report=fb,
        diagnostics=diagnostics,
    )
