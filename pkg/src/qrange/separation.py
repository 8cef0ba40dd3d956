"""Decide whether an affine level set separates a quadratic level set.

"Separates" is meant in the sign-splitting sense: ``{h = 0}`` separates
``{f = 0}`` when the zero set of ``f`` is nonempty, disjoint from ``{h = 0}``,
and contains points with both signs of ``h``.

The decision procedure works on one of the two orientations ``s in {+1, -1}``
of ``f`` (write ``F = s*f``, ``Abar = s*A``, ``abar = s*a``) and checks, for a
hyperplane with unit-scaled direction ``c`` and offset point
``x0 = -(c0/c'c) c``:

  (i)   ``Abar`` has exactly one negative eigenvalue and ``a`` lies in the
        column space of ``A``;
  (ii)  ``c`` is nonzero and lies in the column space of ``A``;
  (iii) with ``V`` an orthonormal basis of ``{c'x = 0}`` and
        ``W = V' Abar V``: ``W`` is positive semidefinite,
        ``w = V'(Abar x0 + abar)`` lies in the column space of ``W``, and the
        strictness margin ``F(x0) - w' pinv(W) w`` is positive.

Separation holds iff some orientation passes all three.  The margin test uses
a relative threshold, so boundary cases (margin within tolerance of zero) are
reported as non-separating with ``near_degenerate=True``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    InvalidInstance,
    InvalidReport,
    NotReducible,
    RootFailure,
    ZeroVector,
)
from .quadratic import QuadraticFunction, ToleranceSet, evaluate
from .spectral import (
    PsdClass,
    apply_pseudoinverse,
    eigh,
    inertia,
    null_space_basis,
    pencil_dependence,
    range_membership,
)

__all__ = [
    "AffineForm",
    "SeparationReport",
    "SeparationWitness",
    "LevelSearchResult",
    "LevelPairReport",
    "combination_affine_form",
    "affine_separates_quadratic",
    "exists_separating_affine_levels",
    "level_pair_separation",
    "construct_separation_witness",
]

# Condition labels used in SeparationReport.failed_conditions.
COND_ONE_NEGATIVE = "one_negative_eigenvalue"
COND_LINEAR_IN_RANGE = "linear_term_in_range"
COND_GRADIENT_NONZERO = "gradient_nonzero"
COND_GRADIENT_IN_RANGE = "gradient_in_range"
COND_RESTRICTED_SEMIDEFINITE = "restricted_form_semidefinite"
COND_PROJECTED_IN_RANGE = "projected_gradient_in_range"
COND_POSITIVE_MARGIN = "positive_margin"


@dataclass(frozen=True, eq=False)
class AffineForm:
    """The affine function ``h(x) = c'x + c0``."""

    c: np.ndarray
    c0: float

    def __post_init__(self) -> None:
        c = np.asarray(self.c, dtype=float)
        if c.ndim != 1 or c.shape[0] == 0:
            raise DimensionMismatch(f"direction must be a nonempty vector, got shape {c.shape}")
        if not (np.all(np.isfinite(c)) and np.isfinite(self.c0)):
            raise InvalidInstance("affine form data must be finite")
        c = c.copy()
        c.setflags(write=False)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "c0", float(self.c0))

    @property
    def n(self) -> int:
        return self.c.shape[0]

    def __call__(self, x: np.ndarray) -> float:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise DimensionMismatch(f"point has shape {x.shape}, expected ({self.n},)")
        return float(self.c @ x + self.c0)

    def scaled(self, t: float) -> "AffineForm":
        return AffineForm(float(t) * self.c, float(t) * self.c0)


@dataclass(frozen=True, eq=False)
class SeparationReport:
    """Outcome of :func:`affine_separates_quadratic`.

    ``failed_conditions`` maps each orientation (+1 / -1) to the labels of the
    conditions that orientation failed (empty tuple = orientation passed).
    The geometric fields are populated for the successful orientation only.
    """

    separates: bool
    orientation: int | None
    foot_point: np.ndarray | None
    projected_gradient: np.ndarray | None
    margin: float | None
    failed_conditions: dict[int, tuple[str, ...]]
    near_degenerate: bool


@dataclass(frozen=True, eq=False)
class SeparationWitness:
    """Two points of ``{f = alpha}`` on opposite strict sides of ``{h = 0}``."""

    u: np.ndarray
    v: np.ndarray
    alpha: float
    h_at_u: float
    h_at_v: float


@dataclass(frozen=True)
class LevelSearchResult:
    """Outcome of :func:`exists_separating_affine_levels`."""

    exists: bool
    orientation: int | None
    gamma: float | None
    alpha: float | None


@dataclass(frozen=True, eq=False)
class LevelPairReport:
    """Both directions of level-set separation between two quadratics."""

    g_separates_f: bool
    f_separates_g: bool
    report_g_on_f: SeparationReport | None
    report_f_on_g: SeparationReport | None
    ratio_g_on_f: float | None
    ratio_f_on_g: float | None


def combination_affine_form(
    f: QuadraticFunction,
    g: QuadraticFunction,
    ratio: float,
    alpha: float = 0.0,
    beta: float = 0.0,
) -> AffineForm:
    """The affine function ``-ratio*(f - alpha) + (g - beta)``.

    Only valid when the quadratic parts cancel (``g.A = ratio * f.A``); the
    caller is responsible for having established that.  Because the stored
    linear term is half the gradient, the affine form's direction is
    ``2*(-ratio*f.a + g.a)``.
    """
    grad = 2.0 * (-ratio * f.a + g.a)
    const = -ratio * (f.a0 - alpha) + (g.a0 - beta)
    return AffineForm(grad, float(const))


def affine_separates_quadratic(
    f: QuadraticFunction, h: AffineForm, tol: ToleranceSet | None = None
) -> SeparationReport:
    """Does the hyperplane ``{h = 0}`` separate the level set ``{f = 0}``?"""
    tol = tol or ToleranceSet()
    if h.n != f.n:
        raise DimensionMismatch(f"affine form on dimension {h.n}, quadratic on {f.n}")

    sd = eigh(f.A)
    ine = inertia(sd, tol.tol_eig)
    a_in_range, _ = range_membership(f.A, f.a, tol.tol_rank, spectral=sd)

    norm_c = float(np.linalg.norm(h.c))
    if norm_c == 0.0:
        failed = {
            +1: _orientation_failures(ine.n_neg, a_in_range) + (COND_GRADIENT_NONZERO,),
            -1: _orientation_failures(ine.n_pos, a_in_range) + (COND_GRADIENT_NONZERO,),
        }
        return SeparationReport(False, None, None, None, None, failed, False)

    unit_c = h.c / norm_c
    c_in_range, _ = range_membership(f.A, h.c, tol.tol_rank, spectral=sd)
    x0 = -(h.c0 / norm_c) * unit_c
    V = null_space_basis(h.c)
    W = V.T @ f.A @ V
    W = (W + W.T) / 2.0
    sd_w = eigh(W)
    ine_w = inertia(sd_w, tol.tol_psd)

    w_plus = V.T @ (f.A @ x0 + f.a)
    w_in_range, _ = range_membership(W, w_plus, tol.tol_rank, spectral=sd_w)
    f_x0 = evaluate(f, x0)
    threshold = tol.tol_psd * max(1.0, abs(f_x0))
    # The two orientations share all spectral work: negating f negates the
    # restricted form and its pseudoinverse term, so the margins are exact
    # negatives of one another (hence at most one orientation can pass).
    quad_term = (
        apply_pseudoinverse(W, w_plus, tol.tol_rank, spectral=sd_w) if w_in_range else None
    )

    failed: dict[int, tuple[str, ...]] = {}
    near_degenerate = False
    winner: tuple[int, float] | None = None
    for sign in (+1, -1):
        labels = list(_orientation_failures(ine.n_neg if sign > 0 else ine.n_pos, a_in_range))
        if not c_in_range:
            labels.append(COND_GRADIENT_IN_RANGE)
        semidefinite_ok = (
            ine_w.n_neg == 0 if sign > 0 else ine_w.n_pos == 0
        )  # PSD (or zero) for +1, NSD (or zero) for -1
        if not semidefinite_ok:
            labels.append(COND_RESTRICTED_SEMIDEFINITE)
        if not w_in_range:
            labels.append(COND_PROJECTED_IN_RANGE)
            margin = None
        else:
            margin = sign * (f_x0 - quad_term)
            if margin <= threshold:
                labels.append(COND_POSITIVE_MARGIN)
                if not labels[:-1] and abs(margin) <= threshold:
                    near_degenerate = True
        failed[sign] = tuple(labels)
        if not labels and winner is None:
            winner = (sign, margin)

    if winner is None:
        return SeparationReport(False, None, None, None, None, failed, near_degenerate)
    sign, margin = winner
    return SeparationReport(
        separates=True,
        orientation=sign,
        foot_point=x0,
        projected_gradient=sign * w_plus,
        margin=margin,
        failed_conditions=failed,
        near_degenerate=False,
    )


def _orientation_failures(n_neg_oriented: int, a_in_range: bool) -> tuple[str, ...]:
    labels = []
    if n_neg_oriented != 1:
        labels.append(COND_ONE_NEGATIVE)
    if not a_in_range:
        labels.append(COND_LINEAR_IN_RANGE)
    return tuple(labels)


def exists_separating_affine_levels(
    f: QuadraticFunction,
    c: np.ndarray,
    tol: ToleranceSet | None = None,
    c0: float = 0.0,
) -> LevelSearchResult:
    """Do levels ``gamma, alpha`` exist with ``{c'x + c0 = gamma}`` separating ``{f = alpha}``?

    Existence depends only on the direction of ``c``: it requires, for some
    orientation, exactly one negative eigenvalue, both ``f``'s linear term and
    ``c`` in the column space of ``A``, and the restricted form positive
    semidefinite.  When these hold, concrete levels are constructed:

    * solve ``V' Abar u0 = V' abar`` (least squares) and set
      ``gamma = c0 - c'u0``, which makes the projected gradient at the foot
      point of ``{c'x + c0 = gamma}`` land inside the restricted form's column
      space by construction;
    * push ``alpha`` to ``f(foot) - s*(pinv_term + 1)``, which makes the
      strictness margin exactly 1 for orientation ``s`` (small levels for the
      ``+1`` orientation, large ones for ``-1``).
    """
    tol = tol or ToleranceSet()
    c = np.asarray(c, dtype=float)
    if c.shape != (f.n,):
        raise DimensionMismatch(f"direction has shape {c.shape}, expected ({f.n},)")
    norm_c = float(np.linalg.norm(c))
    if norm_c == 0.0:
        raise ZeroVector("level search requires a nonzero direction")

    sd = eigh(f.A)
    ine = inertia(sd, tol.tol_eig)
    a_in_range, _ = range_membership(f.A, f.a, tol.tol_rank, spectral=sd)
    c_in_range, _ = range_membership(f.A, c, tol.tol_rank, spectral=sd)
    V = null_space_basis(c)
    W = V.T @ f.A @ V
    W = (W + W.T) / 2.0
    ine_w = inertia(eigh(W), tol.tol_psd)

    for sign in (+1, -1):
        n_neg_oriented = ine.n_neg if sign > 0 else ine.n_pos
        semidefinite_ok = ine_w.n_neg == 0 if sign > 0 else ine_w.n_pos == 0
        if not (n_neg_oriented == 1 and a_in_range and c_in_range and semidefinite_ok):
            continue
        A_bar = sign * f.A
        a_bar = sign * f.a
        u0, *_ = np.linalg.lstsq(V.T @ A_bar, V.T @ a_bar, rcond=None)
        gamma = float(c0 - c @ u0)
        foot = -((c0 - gamma) / norm_c) * (c / norm_c)
        w_bar = V.T @ (A_bar @ foot + a_bar)
        quad_term = apply_pseudoinverse(sign * W, w_bar, tol.tol_rank)
        alpha = evaluate(f, foot) - sign * (quad_term + 1.0)
        return LevelSearchResult(True, sign, gamma, alpha)
    return LevelSearchResult(False, None, None, None)


def _is_negligible_matrix(M: np.ndarray, tol_dep: float, scale: float) -> bool:
    return float(np.linalg.norm(M)) <= tol_dep * max(1.0, scale)


def _one_direction(
    f: QuadraticFunction,
    alpha: float,
    g: QuadraticFunction,
    beta: float,
    tol: ToleranceSet,
) -> tuple[bool, SeparationReport | None, float | None]:
    """Does ``{g = beta}`` separate ``{f = alpha}``?"""
    norm_fa = float(np.linalg.norm(f.A))
    norm_ga = float(np.linalg.norm(g.A))
    scale = max(norm_fa, norm_ga)
    if _is_negligible_matrix(f.A, tol.tol_dep, scale):
        # An affine function's level sets are connected; nothing to separate.
        return False, None, None
    ratio = pencil_dependence(f.A, g.A, tol.tol_dep)
    if ratio is None:
        return False, None, None
    residual = float(np.linalg.norm(g.A - ratio * f.A))
    if residual > tol.tol_dep * max(norm_fa, norm_ga):
        raise NotReducible(
            f"combination expected affine but quadratic residual is {residual:.3e}"
        )
    h = combination_affine_form(f, g, ratio, alpha, beta)
    report = affine_separates_quadratic(f.add_constant(-alpha), h, tol)
    return report.separates, report, ratio


def level_pair_separation(
    f: QuadraticFunction,
    g: QuadraticFunction,
    alpha: float,
    beta: float,
    tol: ToleranceSet | None = None,
) -> LevelPairReport:
    """Decide both directions of separation between ``{f = alpha}`` and ``{g = beta}``.

    Each direction reduces to the affine case: ``{g = beta}`` can separate
    ``{f = alpha}`` only if the quadratic parts are linearly dependent, in
    which case the combination ``-ratio*(f - alpha) + (g - beta)`` is affine
    and coincides with ``g - beta`` on ``{f = alpha}``.  If both functions are
    affine, or the quadratic parts are independent, both directions are false.
    """
    tol = tol or ToleranceSet()
    if f.n != g.n:
        raise DimensionMismatch(f"dimension mismatch: {f.n} vs {g.n}")
    g_on_f, rep_gf, ratio_gf = _one_direction(f, float(alpha), g, float(beta), tol)
    f_on_g, rep_fg, ratio_fg = _one_direction(g, float(beta), f, float(alpha), tol)
    return LevelPairReport(g_on_f, f_on_g, rep_gf, rep_fg, ratio_gf, ratio_fg)


def construct_separation_witness(
    f: QuadraticFunction,
    h: AffineForm,
    report: SeparationReport,
    tol: ToleranceSet | None = None,
    alpha: float = 0.0,
) -> SeparationWitness:
    """Construct two points of ``{f = alpha}`` strictly on opposite sides of ``{h = 0}``.

    ``report`` must be a successful :func:`affine_separates_quadratic` result
    for ``(f - alpha, h)``.  The points are found on the line through the
    report's foot point along the oriented matrix's negative-curvature
    eigenvector: there the shifted function is positive at the foot point and
    concave along the line, so it has exactly two real roots, one on each side
    of the hyperplane.
    """
    tol = tol or ToleranceSet()
    if not report.separates or report.orientation is None or report.foot_point is None:
        raise InvalidReport("witness construction requires a successful separation report")
    sign = report.orientation
    x0 = report.foot_point
    sd = eigh(sign * f.A)
    lead = float(sd.eigenvalues[0])
    if lead >= 0.0:
        raise InvalidReport("oriented matrix has no negative-curvature direction")
    direction = sd.eigenvectors[:, 0]

    a_bar = sign * f.a
    const = sign * (evaluate(f, x0) - alpha)
    lin = float(2.0 * direction @ ((sign * f.A) @ x0 + a_bar))
    disc = lin * lin - 4.0 * lead * const
    if disc <= 0.0:
        raise RootFailure(f"no two real roots along the witness line (disc={disc:.3e})")
    q = -(lin + float(np.copysign(np.sqrt(disc), lin))) / 2.0
    t1, t2 = q / lead, const / q
    t_lo, t_hi = (t1, t2) if t1 <= t2 else (t2, t1)
    u = x0 + t_lo * direction
    v = x0 + t_hi * direction

    h_u, h_v = h(u), h(v)
    if not (h_u * h_v < 0.0):
        raise RootFailure("witness points do not fall on opposite sides of the hyperplane")
    level_scale = max(1.0, abs(alpha))
    for point in (u, v):
        if abs(evaluate(f, point) - alpha) > tol.tol_residual * level_scale:
            raise RootFailure("witness point misses the target level beyond tolerance")
    return SeparationWitness(u, v, float(alpha), h_u, h_v)
