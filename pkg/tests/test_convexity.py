"""Top-level convexity decisions, certificates, and the independent checker."""

from __future__ import annotations

import numpy as np
import pytest

from qrange import (
    VERDICT_CONVEX,
    VERDICT_NONCONVEX,
    ProblemInstance,
    check_convexity,
    check_flores_bazan,
    cross_check,
    evaluate,
    make_quadratic,
    verify_certificate,
)
from conftest import differential_batch, random_instance, transformed_instance


def saddle_pair() -> ProblemInstance:
    f = make_quadratic([[-1.0, 0.0], [0.0, 1.0]], [0.0, 0.0], 0.0)
    g = make_quadratic([[-2.0, 0.0], [0.0, 2.0]], [2.0, -1.0], 0.0)
    return ProblemInstance(f, g)


class TestCheckConvexityVerdicts:
    def test_dependent_saddles_nonconvex(self):
        cert = check_convexity(saddle_pair())
        assert cert.verdict == VERDICT_NONCONVEX
        assert cert.pencil_ratio == pytest.approx(2.0, abs=1e-15)
        assert cert.orientation == +1
        assert not cert.swapped

    def test_certificate_values(self):
        cert = check_convexity(saddle_pair())
        assert cert.f_level == pytest.approx(-1.0, abs=1e-12)
        assert cert.g_level == pytest.approx(-2.0, abs=1e-12)
        wit = cert.witness
        assert np.allclose(sorted([tuple(wit.u), tuple(wit.v)]), [(-1.0, 0.0), (1.0, 0.0)])
        assert np.allclose(wit.gap_point, [-1.0, -2.0])

    def test_gap_point_is_really_missing_from_the_range(self):
        # dense sampling never lands near the certified gap point
        p = saddle_pair()
        cert = check_convexity(p)
        rng = np.random.default_rng(0)
        pts = rng.uniform(-6, 6, size=(200_000, 2))
        values = np.column_stack(
            [
                np.einsum("ij,jk,ik->i", pts, p.f.A, pts) + 2.0 * pts @ p.f.a + p.f.a0,
                np.einsum("ij,jk,ik->i", pts, p.g.A, pts) + 2.0 * pts @ p.g.a + p.g.a0,
            ]
        )
        dist = np.min(np.linalg.norm(values - np.asarray(cert.witness.gap_point), axis=1))
        assert dist > 0.05

    def test_both_matrices_zero_convex(self):
        f = make_quadratic(np.zeros((2, 2)), [1.0, 0.0], 1.0)
        g = make_quadratic(np.zeros((2, 2)), [0.0, -0.5], 0.0)
        cert = check_convexity(ProblemInstance(f, g))
        assert cert.verdict == VERDICT_CONVEX
        assert cert.path[-1]["step"] == 0

    def test_homogeneous_pair_convex(self):
        f = make_quadratic(np.diag([1.0, 1.0]), np.zeros(2), 0.5)
        g = make_quadratic(np.diag([1.0, -1.0]), np.zeros(2), -0.5)
        cert = check_convexity(ProblemInstance(f, g))
        assert cert.verdict == VERDICT_CONVEX
        assert cert.path[-1]["step"] == 0
        assert cert.path[-1]["outcome"] == "convex_homogeneous_pair"

    def test_independent_matrices_convex_at_pencil_step(self):
        f = make_quadratic(np.diag([1.0, 1.0, 0.0]), np.zeros(3), 0.0)
        g = make_quadratic(np.diag([-1.0, 1.0, 0.0]), [0.0, 0.0, 0.5], 0.0)
        cert = check_convexity(ProblemInstance(f, g))
        assert cert.verdict == VERDICT_CONVEX
        assert cert.path[-1]["check"] == "matrix_dependence"
        assert cert.path[-1]["step"] == 1

    def test_zero_combined_gradient_convex(self):
        # g = 2 f exactly: the range is a parabola-free line image, never split
        f = make_quadratic([[-1.0, 0.0], [0.0, 1.0]], [0.5, 0.5], 0.25)
        g = f.scaled(2.0)
        cert = check_convexity(ProblemInstance(f, g))
        assert cert.verdict == VERDICT_CONVEX
        assert cert.path[-1]["step"] == 2

    def test_orientation_negative_branch(self):
        # flipped saddle wants the negated matrix: exactly one positive eigenvalue
        f = make_quadratic([[-1.0, 0.0], [0.0, 4.0]], [0.0, 0.0], -1.0)
        g = make_quadratic(np.zeros((2, 2)), [0.5, -2.5], 0.0)
        cert = check_convexity(ProblemInstance(f, g))
        assert cert.verdict == VERDICT_NONCONVEX
        assert cert.orientation == -1

    def test_gradient_out_of_column_space_convex(self):
        # singular matrix, combined gradient sticks out of the column space
        f = make_quadratic(np.diag([-1.0, 1.0, 0.0]), np.zeros(3), 0.0)
        g = make_quadratic(np.diag([-2.0, 2.0, 0.0]), [0.0, 0.0, 1.0], 0.0)
        cert = check_convexity(ProblemInstance(f, g))
        assert cert.verdict == VERDICT_CONVEX
        assert cert.path[-1]["step"] == 2


class TestSwapHandling:
    def swap_instance(self) -> ProblemInstance:
        f = make_quadratic(np.zeros((2, 2)), [1.0, 0.0], 0.0)  # purely affine
        g = make_quadratic([[-1.0, 0.0], [0.0, 1.0]], [0.0, 0.0], 0.0)
        return ProblemInstance(f, g)

    def test_affine_first_function_triggers_swap(self):
        cert = check_convexity(self.swap_instance())
        assert cert.swapped
        assert cert.verdict == VERDICT_NONCONVEX

    def test_swapped_certificate_reports_original_coordinates(self):
        p = self.swap_instance()
        cert = check_convexity(p)
        wit = cert.witness
        # range points must match fresh evaluations of the ORIGINAL pair
        for point, stored in ((wit.u, wit.range_at_u), (wit.v, wit.range_at_v)):
            assert evaluate(p.f, point) == pytest.approx(stored[0], abs=1e-12)
            assert evaluate(p.g, point) == pytest.approx(stored[1], abs=1e-12)
        assert np.allclose(wit.gap_point, [cert.f_level, cert.g_level])

    def test_swapped_certificate_verifies(self):
        p = self.swap_instance()
        report = verify_certificate(p, check_convexity(p))
        assert report["valid"]

    def test_verdict_swap_symmetric(self):
        rng = np.random.default_rng(77)
        for _ in range(30):
            p = random_instance(rng)
            assert check_convexity(p).verdict == check_convexity(p.swapped()).verdict


class TestDecisionPath:
    def test_path_is_ordered_and_jsonable(self):
        cert = check_convexity(saddle_pair())
        steps = [rec["step"] for rec in cert.path]
        assert steps == sorted(steps)
        assert cert.path[0]["check"] == "degenerate_screen"
        assert cert.path[-1]["check"] == "certificate_construction"
        doc = cert.to_jsonable()
        assert doc["verdict"] == VERDICT_NONCONVEX
        assert isinstance(doc["path"], list)

    def test_orientation_evidence_recorded(self):
        cert = check_convexity(saddle_pair())
        rec = next(r for r in cert.path if r["check"] == "orientation_conditions")
        assert rec["eigenvalues"] == pytest.approx([-1.0, 1.0])
        assert rec["orientation_pos"] is True


class TestCheckFloresBazan:
    def test_dependent_saddles_nonconvex_with_direction(self):
        report = check_flores_bazan(saddle_pair())
        assert report.verdict == VERDICT_NONCONVEX
        assert report.certificate is not None
        d = np.asarray(report.certificate)
        # direction property: d2 * A = d1 * B
        p = saddle_pair()
        assert np.allclose(d[1] * p.f.A, d[0] * p.g.A, atol=1e-12)

    def test_independent_matrices_convex(self):
        f = make_quadratic(np.diag([1.0, 1.0]), np.zeros(2), 0.0)
        g = make_quadratic(np.diag([1.0, -1.0]), [1.0, 0.0], 0.0)
        report = check_flores_bazan(ProblemInstance(f, g))
        assert report.verdict == VERDICT_CONVEX
        assert report.certificate is None
        assert report.conditions["matrix_dependence"]["dependent"] is False

    def test_direction_property_on_random_nonconvex(self):
        rng = np.random.default_rng(123)
        seen = 0
        for _ in range(120):
            p = random_instance(rng)
            report = check_flores_bazan(p)
            if report.verdict != VERDICT_NONCONVEX:
                continue
            seen += 1
            d = np.asarray(report.certificate)
            assert np.linalg.norm(d) > 0
            scale = max(1.0, float(np.linalg.norm(p.f.A)), float(np.linalg.norm(p.g.A)))
            assert np.linalg.norm(d[1] * p.f.A - d[0] * p.g.A) <= 1e-7 * scale
        assert seen >= 5

    def test_swap_handling(self):
        f = make_quadratic(np.zeros((2, 2)), [1.0, 0.0], 0.0)
        g = make_quadratic([[-1.0, 0.0], [0.0, 1.0]], [0.0, 0.0], 0.0)
        p = ProblemInstance(f, g)
        report = check_flores_bazan(p)
        assert report.verdict == VERDICT_NONCONVEX
        assert report.conditions["swapped"] is True
        d = np.asarray(report.certificate)
        assert np.allclose(d[1] * p.f.A, d[0] * p.g.A, atol=1e-12)


class TestDifferentialAgreement:
    def test_two_hundred_random_instances_agree(self):
        for p in differential_batch(seed=4242, count=200):
            result = cross_check(p)
            assert result.agree, (
                f"checkers disagree: separation={result.separation_verdict} "
                f"direction={result.flores_bazan_verdict}\n{result.diagnostics}"
            )

    def test_nonconvex_certificates_all_verify(self):
        for p in differential_batch(seed=999, count=150):
            cert = check_convexity(p)
            if cert.verdict == VERDICT_NONCONVEX:
                report = verify_certificate(p, cert)
                assert report["valid"], report


class TestInvarianceProperties:
    def test_affine_substitution_and_scaling_preserve_verdict(self):
        rng = np.random.default_rng(31)
        for _ in range(25):
            p = random_instance(rng)
            base = check_convexity(p).verdict
            q = transformed_instance(rng, p)
            assert check_convexity(q).verdict == base

    def test_constant_shift_preserves_verdict(self):
        rng = np.random.default_rng(13)
        for _ in range(20):
            p = random_instance(rng)
            base = check_convexity(p).verdict
            shifted = ProblemInstance(p.f.add_constant(3.7), p.g.add_constant(-2.2), p.tolerances)
            assert check_convexity(shifted).verdict == base

    def test_value_scaling_preserves_verdict(self):
        rng = np.random.default_rng(57)
        for _ in range(20):
            p = random_instance(rng)
            base = check_convexity(p).verdict
            scaled = ProblemInstance(p.f.scaled(-4.5), p.g.scaled(0.25), p.tolerances)
            assert check_convexity(scaled).verdict == base


class TestVerifyCertificate:
    def test_convex_certificate_vacuously_valid(self):
        f = make_quadratic(np.diag([1.0, 1.0]), np.zeros(2), 0.0)
        g = make_quadratic(np.diag([1.0, -1.0]), np.zeros(2), 0.0)
        p = ProblemInstance(f, g)
        report = verify_certificate(p, check_convexity(p))
        assert report == {"applicable": False, "valid": True}

    def test_tampered_witness_rejected(self):
        import dataclasses

        p = saddle_pair()
        cert = check_convexity(p)
        bad_witness = dataclasses.replace(cert.witness, u=cert.witness.u + 0.5)
        bad_cert = dataclasses.replace(cert, witness=bad_witness)
        report = verify_certificate(p, bad_cert)
        assert not report["valid"]

    def test_wrong_instance_rejected(self):
        p = saddle_pair()
        cert = check_convexity(p)
        other = ProblemInstance(p.f.add_constant(5.0), p.g, p.tolerances)
        report = verify_certificate(other, cert)
        assert not report["valid"]


class TestCrossCheck:
    def test_agreement_and_shape(self):
        result = cross_check(saddle_pair())
        assert result.agree
        assert result.separation_verdict == result.flores_bazan_verdict == VERDICT_NONCONVEX
        assert result.diagnostics is None
        doc = result.to_jsonable()
        assert doc["agree"] is True
