import math

import numpy as np
import pytest

from stickslip import (
    CertificationFailure,
    PreconditionError,
    build_matrices,
    certify_basin,
    check_corollary1,
    decay_inside,
    error_nonlinearity,
    error_slope,
    local_problem,
    maximize_basin,
    sector_bound,
)
from stickslip.basin import _assemble, _containment_pencil
from stickslip.sdpcore import MARGIN_FLOOR, PSD_TOL, STRICT_NEG, verify


class TestLocalProblem:
    def test_flat_slope_limit(self, params, rng):
        # at zero slope the pencil reduces to the high-speed form
        prob = local_problem(params, 10.0, 0.5, slope=0.0)
        mats = build_matrices(params, 10.0)
        A, B, C = mats.A, mats.B, mats.C
        for _ in range(5):
            x = rng.uniform(-1.0, 1.0, size=5)
            P = np.array([[x[0], x[1]], [x[1], x[2]]])
            tau, gam = x[3], x[4]
            expected = np.zeros((3, 3))
            expected[:2, :2] = A.T @ P + P @ A
            expected[2, :2] = (B.T @ P - gam * C)[0]
            expected[:2, 2] = expected[2, :2]
            expected[2, 2] = -2.0 * tau
            assert np.allclose(prob.pencils[0].evaluate(x), expected, atol=1e-12)

    def test_corner_entry(self, params, rng):
        prob = local_problem(params, 3.0, 1.0)
        for _ in range(5):
            x = rng.uniform(-2.0, 2.0, size=5)
            assert prob.pencils[0].evaluate(x)[2, 2] == pytest.approx(-2.0 * x[3])

    def test_affine_map(self, params, rng):
        prob = local_problem(params, 3.0, 1.0)
        pen = prob.pencils[0]
        x = rng.uniform(-1.0, 1.0, size=5)
        y = rng.uniform(-1.0, 1.0, size=5)
        lhs = pen.evaluate(x + y) - pen.evaluate(x) - pen.evaluate(y) + pen.evaluate(np.zeros(5))
        assert np.allclose(lhs, 0.0, atol=1e-12)

    def test_unstable_band_rejected(self, params):
        with pytest.raises(PreconditionError):
            local_problem(params, 1.0, 1.0)

    def test_side_constraints(self, params):
        prob = local_problem(params, 3.0, 0.7)
        (c_tau, b_tau), (c_lam, b_lam) = prob.linear_inequalities
        assert b_tau == 1e-9 and np.allclose(c_tau, [0, 0, 0, 1, 0])
        assert b_lam == 0.0 and np.allclose(c_lam, [0, 0, 0, -0.7, 1.0])

    def test_containment_pencil_blocks(self):
        pen = _containment_pencil(2.0)
        x = np.array([3.0, 0.5, 4.0, 0.0, 0.0])
        M = pen.evaluate(x)
        assert np.allclose(M[:2, :2], [[3.0, 0.5], [0.5, 4.0]])
        assert M[2, 2] == 4.0 and M[0, 2] == 1.0 and M[1, 2] == 0.0


class TestCertifyBasin:
    def test_feasible_at_145(self, params):
        cert = certify_basin(params, 1.45, 0.3)
        assert cert.radius == 0.3
        assert cert.tau >= 1e-9
        assert cert.lam == pytest.approx(cert.gamma / cert.tau)
        assert cert.lam >= cert.lambda_floor - 1e-9

    def test_feasible_at_low_speed(self, params):
        cert = certify_basin(params, 0.07, 0.05)
        assert cert.eta >= 1.0 / 0.05**2 - 1e-6

    def test_unstable_band_rejected(self, params):
        with pytest.raises(PreconditionError):
            certify_basin(params, 1.0, 0.5)

    def test_radius_domain(self, params):
        with pytest.raises(PreconditionError):
            certify_basin(params, 1.45, 1.45)
        with pytest.raises(PreconditionError):
            certify_basin(params, 1.45, 0.0)

    def test_margins_verified(self, params):
        cert = certify_basin(params, 1.45, 0.3)
        prob = _assemble(params, 1.45, 0.3, cert.lambda_floor, eta=cert.eta)
        x = np.array([cert.P[0, 0], cert.P[0, 1], cert.P[1, 1], cert.tau, cert.gamma])
        margins = verify(prob, x)
        for pen, m in zip(prob.pencils, margins):
            assert m >= (MARGIN_FLOOR if pen.sense == STRICT_NEG else -PSD_TOL)


class TestMaximizeBasin:
    def test_terminates_at_v3(self, params):
        cert = maximize_basin(params, 3.0)
        assert math.isfinite(cert.eta)
        assert 0.0 < cert.radius < 3.0

    def test_best_certificate_at_145(self, params, basin_v145):
        assert basin_v145.eta < 20.0
        assert basin_v145.min_semi_axis > 0.2

    def test_replay_decay(self, params, basin_v145, rng):
        assert decay_inside(params, 1.45, basin_v145.P, n=200, rng=rng) > 0.0

    def test_strip_and_sector_validity(self, params, basin_v145, rng):
        # every point of the certified ellipse obeys the strip bound, and the
        # sector quadratic holds there with the certified gain
        cert = basin_v145
        lam = cert.lam
        for _ in range(200):
            u = rng.normal(size=2)
            u /= np.linalg.norm(u)
            c = rng.uniform(0.0, 1.0)
            eps = u * math.sqrt(c / float(u @ cert.P @ u))
            assert abs(eps[0]) <= cert.radius + 1e-9
            if eps[0] == 0.0:
                continue
            phi = error_nonlinearity(params, 1.45, float(eps[0]))
            assert phi * (phi + lam * eps[0]) <= 1e-12

    def test_gain_exceeds_slope_bound(self, params, basin_v145):
        # the certified gain is consistent with the slope at the origin
        assert basin_v145.lam > -error_slope(params, 1.45)

    def test_unstable_band_rejected(self, params):
        with pytest.raises(PreconditionError):
            maximize_basin(params, 1.2)


class TestCorollary:
    def test_high_speed_joint_certificate(self, params):
        assert check_corollary1(params, 10.0) is True

    def test_below_band_rejected(self, params):
        with pytest.raises(PreconditionError):
            check_corollary1(params, 1.0)

    def test_certificate_transfers_to_higher_speed(self, params):
        # the corollary's own claim: the joint solution certifies any higher
        # speed; replay it at twice the speed through the verifier
        ok, x, radius = check_corollary1(params, 10.0, return_solution=True)
        assert ok
        lam = x[4] / x[3]
        lam_floor_high = sector_bound(params, 20.0, radius)
        assert lam >= lam_floor_high - 1e-9
        prob = _assemble(params, 20.0, radius, lam_floor_high)
        margins = verify(prob, x)
        for pen, m in zip(prob.pencils, margins):
            assert m >= (MARGIN_FLOOR if pen.sense == STRICT_NEG else -PSD_TOL)
