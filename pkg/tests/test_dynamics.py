import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stickslip import (
    PhysicalParams,
    SimConfig,
    build_matrices,
    dry_friction,
    equilibrium,
    error_nonlinearity,
    error_rhs,
    error_slope,
    simulate,
    state_rhs,
)

Z_INF_1 = -2.2781632130366476  # -(dry_friction(1) + k_v) / k at the benchmark


class TestBuildMatrices:
    def test_benchmark_A_B_C(self, params):
        m = build_matrices(params, 1.0)
        assert np.allclose(m.A, [[-1.0, -2.0], [1.0, 0.0]])
        assert np.allclose(m.B, [[-1.0], [0.0]])
        assert np.allclose(m.C, [[1.0, 0.0]])

    def test_linearisation_entry(self, params):
        m = build_matrices(params, 1.0)
        # -(k_v + slope)/m with slope(1) ~ -1.9258
        assert m.A0[0, 0] == pytest.approx(-(params.k_v + error_slope(params, 1.0)) / params.m)
        assert m.A0[0, 0] == pytest.approx(0.9258419564790475)
        assert np.allclose(m.A0[1], [1.0, 0.0])

    def test_CB_product(self, params):
        m = build_matrices(params, 1.0)
        assert (m.C @ m.B)[0, 0] == pytest.approx(-1.0 / params.m)

    def test_A_eigenvalues_benchmark(self, params):
        # characteristic polynomial s^2 + s + 2: real part -1/2
        m = build_matrices(params, 1.0)
        eig = np.linalg.eigvals(m.A)
        assert np.allclose(sorted(eig.real), [-0.5, -0.5])
        assert np.allclose(sorted(eig.imag), [-math.sqrt(7) / 2, math.sqrt(7) / 2])

    @settings(max_examples=60, deadline=None)
    @given(
        st.floats(min_value=0.1, max_value=50.0),
        st.floats(min_value=0.01, max_value=50.0),
        st.floats(min_value=0.01, max_value=50.0),
    )
    def test_A_hurwitz_for_valid_params(self, m_val, k_val, kv_val):
        p = PhysicalParams(m=m_val, k=k_val, k_v=kv_val)
        A = build_matrices(p, 1.0).A
        assert np.all(np.linalg.eigvals(A).real < 0.0)


class TestEquilibrium:
    def test_closed_form(self, params):
        eq = equilibrium(params, 1.0)
        assert eq.v_inf == 1.0
        assert eq.z_inf == pytest.approx(Z_INF_1, rel=1e-12)
        assert eq.z_inf == pytest.approx(-(dry_friction(params, 1.0) + 1.0) / 2.0)

    def test_state_rhs_residual(self, params):
        for v_ref in (0.07, 1.0, 3.0, 10.0):
            eq = equilibrium(params, v_ref)
            dv, dz = state_rhs(params, v_ref, eq.v_inf, eq.z_inf)
            assert dv.is_degenerate
            assert abs(dv.lo) < 1e-12
            assert abs(dz) < 1e-15

    def test_v_inf_tracks_reference(self, params):
        for v_ref in (0.2, 2.0, 7.5):
            assert equilibrium(params, v_ref).v_inf == v_ref


class TestErrorRhs:
    def test_origin_is_fixed_point(self, params):
        first, second = error_rhs(params, 1.0, np.zeros(2))
        assert first.is_degenerate and abs(first.lo) < 1e-14
        assert second == 0.0

    def test_second_component_exact(self, params):
        first, second = error_rhs(params, 1.0, np.array([-1.0, 0.0]))
        assert second == -1.0

    def test_set_valued_branch(self, params):
        v_ref = 1.0
        first, _ = error_rhs(params, v_ref, np.array([-v_ref, 0.3]))
        assert not first.is_degenerate
        # width equals the full relay range scaled by the mass
        F_S = params.mu_S * params.m * params.g
        assert first.hi - first.lo == pytest.approx(2.0 * F_S / params.m)

    def test_coordinate_consistency(self, params, rng):
        # transporting the physical field into error coordinates matches
        v_ref = 1.0
        eq = equilibrium(params, v_ref)
        for _ in range(100):
            eps = rng.uniform(-3.0, 3.0, size=2)
            f_err, s_err = error_rhs(params, v_ref, eps)
            f_phys, s_phys = state_rhs(params, v_ref, v_ref + eps[0], eq.z_inf + eps[1])
            assert f_err.lo == pytest.approx(f_phys.lo, abs=1e-12)
            assert f_err.hi == pytest.approx(f_phys.hi, abs=1e-12)
            assert s_err == pytest.approx(s_phys, abs=1e-12)

    def test_matches_simulated_slope(self, params):
        # finite difference of a slipping trajectory reproduces the field
        v_ref = 1.0
        eq = equilibrium(params, v_ref)
        dt = 1e-5
        for eps in ([2.0, 0.5], [0.7, -1.0], [-0.4, 0.8]):
            traj = simulate(params, v_ref, SimConfig(dt=dt, T=10 * dt, v0=v_ref + eps[0], z0=eq.z_inf + eps[1]))
            dv_num = (traj.v[1] - traj.v[0]) / dt
            first, second = error_rhs(params, v_ref, np.asarray(eps))
            assert first.is_degenerate
            assert dv_num == pytest.approx(first.lo, abs=200 * dt + 1e-8)
            dz_num = (traj.z[1] - traj.z[0]) / dt
            assert dz_num == pytest.approx(second, abs=200 * dt)

    def test_nonlinearity_appears_in_first_component(self, params, rng):
        v_ref = 1.0
        m = build_matrices(params, v_ref)
        for _ in range(50):
            eps = rng.uniform(-0.9, 3.0, size=2)
            first, _ = error_rhs(params, v_ref, eps)
            expected = float(m.A[0] @ eps) + m.B[0, 0] * error_nonlinearity(params, v_ref, eps[0])
            assert first.lo == pytest.approx(expected, abs=1e-12)
