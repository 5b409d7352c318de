import math

import numpy as np
import pytest

from stickslip import (
    CertificationFailure,
    PreconditionError,
    SimConfig,
    boundary_containment,
    certify_gas,
    equilibrium,
    find_gas_threshold,
    simulate,
)


class TestCertifyGas:
    def test_certified_at_v10(self, gas_v10):
        assert gas_v10.inclusion_margin >= -1e-10
        assert gas_v10.attractor.eta > 0.0
        assert gas_v10.basin.radius < 10.0

    def test_shape_ordering(self, gas_v10):
        diff = gas_v10.attractor.P - gas_v10.basin.P
        assert np.linalg.eigvalsh(diff).min() >= -1e-10

    def test_failure_at_v3(self, params):
        with pytest.raises(CertificationFailure):
            certify_gas(params, 3.0)

    def test_unstable_band_rejected(self, params):
        with pytest.raises(PreconditionError):
            certify_gas(params, 1.0)

    def test_geometric_containment_replay(self, gas_v10, rng):
        worst = boundary_containment(gas_v10, n=500, rng=rng)
        assert worst >= -1e-9

    def test_dynamical_replay(self, params, gas_v10, rng):
        # trajectories from random large initial errors converge at a
        # certified speed
        v_ref = 10.0
        eq = equilibrium(params, v_ref)
        for _ in range(20):
            d = rng.normal(size=2)
            d = d / np.linalg.norm(d) * rng.uniform(0.0, 50.0)
            traj = simulate(
                params, v_ref,
                SimConfig(dt=1e-3, T=120.0, v0=v_ref + d[0], z0=eq.z_inf + d[1]),
            )
            err = math.hypot(traj.v[-1] - v_ref, traj.z[-1] - eq.z_inf)
            assert err < 1e-3


class TestThresholdSearch:
    def test_quick_bracket(self, params):
        thr = find_gas_threshold(params, 7.0, 9.5, tol=0.5, sweep_points=4)
        assert 7.0 <= thr <= 9.5
        # the returned speed certifies, by the definition of the search
        certify_gas(params, thr)

    def test_bad_window_rejected(self, params):
        with pytest.raises(PreconditionError):
            find_gas_threshold(params, 1.0, 20.0, tol=0.1)
        with pytest.raises(PreconditionError):
            find_gas_threshold(params, 5.0, 4.0, tol=0.1)
        with pytest.raises(PreconditionError):
            find_gas_threshold(params, 5.0, 20.0, tol=-1.0)

    def test_uncertifiable_top_reported(self, params):
        with pytest.raises(CertificationFailure):
            find_gas_threshold(params, 1.5, 3.0, tol=0.2, sweep_points=4)
