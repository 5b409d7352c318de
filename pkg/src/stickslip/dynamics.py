"""State-space and velocity-error models of the driven mass.

Two coordinate systems are used throughout the package.  The physical
state is ``(v, z)`` with ``v`` the mass velocity and ``z`` the spring
elongation coordinate; its drift is set-valued at ``v = 0``.  The error
state is ``eps = (v - v_ref, z - z_inf)`` relative to the unique
equilibrium, in which the dynamics read ``d(eps)/dt in A eps + B phi(eps1)``
with the friction deviation ``phi`` of :mod:`stickslip.friction`.

Error vectors are plain length-2 ``numpy`` arrays; matrices are dense
2x2 / 2x1 arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .friction import (
    Interval,
    PhysicalParams,
    dry_friction,
    dry_friction_set,
    error_nonlinearity,
    error_slope,
)

__all__ = ["SystemMatrices", "Equilibrium", "build_matrices", "equilibrium", "error_rhs", "state_rhs"]


@dataclass(frozen=True)
class SystemMatrices:
    """Error-dynamics matrices and their linearisation at a reference speed.

    ``A = [[-k_v/m, -k/m], [1, 0]]``, ``B = [-1/m, 0]^T``, ``C = [1, 0]``
    and ``A0 = A + B * slope * C`` where ``slope`` is the derivative of the
    friction deviation at zero error.
    """

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    A0: np.ndarray
    slope: float


@dataclass(frozen=True)
class Equilibrium:
    """Unique equilibrium of the driven system: ``v_inf = v_ref``."""

    v_inf: float
    z_inf: float


def build_matrices(params: PhysicalParams, v_ref: float) -> SystemMatrices:
    """Assemble the error-dynamics matrices for a given reference speed."""
    if v_ref <= 0.0:
        raise ValueError("v_ref must be positive")
    m, k, k_v = params.m, params.k, params.k_v
    A = np.array([[-k_v / m, -k / m], [1.0, 0.0]])
    B = np.array([[-1.0 / m], [0.0]])
    C = np.array([[1.0, 0.0]])
    slope = error_slope(params, v_ref)
    A0 = A + slope * (B @ C)
    return SystemMatrices(A=A, B=B, C=C, A0=A0, slope=slope)


def equilibrium(params: PhysicalParams, v_ref: float) -> Equilibrium:
    """Equilibrium point: the spring force balances friction at the reference speed."""
    if v_ref <= 0.0:
        raise ValueError("v_ref must be positive")
    z_inf = -(dry_friction(params, v_ref) + params.k_v * v_ref) / params.k
    return Equilibrium(v_inf=v_ref, z_inf=z_inf)


def error_rhs(params: PhysicalParams, v_ref: float, eps) -> tuple[Interval, float]:
    """Right-hand side of the error dynamics at ``eps = (eps1, eps2)``.

    Returns ``(first, second)`` where ``second = eps1`` exactly and
    ``first`` is an interval: degenerate whenever ``eps1 != -v_ref``, and
    the full set induced by the rest value of the dry force otherwise.
    The caller (e.g. the simulator) owns the selection policy.
    """
    eps = np.asarray(eps, dtype=float)
    e1, e2 = float(eps[0]), float(eps[1])
    m, k, k_v = params.m, params.k, params.k_v
    lin = -(k_v * e1 + k * e2) / m
    f_ref = dry_friction(params, v_ref)
    fset = dry_friction_set(params, e1 + v_ref)
    # first component: A eps + B * (f_nl(e1+v_ref) - f_nl(v_ref)); B = [-1/m, 0]
    lo = lin - (fset.hi - f_ref) / m
    hi = lin - (fset.lo - f_ref) / m
    return Interval(lo, hi), e1


def state_rhs(params: PhysicalParams, v_ref: float, v: float, z: float) -> tuple[Interval, float]:
    """Right-hand side in physical coordinates ``(v, z)``.

    ``dv/dt`` is interval-valued at ``v = 0``; ``dz/dt = v - v_ref`` exactly.
    """
    m, k, k_v = params.m, params.k, params.k_v
    fset = dry_friction_set(params, v)
    lo = -(fset.hi + k_v * v + k * z) / m
    hi = -(fset.lo + k_v * v + k * z) / m
    return Interval(lo, hi), v - v_ref
