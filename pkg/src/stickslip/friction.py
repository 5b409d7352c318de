"""Friction law of the sliding mass and its stability-analysis companions.

The dry part of the friction force combines a Coulomb level with a
Stribeck overshoot at low speed and is set-valued at rest (the sign is
taken in the convex-hull sense).  This module holds the plant constants,
the force law itself, the shifted nonlinearity seen in velocity-error
coordinates, its slope at the origin, the speed band over which the
linearised error dynamics lose stability, and the sector gain used by
the regional certificates.

All functions are pure; everything is safe to call concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "PhysicalParams",
    "FrictionBounds",
    "Interval",
    "sign_set",
    "dry_friction",
    "dry_friction_set",
    "friction_force",
    "error_nonlinearity",
    "error_slope",
    "error_residual",
    "instability_indicator",
    "hurwitz_interval",
    "sector_bound",
]


@dataclass(frozen=True)
class PhysicalParams:
    """Plant constants of the mass-spring-friction benchmark.

    Defaults are the benchmark values used throughout the test suite.

    Attributes
    ----------
    m : float
        Mass (kg).
    g : float
        Gravitational acceleration (m/s^2).
    v_s : float
        Stribeck velocity (m/s).
    mu_C, mu_S : float
        Coulomb and static friction coefficients, ``mu_S > mu_C > 0``.
    k : float
        Spring stiffness (N/m).
    k_v : float
        Viscous friction coefficient (N*s/m).
    l0 : float
        Spring rest length (m).
    xA0 : float
        Initial anchor position (m).
    """

    m: float = 1.0
    g: float = 9.81
    v_s: float = 0.8
    mu_C: float = 0.2997
    mu_S: float = 0.5994
    k: float = 2.0
    k_v: float = 1.0
    l0: float = 0.0
    xA0: float = 0.0

    def __post_init__(self):
        if not (self.m > 0 and self.g > 0 and self.v_s > 0 and self.k > 0):
            raise ValueError("m, g, v_s and k must be strictly positive")
        # k_v = 0 is admitted so the non-Hurwitz stress case is representable;
        # the certification routines then report failure at every grid point.
        if self.k_v < 0:
            raise ValueError("k_v must be nonnegative")
        if not (self.mu_S > self.mu_C > 0):
            raise ValueError("friction coefficients must satisfy mu_S > mu_C > 0")


@dataclass(frozen=True)
class FrictionBounds:
    """Force levels delimiting the dry-friction relay band.

    ``R_N`` is the normal force, ``F_C = mu_C * R_N`` the Coulomb level and
    ``F_S = mu_S * R_N`` the static level, with ``0 < F_C < F_S``.
    """

    F_C: float
    F_S: float
    R_N: float

    @classmethod
    def from_params(cls, params: PhysicalParams) -> "FrictionBounds":
        R_N = params.m * params.g
        return cls(F_C=params.mu_C * R_N, F_S=params.mu_S * R_N, R_N=R_N)

    def __post_init__(self):
        if not (0 < self.F_C < self.F_S):
            raise ValueError("force levels must satisfy 0 < F_C < F_S")


@dataclass(frozen=True)
class Interval:
    """Closed real interval ``[lo, hi]``; degenerate when ``lo == hi``."""

    lo: float
    hi: float

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError("interval requires lo <= hi")

    @property
    def is_degenerate(self) -> bool:
        return self.lo == self.hi

    def contains(self, x: float, tol: float = 0.0) -> bool:
        return self.lo - tol <= x <= self.hi + tol

    def shift(self, c: float) -> "Interval":
        return Interval(self.lo + c, self.hi + c)


def sign_set(theta: float) -> Interval:
    """Set-valued sign: ``{theta/|theta|}`` for nonzero arguments, ``[-1, 1]`` at zero."""
    if theta == 0.0:
        return Interval(-1.0, 1.0)
    s = math.copysign(1.0, theta)
    return Interval(s, s)


def _dry_magnitude(params: PhysicalParams, v: float) -> float:
    # Coulomb level plus the Stribeck overshoot at speed |v|.
    b = FrictionBounds.from_params(params)
    return b.R_N * (params.mu_C + (params.mu_S - params.mu_C) * math.exp(-((v / params.v_s) ** 2)))


def dry_friction(params: PhysicalParams, v: float) -> float:
    """Single-valued dry friction force at nonzero speed (N).

    Combines the Coulomb level with the Stribeck overshoot; odd in ``v``.
    Raises ``ValueError`` at ``v = 0`` where the force is the whole set
    ``[-F_S, F_S]`` (use :func:`dry_friction_set` there).
    """
    if v == 0.0:
        raise ValueError("dry friction is set-valued at v = 0; use dry_friction_set")
    return _dry_magnitude(params, v) * math.copysign(1.0, v)


def dry_friction_set(params: PhysicalParams, v: float) -> Interval:
    """Dry friction force as a (possibly degenerate) interval."""
    if v == 0.0:
        F_S = FrictionBounds.from_params(params).F_S
        return Interval(-F_S, F_S)
    f = dry_friction(params, v)
    return Interval(f, f)


def friction_force(params: PhysicalParams, v: float) -> Interval:
    """Total friction force: dry part plus the viscous term ``k_v * v``."""
    return dry_friction_set(params, v).shift(params.k_v * v)


def error_nonlinearity(params: PhysicalParams, v_ref: float, e1: float) -> float:
    """Dry-friction deviation seen from the operating speed.

    Value of the dry force at speed ``v_ref + e1`` minus its value at
    ``v_ref``; vanishes at ``e1 = 0``.  Single-valued branch only:
    ``e1 = -v_ref`` is rejected (the force is set-valued there).
    """
    if v_ref <= 0.0:
        raise ValueError("v_ref must be positive")
    if e1 == -v_ref:
        raise ValueError("set-valued point e1 = -v_ref; no single value exists")
    return dry_friction(params, e1 + v_ref) - dry_friction(params, v_ref)


def error_slope(params: PhysicalParams, v_ref: float) -> float:
    """Slope of :func:`error_nonlinearity` at zero error (N*s/m); <= 0 for v_ref > 0."""
    if v_ref <= 0.0:
        raise ValueError("v_ref must be positive")
    b = FrictionBounds.from_params(params)
    vs2 = params.v_s**2
    return -2.0 * b.R_N * (params.mu_S - params.mu_C) * (v_ref / vs2) * math.exp(-(v_ref**2) / vs2)


def error_residual(params: PhysicalParams, v_ref: float, e1: float) -> float:
    """Nonlinearity minus its linear part; flat to first order at zero error."""
    return error_nonlinearity(params, v_ref, e1) - error_slope(params, v_ref) * e1


def instability_indicator(params: PhysicalParams, v_ref: float) -> float:
    """``|v_ref| * exp(-(v_ref/v_s)^2)``, the quantity whose level set bounds the unstable speed band.

    Nonnegative, unimodal on ``v_ref >= 0`` with maximiser ``v_s / sqrt(2)``.
    """
    return abs(v_ref) * math.exp(-((v_ref / params.v_s) ** 2))


def _hurwitz_threshold(params: PhysicalParams) -> float:
    b = FrictionBounds.from_params(params)
    return params.k_v * params.v_s**2 / (2.0 * b.R_N * (params.mu_S - params.mu_C))


def hurwitz_interval(params: PhysicalParams, tol: float = 1e-9):
    """Speed band over which the linearised error dynamics are unstable.

    Solves ``instability_indicator(v) = k_v v_s^2 / (2 R_N (mu_S - mu_C))``
    by bisection on the two monotone branches around the maximiser
    ``v_s / sqrt(2)``.  Returns the pair ``(v_ref1, v_ref2)`` of roots
    (``v_ref1 < v_ref2``), or ``None`` when the threshold exceeds the
    maximum of the indicator, in which case the linearisation is Hurwitz
    at every positive reference speed.
    """
    thr = _hurwitz_threshold(params)
    v_peak = params.v_s / math.sqrt(2.0)
    peak = instability_indicator(params, v_peak)
    if thr > peak:
        return None
    if thr <= 0.0:
        # only reachable with k_v = 0: unstable for every positive speed
        return (0.0, math.inf)

    def f(v):
        return instability_indicator(params, v) - thr

    def bisect(lo, hi):
        flo = f(lo)
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if hi - lo < tol:
                return mid
            if (f(mid) <= 0.0) == (flo <= 0.0):
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    v_up = 2.0 * v_peak
    while f(v_up) >= 0.0:
        v_up *= 2.0
    r1 = bisect(0.0, v_peak)
    r2 = bisect(v_peak, v_up)
    return (r1, r2)


def sector_bound(
    params: PhysicalParams, v_ref: float, radius: float, grid: int = 4096
) -> float:
    """Smallest sector gain covering the error nonlinearity on ``[-radius, radius]``.

    Supremum of ``-error_nonlinearity(e)/e`` over ``[-radius, 0) u (0, radius]``,
    computed by a dense grid scan (``grid`` points per side) followed by
    golden-section refinement around the best bracket.  Always at least
    ``-error_slope(v_ref)`` (the limit at zero error).

    ``radius = v_ref`` is admitted; the one-sided rest limit ``F_S`` of the
    dry force is used at the endpoint ``e = -radius`` in that case.
    """
    if v_ref <= 0.0:
        raise ValueError("v_ref must be positive")
    if not (0.0 < radius <= v_ref):
        raise ValueError("radius must satisfy 0 < radius <= v_ref")
    b = FrictionBounds.from_params(params)
    f_ref = dry_friction(params, v_ref)

    def g_scalar(e: float) -> float:
        v = e + v_ref
        if v == 0.0:
            f = b.F_S  # one-sided rest limit of the dry force
        else:
            f = _dry_magnitude(params, v) * math.copysign(1.0, v)
        return -(f - f_ref) / e

    best = -error_slope(params, v_ref)
    inv_gr = 0.5 * (math.sqrt(5.0) - 1.0)
    for side in (-1.0, 1.0):
        e = side * radius * np.linspace(1.0 / grid, 1.0, grid)
        v = e + v_ref
        mag = b.R_N * (
            params.mu_C + (params.mu_S - params.mu_C) * np.exp(-((v / params.v_s) ** 2))
        )
        f = np.where(v == 0.0, b.F_S, mag * np.sign(v))
        gv = -(f - f_ref) / e
        i = int(np.argmax(gv))
        if gv[i] > best:
            best = float(gv[i])
        # golden-section pass on the bracket around the best grid point
        lo = float(e[max(0, i - 1)])
        hi = float(e[min(grid - 1, i + 1)])
        a, bb = min(lo, hi), max(lo, hi)
        c = bb - inv_gr * (bb - a)
        d = a + inv_gr * (bb - a)
        fc, fd = g_scalar(c), g_scalar(d)
        for _ in range(80):
            if fc > fd:
                bb, d, fd = d, c, fc
                c = bb - inv_gr * (bb - a)
                fc = g_scalar(c)
            else:
                a, c, fc = c, d, fd
                d = a + inv_gr * (bb - a)
                fd = g_scalar(d)
            if bb - a < 1e-13 * radius:
                break
        best = max(best, fc, fd)
    return best
