"""Global asymptotic stability: trap region contained in the basin estimate.

If the ellipsoidal trap set of :mod:`stickslip.attractor` lies inside the
region of convergence of :mod:`stickslip.basin` (equivalently
``P_trap - P_basin >= 0``), every trajectory eventually enters the basin
and converges to the equilibrium.  ``certify_gas`` runs the two-stage
search: trap certificate first, then the basin radius dichotomy with the
containment pencil carried by every inner solve; a bounded alternation
pass (re-solving the trap stage floored by a known basin shape) reduces
conservatism when the first pass fails.

``find_gas_threshold`` locates the smallest certified reference speed by
a coarse log-spaced sweep plus bisection.  The result is a one-sided
certificate boundary for this toolkit, not the true stability boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .attractor import AttractorCertificate, certify_attractor
from .basin import BasinCertificate, maximize_basin
from .dynamics import build_matrices
from .errors import CertificationFailure, PreconditionError
from .friction import PhysicalParams, hurwitz_interval
from .sdpcore import sym_eigenvalues

__all__ = ["GasCertificate", "certify_gas", "find_gas_threshold", "boundary_containment"]


@dataclass(frozen=True)
class GasCertificate:
    """Joint certificate of global asymptotic stability.

    ``inclusion_margin`` is the smallest eigenvalue of
    ``attractor.P - basin.P`` (independently re-verified); nonnegative up
    to the 1e-10 tolerance, so the trap ellipsoid sits inside the basin.
    """

    attractor: AttractorCertificate
    basin: BasinCertificate
    inclusion_margin: float


def _require_gas_zone(params: PhysicalParams, v_ref: float) -> None:
    if v_ref <= 0.0:
        raise PreconditionError("v_ref must be positive")
    band = hurwitz_interval(params)
    if band is not None and band[0] <= v_ref <= band[1]:
        raise PreconditionError(
            f"v_ref={v_ref:g} lies in the unstable band [{band[0]:.4g}, {band[1]:.4g}]"
        )
    A = build_matrices(params, v_ref).A
    tr = float(A[0, 0] + A[1, 1])
    det = float(A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0])
    if not (tr < 0.0 and det > 0.0):
        raise PreconditionError("drift matrix is not Hurwitz")


def _assemble(params, v_ref, cert_a: AttractorCertificate, cert_b: BasinCertificate,
              replay_check: bool) -> GasCertificate:
    margin = float(sym_eigenvalues(cert_a.P - cert_b.P)[0])
    if margin < -1e-10:
        raise CertificationFailure(
            f"containment margin {margin:g} below tolerance", diagnostic="inclusion"
        )
    cert = GasCertificate(attractor=cert_a, basin=cert_b, inclusion_margin=margin)
    if replay_check:
        worst = boundary_containment(cert, n=500, rng=np.random.default_rng(0))
        if worst < -1e-9:
            raise CertificationFailure(
                "trap boundary escapes the basin in geometric replay", diagnostic="replay"
            )
    return cert


def certify_gas(
    params: PhysicalParams,
    v_ref: float,
    *,
    grid_size: int = 100,
    alternation_rounds: int = 3,
    replay_check: bool = True,
    attractor_cert: AttractorCertificate | None = None,
    base_basin: BasinCertificate | None = None,
) -> GasCertificate:
    """Two-stage global-stability certificate at one reference speed.

    Stage 1 computes the trap certificate (largest ``eta``).  Stage 2
    reruns the basin radius dichotomy with the containment pencil
    ``P_trap - P_basin >= 0`` inside every solve.  If that fails, up to
    ``alternation_rounds`` passes retry stage 1 floored by the best
    unconstrained basin shape (``P_trap >= P_basin``), which certifies
    containment by construction when feasible.

    Callers that already hold the stage-1 certificate or the
    unconstrained basin may pass them in to avoid re-solving.

    Raises :class:`PreconditionError` outside the stable zone and
    :class:`CertificationFailure` when no containment is found; the
    latter is a budget verdict, not a disproof.
    """
    _require_gas_zone(params, v_ref)
    cert_a = attractor_cert
    if cert_a is None:
        cert_a = certify_attractor(params, v_ref, grid_size=grid_size, replay_check=replay_check)
    try:
        cert_b = maximize_basin(params, v_ref, cap=cert_a.P)
        return _assemble(params, v_ref, cert_a, cert_b, replay_check)
    except CertificationFailure:
        pass

    for _ in range(max(0, alternation_rounds)):
        if base_basin is None:
            base_basin = maximize_basin(params, v_ref)  # may raise CertificationFailure
        try:
            cert_a2 = certify_attractor(
                params, v_ref, grid_size=grid_size,
                floor_mat=base_basin.P, replay_check=replay_check,
            )
        except CertificationFailure:
            break
        try:
            return _assemble(params, v_ref, cert_a2, base_basin, replay_check)
        except CertificationFailure:
            pass
        try:
            cert_b2 = maximize_basin(params, v_ref, cap=cert_a2.P)
            return _assemble(params, v_ref, cert_a2, cert_b2, replay_check)
        except CertificationFailure:
            break
    raise CertificationFailure(
        f"no containment of the trap region inside a certified basin at v_ref={v_ref:g}"
    )


def find_gas_threshold(
    params: PhysicalParams,
    v_lo: float,
    v_hi: float,
    tol: float,
    *,
    sweep_points: int = 16,
    grid_size: int = 100,
) -> float:
    """Smallest certified globally-stable reference speed in ``[v_lo, v_hi]``.

    Sweeps ``sweep_points`` log-spaced speeds to bracket the transition,
    then bisects between the largest failing and smallest succeeding
    speeds down to ``tol``.  Requires ``v_lo`` above the unstable band and
    ``v_hi`` itself certifiable.  The returned value certifies; speeds
    below it are merely not certified by this toolkit.
    """
    band = hurwitz_interval(params)
    if band is not None and v_lo <= band[1]:
        raise PreconditionError(
            f"v_lo={v_lo:g} must exceed the upper stability root {band[1]:.4g}"
        )
    if not (0.0 < v_lo < v_hi):
        raise PreconditionError("need 0 < v_lo < v_hi")
    if tol <= 0.0:
        raise PreconditionError("tol must be positive")

    def certifies(v):
        try:
            certify_gas(params, v, grid_size=grid_size)
            return True
        except CertificationFailure:
            return False

    if not certifies(v_hi):
        raise CertificationFailure(f"upper sweep end v_hi={v_hi:g} is not certifiable")

    grid = np.geomspace(v_lo, v_hi, sweep_points)
    fail = v_lo if not certifies(v_lo) else None
    if fail is None:
        return float(v_lo)
    succeed = float(v_hi)
    for v in grid[1:-1]:
        if certifies(float(v)):
            succeed = float(v)
            break
        fail = float(v)

    while succeed - fail > tol:
        mid = 0.5 * (succeed + fail)
        if certifies(mid):
            succeed = mid
        else:
            fail = mid
    return succeed


def boundary_containment(cert: GasCertificate, n: int = 500, rng=None) -> float:
    """Worst containment slack ``min(1 - eps^T P_basin eps)`` on the trap boundary.

    Samples ``n`` points uniformly in angle on ``{eps^T P_trap eps = 1}``;
    a value of at least ``-1e-9`` confirms the geometric inclusion of the
    trap set in the basin ellipse.
    """
    if rng is None:
        rng = np.random.default_rng(0)
    Pa = cert.attractor.P
    Pb = cert.basin.P
    worst = math.inf
    for _ in range(n):
        u = rng.normal(size=2)
        u /= np.linalg.norm(u)
        eps = u / math.sqrt(float(u @ Pa @ u))
        worst = min(worst, 1.0 - float(eps @ Pb @ eps))
    return worst
