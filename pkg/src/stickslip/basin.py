"""Inner estimate of the basin of attraction of the error-system origin.

Around the equilibrium the friction deviation is smooth; splitting off
its slope at zero error leaves a residual confined, on the strip
``|eps1| <= radius``, to a sector whose gain is the supremum computed by
:func:`stickslip.friction.sector_bound`.  A sector S-procedure yields a
single 3x3 matrix inequality which becomes affine in ``(P, tau, gamma)``
after the substitution ``gamma = tau * lambda``; adding the Schur-form
strip-containment bound ``[[P, C^T], [C, radius^2]] >= 0`` certifies the
ellipse ``{eps : eps^T P eps <= 1}`` as a region of convergence.

``maximize_basin`` runs the radius search: walk down from just below the
reference speed until the inequalities become feasible, then refine the
radius by dichotomy while the minimal-axis bound ``eta`` keeps improving.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import sdpcore
from .dynamics import build_matrices
from .errors import CertificationFailure, PreconditionError
from .friction import PhysicalParams, error_nonlinearity, error_slope, hurwitz_interval, sector_bound
from .sdpcore import PSD, STRICT_NEG, MatrixPencil, SdpProblem

__all__ = [
    "BasinCertificate",
    "local_problem",
    "certify_basin",
    "maximize_basin",
    "check_corollary1",
    "decay_inside",
]

_SYM2 = (
    np.array([[1.0, 0.0], [0.0, 0.0]]),
    np.array([[0.0, 1.0], [1.0, 0.0]]),
    np.array([[0.0, 0.0], [0.0, 1.0]]),
)

# decision vector layout: p11, p12, p22, tau, gamma
_N_VARS = 5
_TAU_FLOOR = 1e-9


@dataclass(frozen=True)
class BasinCertificate:
    """Verified region-of-convergence certificate.

    The ellipse ``{eps : eps^T P eps <= 1}`` converges to the origin; it
    lies inside the sector strip ``|eps1| <= radius`` and its minimal
    semi-axis is at least ``1/sqrt(eta)`` (``P <= eta I``).  ``lam`` is
    the certified sector gain ``gamma / tau``, at least ``lambda_floor``.
    """

    P: np.ndarray
    radius: float
    lam: float
    tau: float
    gamma: float
    eta: float
    lambda_floor: float
    margins: np.ndarray
    v_ref: float

    @property
    def min_semi_axis(self) -> float:
        return 1.0 / math.sqrt(self.eta)


def _require_stable_zone(params: PhysicalParams, v_ref: float) -> None:
    if v_ref <= 0.0:
        raise PreconditionError("v_ref must be positive")
    band = hurwitz_interval(params)
    if band is not None and band[0] <= v_ref <= band[1]:
        raise PreconditionError(
            f"v_ref={v_ref:g} lies in the unstable band [{band[0]:.4g}, {band[1]:.4g}]; "
            "the linearised origin is not Hurwitz there"
        )


def local_problem(
    params: PhysicalParams,
    v_ref: float,
    lambda_floor: float,
    *,
    slope: float | None = None,
) -> SdpProblem:
    """Sector decay pencil in the variables ``(p11, p12, p22, tau, gamma)``.

    ``slope`` overrides the friction-deviation slope at zero error (pass
    ``0.0`` for the flat-curve limit used by the high-speed corollary).
    The linear side constraints ``tau >= 1e-9`` and
    ``gamma >= tau * lambda_floor`` ride along with the pencil.
    """
    _require_stable_zone(params, v_ref)
    mats = build_matrices(params, v_ref)
    G = mats.slope if slope is None else float(slope)
    A0 = mats.A + G * (mats.B @ mats.C)
    Brow = mats.B[:, 0]
    Crow = mats.C[0]
    CtC = np.outer(Crow, Crow)

    bases = []
    for j, Eb in enumerate(_SYM2):
        M = np.zeros((3, 3))
        M[:2, :2] = A0.T @ Eb + Eb @ A0
        M[2, :2] = Brow @ Eb
        M[:2, 2] = Brow @ Eb
        bases.append((j, M))
    Mt = np.zeros((3, 3))
    Mt[:2, :2] = -2.0 * G * G * CtC
    Mt[2, :2] = -2.0 * G * Crow
    Mt[:2, 2] = -2.0 * G * Crow
    Mt[2, 2] = -2.0
    Mg = np.zeros((3, 3))
    Mg[:2, :2] = -2.0 * G * CtC
    Mg[2, :2] = -Crow
    Mg[:2, 2] = -Crow
    bases += [(3, Mt), (4, Mg)]

    e_tau = np.eye(_N_VARS)[3]
    c_lam = np.zeros(_N_VARS)
    c_lam[4] = 1.0
    c_lam[3] = -float(lambda_floor)
    return SdpProblem(
        n_vars=_N_VARS,
        pencils=[MatrixPencil(np.zeros((3, 3)), bases, STRICT_NEG)],
        linear_inequalities=[(e_tau, _TAU_FLOOR), (c_lam, 0.0)],
    )


def _containment_pencil(radius: float) -> MatrixPencil:
    const = np.zeros((3, 3))
    const[2, 2] = radius * radius
    const[0, 2] = const[2, 0] = 1.0
    bases = [(j, np.pad(_SYM2[j], ((0, 1), (0, 1)))) for j in range(3)]
    return MatrixPencil(const, bases, PSD)


def _axis_pencil(eta: float) -> MatrixPencil:
    # eta I - P >= 0
    return MatrixPencil(float(eta) * np.eye(2), [(j, -_SYM2[j]) for j in range(3)], PSD)


def _cap_pencil(cap: np.ndarray) -> MatrixPencil:
    # cap - P >= 0
    return MatrixPencil(np.asarray(cap, dtype=float), [(j, -_SYM2[j]) for j in range(3)], PSD)


def _assemble(params, v_ref, radius, lambda_floor, eta=None, cap=None, slope=None):
    prob = local_problem(params, v_ref, lambda_floor, slope=slope)
    prob.pencils.append(_containment_pencil(radius))
    if eta is not None:
        prob.pencils.append(_axis_pencil(eta))
    if cap is not None:
        prob.pencils.append(_cap_pencil(cap))
    return prob


def _start_point(radius, lambda_floor):
    p = 2.0 / (radius * radius)
    return np.array([p, 0.0, p, 1.0, max(lambda_floor, 1.0) * 1.5, 0.0])[:_N_VARS]


def certify_basin(
    params: PhysicalParams,
    v_ref: float,
    radius: float,
    *,
    cap: np.ndarray | None = None,
    max_bisect: int = 40,
    replay_check: bool = True,
) -> BasinCertificate:
    """Certificate at a fixed sector radius, with the minimal axis optimised.

    Computes the sector gain floor, then minimises ``eta`` (in
    ``P <= eta I``) by bisection over feasibility solves; the analytic
    bound ``eta >= 1/radius^2`` induced by strip containment seeds the
    bracket.  With ``cap`` given, ``P <= cap`` is enforced as well.
    Raises :class:`CertificationFailure` when infeasible at this radius
    and :class:`PreconditionError` outside the stable speed zone.
    """
    _require_stable_zone(params, v_ref)
    if not (0.0 < radius < v_ref):
        raise PreconditionError("radius must satisfy 0 < radius < v_ref")
    lam_floor = sector_bound(params, v_ref, radius)

    prob = _assemble(params, v_ref, radius, lam_floor, cap=cap)
    sol = sdpcore.solve(prob, x0=_start_point(radius, lam_floor))
    if not sol.feasible:
        raise CertificationFailure(
            f"basin inequalities infeasible at radius {radius:g} (v_ref={v_ref:g})",
            diagnostic=sol.reason or "solver-budget",
        )

    # eta bisection: lo is the strip-containment bound, hi comes from the
    # first feasible shape matrix
    x = sol.x
    P = np.array([[x[0], x[1]], [x[1], x[2]]])
    lo = 1.0 / (radius * radius)
    hi = float(sdpcore.sym_eigenvalues(P)[-1]) * (1.0 + 1e-6)
    best_eta, best_x = hi, x
    for _ in range(max_bisect):
        if hi - lo <= 1e-4 * hi:
            break
        mid = 0.5 * (lo + hi)
        prob_mid = _assemble(params, v_ref, radius, lam_floor, eta=mid, cap=cap)
        sol_mid = sdpcore.solve(prob_mid, x0=best_x)
        if sol_mid.feasible:
            hi, best_eta, best_x = mid, mid, sol_mid.x
        else:
            lo = mid
    x = best_x
    prob_final = _assemble(params, v_ref, radius, lam_floor, eta=best_eta, cap=cap)
    margins = sdpcore.verify(prob_final, x)
    P = np.array([[x[0], x[1]], [x[1], x[2]]])
    tau, gam = float(x[3]), float(x[4])
    cert = BasinCertificate(
        P=P, radius=radius, lam=gam / tau, tau=tau, gamma=gam, eta=best_eta,
        lambda_floor=lam_floor, margins=margins, v_ref=v_ref,
    )
    if replay_check:
        worst = decay_inside(params, v_ref, cert.P, n=200, rng=np.random.default_rng(0))
        if worst <= 0.0:
            raise CertificationFailure(
                "basin certificate failed ground-truth decay replay", diagnostic="replay"
            )
    return cert


def maximize_basin(
    params: PhysicalParams,
    v_ref: float,
    *,
    cap: np.ndarray | None = None,
    rel_improve: float = 1e-4,
    max_evals: int = 60,
) -> BasinCertificate:
    """Radius search for the basin with the best minimal-axis bound.

    Starts at ``radius = v_ref * (1 - 1e-6)``; infeasible radii are
    shrunk by 0.95 until the first certificate appears, after which the
    radius is refined by dichotomy (bisecting between the best feasible
    radius and the known infeasible/unhelpful ceiling, plus downward
    probes) while ``eta`` improves by more than ``rel_improve``.  Stops
    at ``radius < 1e-3 * v_ref``.  With ``cap`` given, radii below the
    analytic containment bound ``sqrt((cap^-1)_11)`` are provably
    infeasible and are skipped.
    """
    _require_stable_zone(params, v_ref)
    r_floor = 1e-3 * v_ref
    if cap is not None:
        cap = np.asarray(cap, dtype=float)
        r_need = math.sqrt(float(np.linalg.inv(cap)[0, 0]))
        if r_need >= v_ref * (1.0 - 1e-6):
            raise CertificationFailure(
                f"containment requires sector radius >= {r_need:g}, beyond the "
                f"admissible range at v_ref={v_ref:g}"
            )
        r_floor = max(r_floor, r_need)

    evals = 0

    def attempt(r):
        nonlocal evals
        evals += 1
        try:
            return certify_basin(params, v_ref, r, cap=cap)
        except CertificationFailure:
            return None

    r = v_ref * (1.0 - 1e-6)
    ceiling = None
    best = None
    while r >= r_floor and evals < max_evals:
        best = attempt(r)
        if best is not None:
            break
        ceiling = r
        r *= 0.95
    if best is None:
        raise CertificationFailure(
            f"no feasible sector radius found down to {r_floor:g} (v_ref={v_ref:g})"
        )

    lo_probe = r_floor
    while evals < max_evals:
        improved = False
        if ceiling is not None and ceiling - best.radius > max(1e-9, 1e-4 * v_ref):
            rm = 0.5 * (best.radius + ceiling)
            res = attempt(rm)
            if res is None:
                ceiling = rm
            elif res.eta < best.eta * (1.0 - rel_improve):
                lo_probe = max(lo_probe, best.radius)
                best = res
                improved = True
            else:
                ceiling = rm
        rm = 0.5 * (lo_probe + best.radius)
        if best.radius - rm > max(1e-9, 1e-4 * v_ref) and evals < max_evals:
            res = attempt(rm)
            if res is not None and res.eta < best.eta * (1.0 - rel_improve):
                ceiling = best.radius if ceiling is None else min(ceiling, best.radius)
                best = res
                improved = True
            else:
                lo_probe = rm
        if not improved:
            break
    return best


def check_corollary1(params: PhysicalParams, v_circ: float, *, max_shrink: int = 60,
                     return_solution: bool = False):
    """Joint high-speed certificate: one basin valid for every speed above ``v_circ``.

    Feasibility of a single system pairing the decay pencil at ``v_circ``
    with its flat-slope limit (shared ``P``, ``tau``, ``gamma``) plus the
    containment bound implies local stability with the same ellipse for
    all reference speeds at or beyond ``v_circ``.  The sector radius is
    searched downward exactly like the basin loop.

    Returns a bool, or ``(bool, solution_vector, radius)`` when
    ``return_solution`` is set (solution is ``None`` on failure).
    """
    band = hurwitz_interval(params)
    if band is not None and v_circ < band[1]:
        raise PreconditionError(
            f"v_circ={v_circ:g} must not be below the upper stability root {band[1]:.4g}"
        )
    r = v_circ * (1.0 - 1e-6)
    r_floor = 1e-3 * v_circ
    for _ in range(max_shrink):
        if r < r_floor:
            break
        lam_floor = sector_bound(params, v_circ, r)
        prob = _assemble(params, v_circ, r, lam_floor)
        flat = local_problem(params, v_circ, lam_floor, slope=0.0)
        prob.pencils.append(flat.pencils[0])
        sol = sdpcore.solve(prob, x0=_start_point(r, lam_floor))
        if sol.feasible:
            return (True, sol.x, r) if return_solution else True
        r *= 0.95
    return (False, None, r) if return_solution else False


def decay_inside(params, v_ref, P, n=200, rng=None):
    """Worst decay slack ``min(-dV)`` over sampled points in the ellipse.

    Evaluates ``dV = 2 eps^T P (A0 eps + B psi(eps1))`` with the true
    sector residual at ``n`` nonzero sample points with
    ``eps^T P eps <= 1``.  Positive return means the certified decay
    holds against the actual nonlinearity.
    """
    mats = build_matrices(params, v_ref)
    if rng is None:
        rng = np.random.default_rng(0)
    P = np.asarray(P, dtype=float)
    Bvec = mats.B[:, 0]
    G = mats.slope
    worst = math.inf
    for _ in range(n):
        u = rng.normal(size=2)
        u /= np.linalg.norm(u)
        c = math.exp(rng.uniform(math.log(1e-4), 0.0))
        eps = u * math.sqrt(c / float(u @ P @ u))
        psi = error_nonlinearity(params, v_ref, float(eps[0])) - G * eps[0]
        dV = 2.0 * float(eps @ P @ (mats.A0 @ eps + Bvec * psi))
        worst = min(worst, -dV)
    return worst
