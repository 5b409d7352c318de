"""Ellipsoidal outer estimate of the global trap region of the error dynamics.

The dry-friction deviation is encapsulated between two relays
(``F_C <= |f| <= F_S`` away from rest, with the force opposing slip), and
an S-procedure over that envelope produces two 4x4 matrix inequalities,
affine in the shape matrix ``P`` and the multipliers once the scalar
``tau0`` is fixed.  Feasibility guarantees that every trajectory enters
the ellipsoid ``{eps : eps^T P eps < 1}`` and stays.

``certify_attractor`` sweeps a uniform ``tau0`` grid over the admissible
range, maximises the minimum eigenvalue bound ``eta`` of ``P`` at each
grid point (smallest maximal semi-axis ``1/sqrt(eta)``), and keeps the
best certificate after one golden-section refinement pass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import sdpcore
from .dynamics import build_matrices
from .errors import CertificationFailure
from .friction import FrictionBounds, PhysicalParams, dry_friction, error_nonlinearity
from .sdpcore import PSD, STRICT_NEG, MatrixPencil, SdpProblem

__all__ = [
    "AttractorCertificate",
    "tau0_max",
    "attractor_problem",
    "certify_attractor",
    "decay_outside",
]

# symmetric 2x2 coordinate bases for the entries (p11, p12, p22)
_SYM2 = (
    np.array([[1.0, 0.0], [0.0, 0.0]]),
    np.array([[0.0, 1.0], [1.0, 0.0]]),
    np.array([[0.0, 0.0], [0.0, 1.0]]),
)

# decision vector layout: p11, p12, p22, tau1, tau2, tau3, tau4, tau5
_N_VARS = 8
_SIGNED_TAUS = (3, 4, 5, 7)  # tau1, tau2, tau3, tau5 >= 0; tau4 free


@dataclass(frozen=True)
class AttractorCertificate:
    """Verified trap-region certificate.

    ``P`` is positive definite and ``eps^T P eps < 1`` is entered by all
    trajectories; ``eta <= min_eig(P)`` so the maximal semi-axis is at
    most ``1/sqrt(eta)``.  ``margins`` are the independently re-verified
    slacks of the two strict pencils and the ``P - eta I`` bound.
    """

    P: np.ndarray
    tau0: float
    tau1: float
    tau2: float
    tau3: float
    tau4: float
    tau5: float
    eta: float
    margins: np.ndarray
    v_ref: float

    @property
    def max_semi_axis(self) -> float:
        return 1.0 / math.sqrt(self.eta)


def _eig_real_parts_2x2(A: np.ndarray) -> tuple[float, float]:
    tr = float(A[0, 0] + A[1, 1])
    det = float(A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0])
    disc = tr * tr - 4.0 * det
    if disc < 0.0:
        return 0.5 * tr, 0.5 * tr
    r = math.sqrt(disc)
    return 0.5 * (tr - r), 0.5 * (tr + r)


def tau0_max(A) -> float:
    """Upper end ``-2 max Re(eig(A))`` of the admissible ``tau0`` range.

    Rejects matrices that are not Hurwitz (including boundary eigenvalues
    on the imaginary axis).
    """
    A = np.asarray(A, dtype=float)
    if A.shape != (2, 2):
        raise ValueError("2x2 matrix expected")
    _, re_max = _eig_real_parts_2x2(A)
    if re_max >= 0.0:
        raise ValueError("matrix is not Hurwitz; no admissible tau0 range exists")
    return -2.0 * re_max


def attractor_problem(
    params: PhysicalParams,
    v_ref: float,
    tau0: float,
    *,
    eta: float | None = None,
    floor_mat: np.ndarray | None = None,
) -> SdpProblem:
    """Assemble the two trap-region pencils for a fixed multiplier ``tau0``.

    Variables are ``(p11, p12, p22, tau1, ..., tau5)``.  The bilinear
    ``tau0 * P`` term is resolved by the fixed ``tau0``.  Both 4x4 pencils
    share ``P``; sign constraints on ``tau1, tau2, tau3, tau5`` ride along
    as linear inequalities.  Optionally appends ``P - eta I >= 0`` (the
    axis bound) and ``P - floor_mat >= 0`` (a containment floor).
    """
    mats = build_matrices(params, v_ref)
    b = FrictionBounds.from_params(params)
    f_ref = dry_friction(params, v_ref)

    D = np.hstack([mats.A, mats.B, -f_ref * mats.B])  # 2x4
    F = np.hstack([np.eye(2), np.zeros((2, 2))])      # 2x4
    pi1 = np.zeros((1, 4)); pi1[0, 0] = 1.0
    pi3 = np.zeros((1, 4)); pi3[0, 2] = 1.0
    pi4 = np.zeros((1, 4)); pi4[0, 3] = 1.0
    p14 = pi1 + v_ref * pi4

    env_static = pi3.T @ pi3 - b.F_S**2 * (pi4.T @ pi4)     # f^2 <= F_S^2
    env_coulomb = b.F_C**2 * (pi4.T @ pi4) - pi3.T @ pi3    # F_C^2 <= f^2
    env_passive = -(p14.T @ pi3 + pi3.T @ p14)              # slip opposes force
    env_rest = p14.T @ p14                                  # (e1 + v_ref)^2, zero at rest

    bases1 = []
    bases2 = []
    for j, Eb in enumerate(_SYM2):
        M = D.T @ Eb @ F
        M = M + M.T + tau0 * (F.T @ Eb @ F)
        bases1.append((j, M))
        bases2.append((j, M))
    bases1 += [(3, -env_static), (4, -env_coulomb), (5, -env_passive)]
    bases2 += [(7, -env_static), (6, -env_rest)]
    const = -tau0 * (pi4.T @ pi4)

    pencils = [
        MatrixPencil(const, bases1, STRICT_NEG),
        MatrixPencil(const, bases2, STRICT_NEG),
    ]
    if eta is not None:
        pencils.append(
            MatrixPencil(-float(eta) * np.eye(2), [(j, _SYM2[j]) for j in range(3)], PSD)
        )
    if floor_mat is not None:
        pencils.append(
            MatrixPencil(-np.asarray(floor_mat, dtype=float),
                         [(j, _SYM2[j]) for j in range(3)], PSD)
        )
    lin = [(np.eye(_N_VARS)[i], 0.0) for i in _SIGNED_TAUS]
    return SdpProblem(n_vars=_N_VARS, pencils=pencils, linear_inequalities=lin)


_X0 = np.array([1.0, 0.0, 1.0, 1.0, 1.0, 1.0, 0.0, 1.0])

# Internally the certification search eliminates the free multiplier of the
# rest-point pencil: that pencil is only required on the null space of the
# row (pi1 + v_ref pi4), and by Finsler's lemma negativity there is exactly
# equivalent to the existence of some tau4.  The projected 3x3 pencil in
# (P, tau5) removes the unbounded multiplier ray that otherwise lets the
# barrier inflate the pencil norm and ruin the normalised margins; tau4 is
# recovered afterwards and the certificate re-verified in the original form.
_PROJ_VARS = 7  # p11, p12, p22, tau1, tau2, tau3, tau5
_PX0 = np.array([1.0, 0.0, 1.0, 1.0, 1.0, 1.0, 1.0])


def _projected_problem(params, v_ref, tau0, *, eta=None, floor_mat=None) -> SdpProblem:
    full = attractor_problem(params, v_ref, tau0)
    pen1, pen2 = full.pencils[0], full.pencils[1]
    # null-space basis of [1, 0, 0, v_ref]
    N = np.zeros((4, 3))
    N[1, 0] = 1.0
    N[2, 1] = 1.0
    N[0, 2] = -v_ref
    N[3, 2] = 1.0

    def remap(idx):
        # drop tau4 (index 6); tau5 (7) becomes index 6
        return idx if idx < 6 else 6

    bases1 = [(remap(i), B) for i, B in pen1.bases]
    bases2 = [(remap(i), N.T @ B @ N) for i, B in pen2.bases if i != 6]
    pencils = [
        MatrixPencil(pen1.constant, bases1, STRICT_NEG),
        MatrixPencil(N.T @ pen2.constant @ N, bases2, STRICT_NEG),
    ]
    if eta is not None:
        pencils.append(
            MatrixPencil(-float(eta) * np.eye(2), [(j, _SYM2[j]) for j in range(3)], PSD)
        )
    if floor_mat is not None:
        pencils.append(
            MatrixPencil(-np.asarray(floor_mat, dtype=float),
                         [(j, _SYM2[j]) for j in range(3)], PSD)
        )
    lin = [(np.eye(_PROJ_VARS)[i], 0.0) for i in (3, 4, 5, 6)]
    return SdpProblem(n_vars=_PROJ_VARS, pencils=pencils, linear_inequalities=lin)


def _recover_tau4(params, v_ref, tau0, x_proj):
    """Margin-optimal tau4 for the rest-point pencil at a projected solution."""
    full = attractor_problem(params, v_ref, tau0)
    pen2 = full.pencils[1]
    base = pen2.constant.copy()
    for i, B in pen2.bases:
        if i == 6:
            direction = B  # equals -rest-point outer product
        elif i < 6:
            base = base + x_proj[i] * B
        else:
            base = base + x_proj[6] * B

    def margin(t4):
        M = base + t4 * direction
        w = np.linalg.eigvalsh(M)
        nrm = float(np.linalg.norm(M))
        return -w[-1] / nrm if nrm > 0.0 else 0.0

    # bracket a feasible tau4 (Finsler guarantees one exists for large values)
    lo, hi = 0.0, 1.0
    for _ in range(60):
        if margin(hi) > 0.0:
            break
        lo, hi = hi, hi * 2.0
    # golden-section the unimodal normalised margin over [lo, 8 hi]
    a, b = lo, 8.0 * hi
    inv_gr = 0.5 * (math.sqrt(5.0) - 1.0)
    c = b - inv_gr * (b - a)
    d = a + inv_gr * (b - a)
    fc, fd = margin(c), margin(d)
    for _ in range(70):
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - inv_gr * (b - a)
            fc = margin(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_gr * (b - a)
            fd = margin(d)
        if b - a <= 1e-9 * max(1.0, b):
            break
    return c if fc >= fd else d


def _feasible_at(params, v_ref, tau0, eta, floor_mat, x0):
    prob = _projected_problem(params, v_ref, tau0, eta=eta, floor_mat=floor_mat)
    sol = sdpcore.solve(prob, x0=x0)
    return sol


def _max_eta_at_tau0(params, v_ref, tau0, prune_below, floor_mat, x_warm, max_bisect=40):
    """Largest eta feasible at this tau0, by bisection over feasibility solves.

    Returns ``(eta, x)`` or ``(None, x_last)`` when the challenge value
    ``prune_below`` is already infeasible (the grid point cannot improve
    on the incumbent).
    """
    probe = max(prune_below, 1e-9)
    x0 = _PX0 if x_warm is None else x_warm
    sol = _feasible_at(params, v_ref, tau0, probe, floor_mat, x0)
    if not sol.feasible:
        return None, x_warm
    lo, x_lo = probe, sol.x
    hi = max(2.0 * probe, 1e-3)
    while hi < 1e12:
        sol = _feasible_at(params, v_ref, tau0, hi, floor_mat, x_lo)
        if not sol.feasible:
            break
        lo, x_lo = hi, sol.x
        hi *= 2.0
    else:
        return lo, x_lo
    for _ in range(max_bisect):
        if hi - lo <= 1e-4 * hi:
            break
        mid = 0.5 * (lo + hi)
        sol = _feasible_at(params, v_ref, tau0, mid, floor_mat, x_lo)
        if sol.feasible:
            lo, x_lo = mid, sol.x
        else:
            hi = mid
    return lo, x_lo


def certify_attractor(
    params: PhysicalParams,
    v_ref: float,
    grid_size: int = 100,
    *,
    refine: bool = True,
    floor_mat: np.ndarray | None = None,
    replay_check: bool = True,
) -> AttractorCertificate:
    """Best trap-region certificate over a uniform ``tau0`` grid.

    Each grid point is first challenged at the incumbent ``eta`` (a grid
    point that cannot beat the incumbent is skipped without changing the
    result), then maximised by bisection.  A golden-section pass then
    refines ``tau0`` around the best grid point.  Raises
    :class:`CertificationFailure` when every grid point fails, which for
    a Hurwitz drift matrix indicates a solver-budget problem only.
    """
    mats = build_matrices(params, v_ref)
    _, re_max = _eig_real_parts_2x2(mats.A)
    if re_max < 0.0:
        hi = -2.0 * re_max
        grid = np.linspace(0.0, hi, max(2, grid_size))
    else:
        # non-Hurwitz drift: the admissible range degenerates; every point fails
        grid = np.array([0.0])

    best_eta = 0.0
    best = None  # (eta, tau0, x)
    x_warm = None

    def consider(tau0, max_bisect=40):
        nonlocal best_eta, best, x_warm
        eta, x = _max_eta_at_tau0(
            params, v_ref, float(tau0),
            prune_below=best_eta * 1.0005 if best_eta > 0.0 else 0.0,
            floor_mat=floor_mat, x_warm=x_warm, max_bisect=max_bisect,
        )
        if x is not None:
            x_warm = x
        if eta is not None and eta > best_eta:
            best_eta = eta
            best = (eta, float(tau0), x)

    # coarse pass (centre-out: the best multiplier usually sits mid-range)
    # seeds the incumbent so most fine-grid points are challenged off cheaply
    stride = max(1, len(grid) // 10)
    coarse = list(range(0, len(grid), stride))
    coarse.sort(key=lambda i: abs(i - len(grid) // 2))
    for i in coarse:
        consider(grid[i], max_bisect=18)
    for i, tau0 in enumerate(grid):
        if i % stride == 0:
            continue
        consider(tau0)

    if best is None:
        raise CertificationFailure(
            f"trap-region inequalities infeasible at every tau0 grid point "
            f"(v_ref={v_ref:g}, {len(grid)} points)"
        )

    if refine and len(grid) > 1:
        step = grid[1] - grid[0]
        a = max(grid[0], best[1] - step)
        bnd = min(grid[-1], best[1] + step)
        inv_gr = 0.5 * (math.sqrt(5.0) - 1.0)
        c = bnd - inv_gr * (bnd - a)
        d = a + inv_gr * (bnd - a)
        for _ in range(8):
            for t in (c, d):
                consider(t)
            a, bnd = max(a, best[1] - (bnd - a) * 0.5), min(bnd, best[1] + (bnd - a) * 0.5)
            c = bnd - inv_gr * (bnd - a)
            d = a + inv_gr * (bnd - a)
            if bnd - a <= 1e-3 * step:
                break

    eta, tau0, xp = best
    tau4 = _recover_tau4(params, v_ref, tau0, xp)
    x = np.array([xp[0], xp[1], xp[2], xp[3], xp[4], xp[5], tau4, xp[6]])
    prob = attractor_problem(params, v_ref, tau0, eta=eta, floor_mat=floor_mat)
    margins = sdpcore.verify(prob, x)
    if not all(
        m >= (sdpcore.MARGIN_FLOOR if p.sense == sdpcore.STRICT_NEG else -sdpcore.PSD_TOL)
        for p, m in zip(prob.pencils, margins)
    ):
        raise CertificationFailure(
            "recovered certificate lost its verified margin", diagnostic="margin"
        )
    P = np.array([[x[0], x[1]], [x[1], x[2]]])
    if sdpcore.sym_eigenvalues(P)[0] <= 0.0:
        raise CertificationFailure("certificate shape matrix is not positive definite")
    cert = AttractorCertificate(
        P=P, tau0=tau0, tau1=x[3], tau2=x[4], tau3=x[5], tau4=x[6], tau5=x[7],
        eta=eta, margins=margins, v_ref=v_ref,
    )
    if replay_check:
        worst = decay_outside(params, v_ref, cert.P, n=200, rng=np.random.default_rng(0))
        if worst <= 0.0:
            raise CertificationFailure(
                "trap certificate failed ground-truth decay replay", diagnostic="replay"
            )
    return cert


def decay_outside(params, v_ref, P, n=200, rng=None, c_range=(1.01, 100.0)):
    """Worst decay slack ``min(-dV)`` over sampled points outside the ellipsoid.

    Samples ``n`` points with ``eps^T P eps`` in ``c_range`` and evaluates
    ``dV = 2 eps^T P (A eps + B phi(eps1))`` against the true friction
    deviation (both relay extremes at the set-valued point).  A valid
    certificate yields a strictly positive return value.
    """
    mats = build_matrices(params, v_ref)
    b = FrictionBounds.from_params(params)
    f_ref = dry_friction(params, v_ref)
    if rng is None:
        rng = np.random.default_rng(0)
    P = np.asarray(P, dtype=float)
    Bvec = mats.B[:, 0]
    worst = math.inf
    for _ in range(n):
        u = rng.normal(size=2)
        u /= np.linalg.norm(u)
        c = math.exp(rng.uniform(math.log(c_range[0]), math.log(c_range[1])))
        eps = u * math.sqrt(c / float(u @ P @ u))
        if eps[0] == -v_ref:
            values = (-b.F_S - f_ref, b.F_S - f_ref)
        else:
            values = (error_nonlinearity(params, v_ref, float(eps[0])),)
        for ph in values:
            dV = 2.0 * float(eps @ P @ (mats.A @ eps + Bvec * ph))
            worst = min(worst, -dV)
    return worst
