"""Small dense semidefinite feasibility and linear-objective solver.

The certification modules pose their matrix-inequality systems as
:class:`SdpProblem` instances: a handful of scalar decision variables
(at most 16) entering a few affine symmetric pencils (blocks at most
6x6), optional linear inequalities and an optional linear objective.

``solve`` runs a log-det barrier method.  Feasibility is decided by
maximising the worst eigenvalue slack ``t`` over all pencils (a concave
problem) with damped Newton centering along a decreasing-barrier path;
the objective mode follows the central path of the linear objective over
the margin-floored feasible set.  A strict inequality ``M(x) < 0`` is
accepted only with slack at least :data:`MARGIN_FLOOR` after normalising
by the pencil's Frobenius norm at the solution, which makes the open
feasibility question decidable and testable.

Verdicts never trust the optimiser's internal state: every accepted
solution is re-checked by :func:`verify`, which evaluates the pencils and
measures their eigenvalues with the self-contained cyclic-Jacobi
routine :func:`sym_eigenvalues`.

An ``infeasible-within-tolerance`` status means no point with the
required slack was found within the declared budget; it is a failure to
certify, not a proof of infeasibility.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "MARGIN_FLOOR",
    "PSD_TOL",
    "STRICT_NEG",
    "PSD",
    "MatrixPencil",
    "SdpProblem",
    "SdpSolution",
    "sym_eig",
    "sym_eigenvalues",
    "solve",
    "verify",
]

MARGIN_FLOOR = 1e-7  # required normalised slack of strict pencils
PSD_TOL = 1e-9       # tolerated normalised violation of semidefinite pencils

STRICT_NEG = "strict-neg"
PSD = "psd"

_MAX_VARS = 16
_MAX_DIM = 6


# ---------------------------------------------------------------------------
# independent symmetric eigensolver (cyclic Jacobi)
# ---------------------------------------------------------------------------

def sym_eig(M, off_tol: float = 1e-13, max_sweeps: int = 60):
    """Eigen-decomposition of a small symmetric matrix by cyclic Jacobi rotations.

    The matrix is normalised by its Frobenius norm and rotated until the
    off-diagonal norm drops below ``off_tol``; eigenpair residuals then
    satisfy ``|M u - w u| <= 1e-10 |M|``.  Returns ``(w, V)`` with
    eigenvalues ascending and eigenvectors in the columns of ``V``.
    Non-symmetric or oversized input is rejected.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("square matrix required")
    d = M.shape[0]
    if d > _MAX_DIM:
        raise ValueError(f"dimension {d} exceeds the supported block size {_MAX_DIM}")
    scale = float(np.linalg.norm(M))
    if np.max(np.abs(M - M.T)) > 1e-10 * max(1.0, scale):
        raise ValueError("matrix is not symmetric")
    if scale == 0.0:
        return np.zeros(d), np.eye(d)

    A = 0.5 * (M + M.T) / scale
    V = np.eye(d)
    for _ in range(max_sweeps):
        off = 0.0
        for p in range(d - 1):
            for q in range(p + 1, d):
                off += 2.0 * A[p, q] ** 2
        if math.sqrt(off) <= off_tol:
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                tau = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, tau) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                app, aqq = A[p, p], A[q, q]
                A[p, p] = app - t * apq
                A[q, q] = aqq + t * apq
                A[p, q] = A[q, p] = 0.0
                for i in range(d):
                    if i != p and i != q:
                        aip, aiq = A[i, p], A[i, q]
                        A[i, p] = A[p, i] = c * aip - s * aiq
                        A[i, q] = A[q, i] = s * aip + c * aiq
                vp = V[:, p].copy()
                vq = V[:, q].copy()
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq
    w = np.diag(A) * scale
    order = np.argsort(w)
    return w[order], V[:, order]


def sym_eigenvalues(M) -> np.ndarray:
    """Sorted eigenvalues of a small symmetric matrix (cyclic Jacobi)."""
    w, _ = sym_eig(M)
    return w


# ---------------------------------------------------------------------------
# problem containers
# ---------------------------------------------------------------------------

class MatrixPencil:
    """Affine symmetric-matrix constraint ``constant + sum_i x[i] * basis_i``.

    ``sense`` is :data:`STRICT_NEG` (value must be negative definite with
    margin) or :data:`PSD` (value must be positive semidefinite within
    tolerance).  Constant and bases are symmetrised on construction.
    """

    __slots__ = ("dim", "constant", "bases", "sense", "ref_scale")

    def __init__(self, constant, bases, sense: str):
        constant = np.asarray(constant, dtype=float)
        if constant.ndim != 2 or constant.shape[0] != constant.shape[1]:
            raise ValueError("pencil constant must be square")
        if constant.shape[0] > _MAX_DIM:
            raise ValueError(f"pencil block exceeds {_MAX_DIM}x{_MAX_DIM}")
        if sense not in (STRICT_NEG, PSD):
            raise ValueError(f"unknown pencil sense {sense!r}")
        self.dim = constant.shape[0]
        self.constant = 0.5 * (constant + constant.T)
        self.bases = [(int(i), 0.5 * (np.asarray(B, dtype=float) + np.asarray(B, dtype=float).T))
                      for i, B in bases]
        for _, B in self.bases:
            if B.shape != (self.dim, self.dim):
                raise ValueError("basis shape mismatch")
        self.sense = sense
        # fixed characteristic scale; makes solver verdicts invariant under
        # multiplying the whole pencil by a positive constant
        s = float(np.linalg.norm(self.constant)) + sum(float(np.linalg.norm(B)) for _, B in self.bases)
        self.ref_scale = s if s > 0.0 else 1.0

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        M = self.constant.copy()
        for i, B in self.bases:
            M += x[i] * B
        return M

    def depends_on_vars(self) -> bool:
        return any(float(np.linalg.norm(B)) > 0.0 for _, B in self.bases)


@dataclass
class SdpProblem:
    """Feasibility / linear-objective problem over matrix pencils.

    ``linear_inequalities`` hold pairs ``(c, b)`` meaning ``c . x >= b``.
    ``objective`` (if given) is minimised.  ``var_bounds`` are optional
    per-variable ``(lo, hi)`` pairs with ``None`` for an absent bound.
    """

    n_vars: int
    pencils: list
    linear_inequalities: list = field(default_factory=list)
    objective: np.ndarray | None = None
    var_bounds: list | None = None

    def __post_init__(self):
        if not (1 <= self.n_vars <= _MAX_VARS):
            raise ValueError(f"n_vars must be in [1, {_MAX_VARS}]")
        if not self.pencils:
            raise ValueError("at least one pencil is required")
        for p in self.pencils:
            for i, _ in p.bases:
                if not (0 <= i < self.n_vars):
                    raise ValueError("pencil basis index out of range")
        for c, _ in self.linear_inequalities:
            if len(np.asarray(c)) != self.n_vars:
                raise ValueError("linear inequality dimension mismatch")
        if self.objective is not None and len(np.asarray(self.objective)) != self.n_vars:
            raise ValueError("objective dimension mismatch")


@dataclass
class SdpSolution:
    """Solver outcome with independently re-verified eigenvalue margins.

    ``margins[i]`` is the normalised worst-eigenvalue slack of pencil ``i``
    at ``x``: ``-max_eig/|M(x)|_F`` for strict pencils, ``min_eig/|M(x)|_F``
    for semidefinite ones.  ``reason`` distinguishes ``structural-infeasible``
    (a constant pencil can never satisfy its sense) from ``margin-gap`` /
    ``budget-exhausted`` failures.
    """

    status: str
    x: np.ndarray
    margins: np.ndarray
    objective_value: float | None = None
    reason: str = ""
    newton_iterations: int = 0

    @property
    def feasible(self) -> bool:
        return self.status in ("feasible", "objective-optimal")


# ---------------------------------------------------------------------------
# verification (never trusts solver internals)
# ---------------------------------------------------------------------------

def verify(problem: SdpProblem, x) -> np.ndarray:
    """Normalised worst-eigenvalue slack of every pencil at ``x`` via Jacobi."""
    x = np.asarray(x, dtype=float)
    if x.shape != (problem.n_vars,):
        raise ValueError("solution dimension mismatch")
    margins = np.empty(len(problem.pencils))
    for idx, p in enumerate(problem.pencils):
        M = p.evaluate(x)
        scale = float(np.linalg.norm(M))
        if scale == 0.0:
            margins[idx] = 0.0
            continue
        w = sym_eigenvalues(M)
        if p.sense == STRICT_NEG:
            margins[idx] = -w[-1] / scale
        else:
            margins[idx] = w[0] / scale
    return margins


def _margins_pass(problem: SdpProblem, margins, margin_floor: float, psd_tol: float) -> bool:
    for p, m in zip(problem.pencils, margins):
        if p.sense == STRICT_NEG and m < margin_floor:
            return False
        if p.sense == PSD and m < -psd_tol:
            return False
    return True


# ---------------------------------------------------------------------------
# barrier machinery
# ---------------------------------------------------------------------------

class _Compiled:
    """Pre-scaled pencil tensors and normalised linear rows."""

    __slots__ = ("n", "consts", "tensors", "senses", "lin_c", "lin_b", "nu")

    def __init__(self, problem: SdpProblem):
        n = problem.n_vars
        self.n = n
        self.consts = []
        self.tensors = []
        self.senses = []
        for p in problem.pencils:
            sgn = -1.0 if p.sense == STRICT_NEG else 1.0
            self.consts.append(sgn * p.constant / p.ref_scale)
            T = np.zeros((n, p.dim, p.dim))
            for i, B in p.bases:
                T[i] += sgn * B / p.ref_scale
            self.tensors.append(T)
            self.senses.append(p.sense)
        rows = list(problem.linear_inequalities)
        if problem.var_bounds is not None:
            for i, (lo, hi) in enumerate(problem.var_bounds):
                e = np.zeros(n)
                if lo is not None:
                    e_lo = e.copy()
                    e_lo[i] = 1.0
                    rows.append((e_lo, float(lo)))
                if hi is not None:
                    e_hi = e.copy()
                    e_hi[i] = -1.0
                    rows.append((e_hi, -float(hi)))
        self.lin_c = []
        self.lin_b = []
        for c, b in rows:
            c = np.asarray(c, dtype=float)
            nc = float(np.linalg.norm(c))
            if nc == 0.0:
                if b > 0.0:
                    raise ValueError("unsatisfiable linear inequality with zero coefficients")
                continue
            self.lin_c.append(c / nc)
            self.lin_b.append(float(b) / nc)
        self.nu = sum(c.shape[0] for c in self.consts) + len(self.lin_c)

    def eigmin(self, x: np.ndarray) -> float:
        worst = math.inf
        for const, T in zip(self.consts, self.tensors):
            Y = const + np.tensordot(x, T, axes=1)
            worst = min(worst, float(np.linalg.eigvalsh(Y)[0]))
        return worst

    def lin_interior(self, x: np.ndarray) -> np.ndarray:
        """Nudge x into the strict interior of the linear constraints."""
        x = x.copy()
        for _ in range(8):
            moved = False
            for c, b in zip(self.lin_c, self.lin_b):
                s = float(c @ x) - b
                if s <= 1e-10:
                    x = x + c * (b - float(c @ x) + 0.1)
                    moved = True
            if not moved:
                break
        return x


def _center(n, consts, tensors, lin_c, lin_b, shifts, obj, x, mu, tol, max_newton, stop_when=None):
    """Damped Newton minimisation of ``obj.x/mu + barrier`` from a strictly feasible x.

    Returns ``(x, iterations, hit_stop)``.
    """
    iters = 0
    for _ in range(max_newton):
        iters += 1
        g = obj / mu
        H = np.zeros((n, n))
        f0 = float(obj @ x) / mu
        for const, T, shift in zip(consts, tensors, shifts):
            Y = const + np.tensordot(x, T, axes=1)
            if shift:
                Y = Y - shift * np.eye(Y.shape[0])
            w, V = np.linalg.eigh(Y)
            if w[0] <= 0.0:
                return x, iters, False
            f0 -= float(np.log(w).sum())
            W = (V / w) @ V.T
            MK = W @ T
            g -= np.einsum("kii->k", MK)
            H += np.einsum("kab,lba->kl", MK, MK)
        for c, b in zip(lin_c, lin_b):
            s = float(c @ x) - b
            if s <= 0.0:
                return x, iters, False
            f0 -= math.log(s)
            g -= c / s
            H += np.outer(c, c) / (s * s)
        try:
            step = np.linalg.solve(H + 1e-13 * np.eye(n), -g)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(H, -g, rcond=None)[0]
        dec = float(-g @ step)
        if dec <= 2.0 * tol:
            break
        alpha = 1.0
        accepted = False
        for _ in range(60):
            xn = x + alpha * step
            fn = float(obj @ xn) / mu
            ok = True
            for c, b in zip(lin_c, lin_b):
                s = float(c @ xn) - b
                if s <= 0.0:
                    ok = False
                    break
                fn -= math.log(s)
            if ok:
                for const, T, shift in zip(consts, tensors, shifts):
                    Y = const + np.tensordot(xn, T, axes=1)
                    if shift:
                        Y = Y - shift * np.eye(Y.shape[0])
                    try:
                        L = np.linalg.cholesky(Y)
                    except np.linalg.LinAlgError:
                        ok = False
                        break
                    fn -= 2.0 * float(np.log(np.diag(L)).sum())
                if ok and fn <= f0 - 0.1 * alpha * dec:
                    accepted = True
                    break
            alpha *= 0.5
        if not accepted:
            break
        x = xn
        if stop_when is not None and stop_when(x):
            return x, iters, True
    return x, iters, False


def _box_rows(n, radius):
    """Two-sided bound rows |x_i| <= radius (unit-norm coefficient vectors)."""
    rows_c, rows_b = [], []
    for i in range(n):
        e = np.zeros(n)
        e[i] = 1.0
        rows_c.append(e.copy())
        rows_b.append(-radius)
        e2 = -e
        rows_c.append(e2)
        rows_b.append(-radius)
    return rows_c, rows_b


def _max_margin(comp: _Compiled, x0, margin_floor, psd_tol, newton_budget, barrier_budget,
                exit_slack, couple_psd=True, box_radius=None):
    """Maximise the joint eigenvalue slack ``t``; returns (t_best, x_best, iters, margin_ok).

    Success is decided on the true Frobenius-normalised margins of the
    iterates (cheap to track from the pencil spectra), not on the
    pre-scaled slack variable, so norm-inflating drift along barrier
    recession directions cannot masquerade as feasibility.
    """
    n = comp.n
    x = comp.lin_interior(np.asarray(x0, dtype=float).copy())
    coupled = [couple_psd or s == STRICT_NEG for s in comp.senses]
    # uncoupled pencils enter the barrier unshifted and must start strictly inside
    if not all(coupled):
        for const, T, cp in zip(comp.consts, comp.tensors, coupled):
            if not cp:
                Y = const + np.tensordot(x, T, axes=1)
                if float(np.linalg.eigvalsh(Y)[0]) <= 0.0:
                    return -math.inf, x, 0, False
    aug = n + 1
    consts = comp.consts
    tensors = []
    for T, cp, const in zip(comp.tensors, coupled, comp.consts):
        T2 = np.zeros((aug, const.shape[0], const.shape[0]))
        T2[:n] = T
        if cp:
            T2[n] = -np.eye(const.shape[0])
        tensors.append(T2)
    lin_c = [np.append(c, 0.0) for c in comp.lin_c]
    lin_b = list(comp.lin_b)
    if box_radius is not None:
        # soak up barrier recession directions (variables no pencil bounds);
        # without this, free multipliers drift and inflate the pencil norm,
        # destroying the Frobenius-normalised margin
        bc, bb = _box_rows(n, box_radius)
        lin_c += [np.append(c, 0.0) for c in bc]
        lin_b += bb
    nu_eff = comp.nu + (len(lin_c) - len(comp.lin_c))

    def slack_profile(xv):
        """(worst margin-to-requirement gap, prescale slack) at xv."""
        gap = math.inf
        for const, T, sense in zip(comp.consts, comp.tensors, comp.senses):
            S = const + np.tensordot(xv, T, axes=1)
            w = np.linalg.eigvalsh(S)
            nrm = float(np.linalg.norm(S))
            if nrm == 0.0:
                m = 0.0
            else:
                m = float(w[0]) / nrm  # S is sign-flipped: min eig is the slack
            req = margin_floor if sense == STRICT_NEG else -0.5 * psd_tol
            gap = min(gap, m - req)
        return gap

    em = min(
        float(np.linalg.eigvalsh(const + np.tensordot(x, T, axes=1))[0])
        for const, T, cp in zip(comp.consts, comp.tensors, coupled) if cp
    )
    t0 = em - 0.05 * max(1.0, abs(em))
    y = np.append(x, t0)
    obj = np.zeros(aug)
    obj[n] = -1.0
    shifts = [0.0] * len(consts)
    exit_gap = (exit_slack - 1.0) * margin_floor
    best_t = t0
    best_x = x.copy()
    best_gap = slack_profile(x)
    if best_gap >= 0.0:
        return best_t, best_x, 0, True

    def stop_when(yv):
        nonlocal best_t, best_x, best_gap
        if yv[n] > best_t:
            best_t = yv[n]
        if yv[n] < -1e-3:
            return False  # margins cannot pass while deeply slack-infeasible
        gap = slack_profile(yv[:n])
        if gap > best_gap:
            best_gap = gap
            best_x = yv[:n].copy()
        return gap >= exit_gap

    mu = min(0.25, max(1e-5, abs(t0) / nu_eff))
    iters = 0
    for _ in range(barrier_budget):
        y, it, hit = _center(aug, consts, tensors, lin_c, lin_b, shifts, obj, y, mu,
                             tol=1e-3, max_newton=newton_budget, stop_when=stop_when)
        iters += it
        if hit or best_gap >= 0.0:
            return best_t, best_x, iters, True
        # central-path bound: the slack optimum exceeds the current value by
        # at most nu*mu, so a persistent shortfall proves no floored point
        # exists within this box
        if best_t + 2.0 * nu_eff * mu < margin_floor:
            return best_t, best_x, iters, False
        mu *= 0.03
        if mu < 1e-13:
            break
    return best_t, best_x, iters, best_gap >= 0.0


def _follow_objective(comp: _Compiled, x0, objective, margin_floor, newton_budget,
                      barrier_budget, rel_tol, box_radius=None):
    """Central-path minimisation of ``objective . x`` over the margin-floored set."""
    n = comp.n
    shifts = [2.0 * margin_floor if s == STRICT_NEG else 0.0 for s in comp.senses]
    x = np.asarray(x0, dtype=float).copy()
    obj = np.asarray(objective, dtype=float)
    lin_c, lin_b = list(comp.lin_c), list(comp.lin_b)
    if box_radius is not None:
        bc, bb = _box_rows(n, box_radius)
        lin_c += bc
        lin_b += bb
    iters = 0
    mu = max(1e-2, abs(float(obj @ x)) / comp.nu)
    for _ in range(barrier_budget):
        x, it, _ = _center(n, comp.consts, comp.tensors, lin_c, lin_b,
                           shifts, obj, x, mu, tol=1e-5, max_newton=newton_budget)
        iters += it
        if comp.nu * mu <= rel_tol * max(1.0, abs(float(obj @ x))):
            break
        mu *= 0.1
    return x, iters


# ---------------------------------------------------------------------------
# public solve
# ---------------------------------------------------------------------------

def solve(problem: SdpProblem, x0=None, *, margin_floor: float = MARGIN_FLOOR,
          psd_tol: float = PSD_TOL, newton_budget: int = 200, barrier_budget: int = 40,
          objective_rel_tol: float = 1e-6, exit_slack: float = 10.0) -> SdpSolution:
    """Solve a pencil feasibility or linear-objective problem.

    Feasible solutions carry verified normalised margins of at least
    ``margin_floor`` on every strict pencil and at least ``-psd_tol`` on
    every semidefinite one.  ``x0`` warm-starts the barrier.  With an
    objective, the solution follows the central path until the relative
    suboptimality bound drops below ``objective_rel_tol`` and the status
    becomes ``objective-optimal``.
    """
    comp = _Compiled(problem)
    n = problem.n_vars

    # structural infeasibility: a pencil no variable can influence
    for p in problem.pencils:
        if not p.depends_on_vars():
            w = sym_eigenvalues(p.constant)
            scale = max(float(np.linalg.norm(p.constant)), 1e-300)
            bad = (p.sense == STRICT_NEG and -w[-1] / scale < margin_floor) or (
                p.sense == PSD and w[0] / scale < -psd_tol
            )
            if bad:
                return SdpSolution(
                    status="infeasible-within-tolerance",
                    x=np.zeros(n) if x0 is None else np.asarray(x0, dtype=float),
                    margins=verify(problem, np.zeros(n) if x0 is None else np.asarray(x0, dtype=float)),
                    reason="structural-infeasible",
                )

    x_start = np.zeros(n) if x0 is None else np.asarray(x0, dtype=float)
    box = 50.0 * max(1.0, float(np.max(np.abs(x_start))))
    iters = 0
    for _ in range(4):
        t, x, it, ok = _max_margin(comp, x_start, margin_floor, psd_tol, newton_budget,
                                   barrier_budget, exit_slack, box_radius=box)
        iters += it
        if not ok and t > -10.0 * margin_floor and any(s == PSD for s in comp.senses):
            # a semidefinite pencil that is legitimately tight can pin the joint
            # slack below the floor; retry with only strict pencils coupled
            t2, x2, it2, ok2 = _max_margin(comp, x, margin_floor, psd_tol, newton_budget,
                                           barrier_budget, exit_slack,
                                           couple_psd=False, box_radius=box)
            iters += it2
            if ok2:
                t, x, ok = t2, x2, True
        margins = verify(problem, x)
        passed = _margins_pass(problem, margins, margin_floor, psd_tol)
        if passed or float(np.max(np.abs(x))) < 0.9 * box:
            break
        # parked on the box face without a verified margin: widen and retry
        box *= 32.0
    if not passed:
        reason = "margin-gap" if not ok else "budget-exhausted"
        return SdpSolution(status="infeasible-within-tolerance", x=x, margins=margins,
                           reason=reason, newton_iterations=iters)

    if problem.objective is None:
        return SdpSolution(status="feasible", x=x, margins=margins, newton_iterations=iters)

    x_obj, it2 = _follow_objective(comp, x, problem.objective, margin_floor,
                                   newton_budget, barrier_budget, objective_rel_tol,
                                   box_radius=box)
    iters += it2
    margins_obj = verify(problem, x_obj)
    if _margins_pass(problem, margins_obj, margin_floor, psd_tol):
        x, margins = x_obj, margins_obj
    # else keep the feasibility point: the path step must never lose the certificate
    return SdpSolution(
        status="objective-optimal",
        x=x,
        margins=margins,
        objective_value=float(np.asarray(problem.objective) @ x),
        newton_iterations=iters,
    )
