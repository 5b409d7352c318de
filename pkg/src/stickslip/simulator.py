"""Chattering-free time stepping of the set-valued stick-slip dynamics.

The velocity update is semi-implicit: the spring force uses the current
elongation, the Stribeck magnitude is frozen at the current speed, and
the viscous and set-valued Coulomb terms are implicit.  The resulting
scalar inclusion has a closed-form threshold solution — if the frozen
friction level can absorb the smooth impulse the mass sticks exactly at
zero velocity, otherwise it slips with the friction at its saturation
value.  Sticking therefore persists until the spring load exceeds the
static level, which rules out numerical chattering by construction.

Also provides limit-cycle detection on simulated velocity traces and the
regime classifier combining the stability zones with the certification
modules.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .attractor import certify_attractor
from .basin import maximize_basin
from .dynamics import equilibrium
from .errors import CertificationFailure, PreconditionError
from .friction import FrictionBounds, PhysicalParams, hurwitz_interval
from .gas import certify_gas

__all__ = [
    "SimConfig",
    "Trajectory",
    "CycleReport",
    "step",
    "simulate",
    "detect_cycle",
    "classify_regime",
    "REGIMES",
]

REGIMES = (
    "basin-only",
    "unstable-equilibrium",
    "basin-without-attractor-inclusion",
    "globally-stable",
)


@dataclass(frozen=True)
class SimConfig:
    """Simulation setup.

    ``stick_tol`` defaults to ``1e-6 * v_s`` (resolved against the plant
    parameters at run time); ``transient_skip`` is the fraction of the
    horizon ignored by cycle detection.
    """

    dt: float = 1e-3
    T: float = 40.0
    v0: float = 6.0
    z0: float = 0.0
    stick_tol: float | None = None
    transient_skip: float = 0.5

    def resolved_stick_tol(self, params: PhysicalParams) -> float:
        return 1e-6 * params.v_s if self.stick_tol is None else self.stick_tol

    def validate(self, params: PhysicalParams) -> None:
        if not self.dt > 0.0:
            raise ValueError("dt must be positive")
        if not self.T >= 10.0 * self.dt:
            raise ValueError("T must be at least 10 * dt")
        tol = self.resolved_stick_tol(params)
        if not (0.0 < tol <= params.v_s / 10.0):
            raise ValueError("stick_tol must lie in (0, v_s/10]")
        if not (0.0 <= self.transient_skip < 1.0):
            raise ValueError("transient_skip must lie in [0, 1)")


@dataclass(frozen=True)
class Trajectory:
    """Uniformly sampled trajectory; ``mode`` is 1 during stick, 0 during slip."""

    t: np.ndarray
    v: np.ndarray
    z: np.ndarray
    mode: np.ndarray

    def __len__(self) -> int:
        return len(self.t)


@dataclass(frozen=True)
class CycleReport:
    """Limit-cycle observables of a trajectory.

    ``detected`` and ``converged`` are mutually exclusive; when neither
    criterion fires within the horizon the outcome is inconclusive.
    """

    detected: bool
    period: float
    amplitude: float
    converged: bool
    final_error_norm: float

    @property
    def inconclusive(self) -> bool:
        return not (self.detected or self.converged)


def step(params: PhysicalParams, v_ref: float, v: float, z: float, dt: float,
         stick_tol: float | None = None):
    """One semi-implicit step; returns ``(v_new, z_new, stick)``.

    The unconstrained smooth impulse is ``(m/dt) v - k z``; if the frozen
    friction magnitude dominates it (equivalently the candidate velocity
    would cross zero with the spring load inside the static level
    ``|k z_new| <= F_S``), the mass sticks exactly.  The elongation always
    advances with the updated velocity: ``z_new = z + dt (v_new - v_ref)``.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    b = FrictionBounds.from_params(params)
    m, k, k_v = params.m, params.k, params.k_v
    level = b.R_N * (
        params.mu_C + (params.mu_S - params.mu_C) * math.exp(-((v / params.v_s) ** 2))
    )
    impulse = (m / dt) * v - k * z
    if abs(impulse) <= level:
        v_new = 0.0
    else:
        v_new = (impulse - math.copysign(level, impulse)) / (m / dt + k_v)
    z_new = z + dt * (v_new - v_ref)
    tol = 1e-6 * params.v_s if stick_tol is None else stick_tol
    stick = abs(v_new) <= tol and abs(k * z_new) <= b.F_S
    return v_new, z_new, stick


def simulate(params: PhysicalParams, v_ref: float, config: SimConfig) -> Trajectory:
    """Deterministic trajectory of the set-valued system from ``(v0, z0)``."""
    if v_ref <= 0.0:
        raise ValueError("v_ref must be positive")
    config.validate(params)
    dt = config.dt
    n = int(round(config.T / dt))
    b = FrictionBounds.from_params(params)
    m, k, k_v = params.m, params.k, params.k_v
    v_s, mu_C, dmu = params.v_s, params.mu_C, params.mu_S - params.mu_C
    R_N, F_S = b.R_N, b.F_S
    tol = config.resolved_stick_tol(params)
    a = m / dt + k_v

    t = np.arange(n + 1) * dt
    v = np.empty(n + 1)
    z = np.empty(n + 1)
    mode = np.zeros(n + 1, dtype=np.uint8)
    v[0], z[0] = config.v0, config.z0
    mode[0] = 1 if (abs(config.v0) <= tol and abs(k * config.z0) <= F_S) else 0
    vc, zc = float(config.v0), float(config.z0)
    exp = math.exp
    for i in range(1, n + 1):
        level = R_N * (mu_C + dmu * exp(-((vc / v_s) ** 2)))
        impulse = (m / dt) * vc - k * zc
        if abs(impulse) <= level:
            vn = 0.0
        else:
            vn = (impulse - math.copysign(level, impulse)) / a
        zc = zc + dt * (vn - v_ref)
        vc = vn
        v[i] = vn
        z[i] = zc
        mode[i] = 1 if (abs(vn) <= tol and abs(k * zc) <= F_S) else 0
    return Trajectory(t=t, v=v, z=z, mode=mode)


def detect_cycle(params: PhysicalParams, v_ref: float, traj: Trajectory,
                 config: SimConfig) -> CycleReport:
    """Classify a trajectory as limit cycle, converged, or inconclusive.

    After discarding the transient fraction, velocity maxima found by the
    three-point rule define candidate cycles: detected requires at least
    three maxima whose spacings agree within 5 percent and a mean
    peak-to-peak amplitude above ``10 * stick_tol``.  Converged requires
    the error norm to drop below 1e-3 and stay there.  Convergence wins
    when both fire.
    """
    eq = equilibrium(params, v_ref)
    err = np.hypot(traj.v - v_ref, traj.z - eq.z_inf)
    final_err = float(err[-1])

    below = err < 1e-3
    converged = bool(below[-1]) and bool(np.any(below)) if len(below) else False
    if converged:
        first = int(np.argmax(below))
        converged = bool(np.all(below[first:]))

    n0 = int(len(traj.t) * config.transient_skip)
    vs = traj.v[n0:]
    ts = traj.t[n0:]
    detected = False
    period = 0.0
    amplitude = 0.0
    if len(vs) >= 3:
        interior = (vs[1:-1] > vs[:-2]) & (vs[1:-1] >= vs[2:])
        peaks = np.flatnonzero(interior) + 1
        if len(peaks) >= 3:
            spacing = np.diff(ts[peaks])
            mean_sp = float(spacing.mean())
            regular = mean_sp > 0.0 and bool(
                np.all(np.abs(spacing - mean_sp) <= 0.05 * mean_sp)
            )
            ptp = [
                float(vs[peaks[i]:peaks[i + 1] + 1].max() - vs[peaks[i]:peaks[i + 1] + 1].min())
                for i in range(len(peaks) - 1)
            ]
            amp = float(np.mean(ptp))
            tol = config.resolved_stick_tol(params)
            if regular and amp > 10.0 * tol:
                detected = True
                period = mean_sp
                amplitude = amp
    if converged:
        detected = False
        period = 0.0
    return CycleReport(
        detected=detected,
        period=period,
        amplitude=amplitude,
        converged=converged,
        final_error_norm=final_err,
    )


@dataclass(frozen=True)
class RegimeReport:
    """Classifier outcome with the certification by-products for reporting."""

    regime: str
    basin_eta: float | None = None
    attractor_eta: float | None = None
    gas: bool = False


def classify_regime(params: PhysicalParams, v_ref: float) -> str:
    """One of :data:`REGIMES` for the given reference speed."""
    return regime_report(params, v_ref).regime


def regime_report(params: PhysicalParams, v_ref: float, *, grid_size: int = 100) -> RegimeReport:
    """Regime classification plus the certificate bounds that produced it.

    Combines the stability band, basin feasibility and the global
    containment test into the four regimes: inside the band the
    equilibrium is unstable; a global certificate means globally stable;
    otherwise the basin exists and the speed zone names the regime.
    """
    if v_ref <= 0.0:
        raise PreconditionError("v_ref must be positive")
    band = hurwitz_interval(params)
    if band is not None and band[0] <= v_ref <= band[1]:
        return RegimeReport(regime="unstable-equilibrium")

    cert_a = certify_attractor(params, v_ref, grid_size=grid_size)
    basin = maximize_basin(params, v_ref)  # feasible in the stable zones
    try:
        cert = certify_gas(params, v_ref, grid_size=grid_size,
                           attractor_cert=cert_a, base_basin=basin)
        return RegimeReport(
            regime="globally-stable",
            basin_eta=cert.basin.eta,
            attractor_eta=cert.attractor.eta,
            gas=True,
        )
    except (CertificationFailure, PreconditionError):
        pass

    if band is None or v_ref < band[0]:
        regime = "basin-only"
    else:
        regime = "basin-without-attractor-inclusion"
    return RegimeReport(regime=regime, basin_eta=basin.eta, attractor_eta=cert_a.eta)
