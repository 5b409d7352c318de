"""Command-line front end: certification runs, simulation and CSV export.

Subcommands::

    stickslip roots    --config cfg.json [--out DIR]
    stickslip certify  --which {attractor,basin,gas} --config cfg.json [--vref X] [--out DIR]
    stickslip simulate --config cfg.json [--vref X] [--out DIR]
    stickslip sweep    --config cfg.json [--out DIR]

The config file is a flat JSON object; recognised keys are the plant
constants (``m g v_s mu_C mu_S k k_v l0 xA0``), ``v_ref`` (a number, or a
``"lo:hi:n"`` string for sweeps), the simulation settings (``dt T v0 z0
stick_tol transient_skip``), ``output_dir`` and ``seed``.  Unknown keys
are rejected.  Omitted keys fall back to the benchmark defaults.

Exit codes: 0 success, 2 invalid config, 3 failure-to-certify,
4 precondition rejection.  All files are UTF-8 CSV with LF line endings
and are written atomically (temp file then rename).  ``STICKSLIP_THREADS``
caps sweep parallelism.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .attractor import decay_outside
from .basin import decay_inside
from .errors import CertificationFailure, PreconditionError
from .friction import PhysicalParams, hurwitz_interval
from .gas import boundary_containment, certify_gas, find_gas_threshold
from .sdpcore import sym_eig
from .simulator import SimConfig, detect_cycle, regime_report, simulate
from . import attractor as attractor_mod
from . import basin as basin_mod

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NOT_CERTIFIED = 3
EXIT_PRECONDITION = 4

_PARAM_KEYS = ("m", "g", "v_s", "mu_C", "mu_S", "k", "k_v", "l0", "xA0")
_SIM_KEYS = ("dt", "T", "v0", "z0", "stick_tol", "transient_skip")
_OTHER_KEYS = ("v_ref", "output_dir", "seed")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    params: PhysicalParams
    v_ref: float | None
    sweep: tuple[float, float, int] | None
    sim: SimConfig
    output_dir: str
    seed: int


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def load_config(path: str | None, vref_override: float | None = None,
                out_override: str | None = None) -> RunConfig:
    raw = {}
    if path is not None:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                raw = json.load(fh)
        except OSError as e:
            raise ConfigError(f"cannot read config file: {e}") from e
        except json.JSONDecodeError as e:
            raise ConfigError(f"config is not valid JSON: {e}") from e
    if not isinstance(raw, dict):
        raise ConfigError("config must be a flat JSON object")
    allowed = set(_PARAM_KEYS) | set(_SIM_KEYS) | set(_OTHER_KEYS)
    for key in raw:
        if key not in allowed:
            raise ConfigError(f"unknown config key: {key!r}")

    def num(key, default):
        val = raw.get(key, default)
        if isinstance(val, bool) or not isinstance(val, (int, float)):
            raise ConfigError(f"config key {key!r} must be a number")
        return float(val)

    try:
        params = PhysicalParams(**{k: num(k, getattr(PhysicalParams, k)) for k in _PARAM_KEYS})
    except ValueError as e:
        raise ConfigError(f"invalid plant parameters: {e}") from e

    sweep = None
    v_ref: float | None
    raw_vref = raw.get("v_ref", 1.0)
    if vref_override is not None:
        v_ref = float(vref_override)
    elif isinstance(raw_vref, str):
        parts = raw_vref.split(":")
        if len(parts) != 3:
            raise ConfigError("sweep v_ref must look like 'lo:hi:n'")
        try:
            lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError as e:
            raise ConfigError(f"bad sweep range {raw_vref!r}") from e
        if n < 1 or not (0.0 < lo <= hi):
            raise ConfigError(f"bad sweep range {raw_vref!r}")
        sweep = (lo, hi, n)
        v_ref = None
    else:
        if isinstance(raw_vref, bool) or not isinstance(raw_vref, (int, float)):
            raise ConfigError("config key 'v_ref' must be a number or 'lo:hi:n'")
        v_ref = float(raw_vref)
    if v_ref is not None and v_ref <= 0.0:
        raise ConfigError("v_ref must be positive")

    stick_tol = raw.get("stick_tol")
    if stick_tol is not None:
        stick_tol = num("stick_tol", stick_tol)
    sim = SimConfig(
        dt=num("dt", 1e-3),
        T=num("T", 40.0),
        v0=num("v0", 6.0),
        z0=num("z0", 0.0),
        stick_tol=stick_tol,
        transient_skip=num("transient_skip", 0.5),
    )
    try:
        sim.validate(params)
    except ValueError as e:
        raise ConfigError(f"invalid simulation settings: {e}") from e

    seed = raw.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise ConfigError("config key 'seed' must be an integer")
    output_dir = out_override or raw.get("output_dir", ".")
    if not isinstance(output_dir, str):
        raise ConfigError("config key 'output_dir' must be a string")
    return RunConfig(params=params, v_ref=v_ref, sweep=sweep, sim=sim,
                     output_dir=output_dir, seed=int(seed))


def _write_atomic(path: str, lines: list[str]) -> None:
    directory = os.path.dirname(path) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _ellipse_points(P: np.ndarray, n: int = 256) -> np.ndarray:
    """n points on the boundary {eps^T P eps = 1}."""
    w, V = sym_eig(P)
    angles = 2.0 * math.pi * np.arange(n) / n
    circ = np.stack([np.cos(angles), np.sin(angles)])
    return (V @ (circ / np.sqrt(w)[:, None])).T


def cmd_roots(cfg: RunConfig) -> int:
    band = hurwitz_interval(cfg.params)
    lines = ["name,value"]
    if band is None:
        lines += ["v_ref1,none", "v_ref2,none"]
        print("linearised error dynamics Hurwitz at every positive speed")
    else:
        lines += [f"v_ref1,{_fmt(band[0])}", f"v_ref2,{_fmt(band[1])}"]
        print(f"unstable speed band: [{band[0]:.6g}, {band[1]:.6g}] m/s")
    _write_atomic(os.path.join(cfg.output_dir, "roots.csv"), lines)
    return EXIT_OK


def _certificate_rows_attractor(cert) -> list[str]:
    rows = [
        f"v_ref,{_fmt(cert.v_ref)}",
        f"p11,{_fmt(cert.P[0, 0])}",
        f"p12,{_fmt(cert.P[0, 1])}",
        f"p22,{_fmt(cert.P[1, 1])}",
        f"tau0,{_fmt(cert.tau0)}",
        f"tau1,{_fmt(cert.tau1)}",
        f"tau2,{_fmt(cert.tau2)}",
        f"tau3,{_fmt(cert.tau3)}",
        f"tau4,{_fmt(cert.tau4)}",
        f"tau5,{_fmt(cert.tau5)}",
        f"eta,{_fmt(cert.eta)}",
    ]
    rows += [f"margin_{i},{_fmt(m)}" for i, m in enumerate(cert.margins)]
    return rows


def _certificate_rows_basin(cert, prefix: str = "") -> list[str]:
    rows = [
        f"{prefix}v_ref,{_fmt(cert.v_ref)}",
        f"{prefix}p11,{_fmt(cert.P[0, 0])}",
        f"{prefix}p12,{_fmt(cert.P[0, 1])}",
        f"{prefix}p22,{_fmt(cert.P[1, 1])}",
        f"{prefix}r_l,{_fmt(cert.radius)}",
        f"{prefix}lambda,{_fmt(cert.lam)}",
        f"{prefix}tau,{_fmt(cert.tau)}",
        f"{prefix}gamma,{_fmt(cert.gamma)}",
        f"{prefix}lambda_floor,{_fmt(cert.lambda_floor)}",
        f"{prefix}eta,{_fmt(cert.eta)}",
    ]
    rows += [f"{prefix}margin_{i},{_fmt(m)}" for i, m in enumerate(cert.margins)]
    return rows


def cmd_certify(cfg: RunConfig, which: str) -> int:
    if cfg.v_ref is None:
        raise ConfigError("certify needs a single v_ref, not a sweep")
    v_ref = cfg.v_ref
    rng = np.random.default_rng(cfg.seed)
    out = cfg.output_dir
    if which == "attractor":
        cert = attractor_mod.certify_attractor(cfg.params, v_ref)
        slack = decay_outside(cfg.params, v_ref, cert.P, rng=rng)
        lines = ["name,value"] + _certificate_rows_attractor(cert)
        lines.append(f"replay_decay_slack,{_fmt(slack)}")
        _write_atomic(os.path.join(out, "certificate_attractor.csv"), lines)
        pts = _ellipse_points(cert.P)
        _write_atomic(os.path.join(out, "ellipse_attractor.csv"),
                      ["eps1,eps2"] + [f"{_fmt(p[0])},{_fmt(p[1])}" for p in pts])
        print(f"attractor certified at v_ref={v_ref:g}: eta={cert.eta:.6g} "
              f"(max semi-axis {cert.max_semi_axis:.4g} m/s)")
    elif which == "basin":
        cert = basin_mod.maximize_basin(cfg.params, v_ref)
        slack = decay_inside(cfg.params, v_ref, cert.P, rng=rng)
        lines = ["name,value"] + _certificate_rows_basin(cert)
        lines.append(f"replay_decay_slack,{_fmt(slack)}")
        _write_atomic(os.path.join(out, "certificate_basin.csv"), lines)
        pts = _ellipse_points(cert.P)
        _write_atomic(os.path.join(out, "ellipse_basin.csv"),
                      ["eps1,eps2"] + [f"{_fmt(p[0])},{_fmt(p[1])}" for p in pts])
        print(f"basin certified at v_ref={v_ref:g}: radius={cert.radius:.6g}, "
              f"eta={cert.eta:.6g} (min semi-axis {cert.min_semi_axis:.4g})")
    else:  # gas
        cert = certify_gas(cfg.params, v_ref)
        contain = boundary_containment(cert, rng=rng)
        lines = ["name,value"]
        lines += [f"attractor_{r}" for r in _certificate_rows_attractor(cert.attractor)]
        lines += _certificate_rows_basin(cert.basin, prefix="basin_")
        lines.append(f"inclusion_margin,{_fmt(cert.inclusion_margin)}")
        lines.append(f"replay_containment_slack,{_fmt(contain)}")
        _write_atomic(os.path.join(out, "certificate_gas.csv"), lines)
        rows = ["set,eps1,eps2"]
        for p in _ellipse_points(cert.attractor.P):
            rows.append(f"attractor,{_fmt(p[0])},{_fmt(p[1])}")
        for p in _ellipse_points(cert.basin.P):
            rows.append(f"basin,{_fmt(p[0])},{_fmt(p[1])}")
        _write_atomic(os.path.join(out, "ellipse_gas.csv"), rows)
        print(f"globally asymptotically stable at v_ref={v_ref:g}: "
              f"inclusion margin {cert.inclusion_margin:.3g}")
    return EXIT_OK


def cmd_simulate(cfg: RunConfig) -> int:
    if cfg.v_ref is None:
        raise ConfigError("simulate needs a single v_ref, not a sweep")
    traj = simulate(cfg.params, cfg.v_ref, cfg.sim)
    report = detect_cycle(cfg.params, cfg.v_ref, traj, cfg.sim)
    lines = ["t,v,z,mode"]
    lines += [
        f"{_fmt(t)},{_fmt(v)},{_fmt(z)},{int(m)}"
        for t, v, z, m in zip(traj.t, traj.v, traj.z, traj.mode)
    ]
    _write_atomic(os.path.join(cfg.output_dir, "trajectory.csv"), lines)
    _write_atomic(
        os.path.join(cfg.output_dir, "cycle_report.csv"),
        [
            "name,value",
            f"detected,{int(report.detected)}",
            f"period,{_fmt(report.period)}",
            f"amplitude,{_fmt(report.amplitude)}",
            f"converged,{int(report.converged)}",
            f"final_error_norm,{_fmt(report.final_error_norm)}",
        ],
    )
    if report.detected:
        print(f"limit cycle: period {report.period:.3g} s, amplitude {report.amplitude:.3g} m/s")
    elif report.converged:
        print(f"converged: final error norm {report.final_error_norm:.3g}")
    else:
        print("inconclusive within the simulated horizon")
    return EXIT_OK


def _sweep_grid(cfg: RunConfig) -> list[float]:
    if cfg.sweep is None:
        raise ConfigError("sweep needs v_ref of the form 'lo:hi:n'")
    lo, hi, n = cfg.sweep
    if n == 1:
        return [lo]
    return [lo + (hi - lo) * i / (n - 1) for i in range(n)]


def cmd_sweep(cfg: RunConfig) -> int:
    grid = _sweep_grid(cfg)
    if not grid:
        raise ConfigError("empty sweep grid")
    workers = max(1, int(os.environ.get("STICKSLIP_THREADS", "1")))

    def run_row(v):
        try:
            rep = regime_report(cfg.params, v)
            return (v, rep.regime,
                    "" if rep.basin_eta is None else _fmt(rep.basin_eta),
                    "" if rep.attractor_eta is None else _fmt(rep.attractor_eta),
                    int(rep.gas), None)
        except Exception as e:  # recorded per-row, sweep continues
            return (v, "error", "", "", 0, str(e))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(run_row, grid))
    else:
        rows = [run_row(v) for v in grid]

    lines = ["v_ref,regime,basin_eta,attractor_eta,gas"]
    failed = 0
    for v, regime, be, ae, gflag, err in rows:
        lines.append(f"{_fmt(v)},{regime},{be},{ae},{gflag}")
        print(f"v_ref={v:g}: {regime}" + (f" ({err})" if err else ""))
        if err is not None:
            failed += 1

    band = hurwitz_interval(cfg.params)
    if band is not None and any(v > band[1] for v in grid):
        try:
            thr = find_gas_threshold(cfg.params, v_lo=1.05 * band[1], v_hi=20.0, tol=0.05)
            lines.append(f"{_fmt(thr)},gas-threshold,,,1")
            print(f"certified global-stability threshold: {thr:.4g} m/s")
        except (CertificationFailure, PreconditionError) as e:
            lines.append(",gas-threshold-error,,,0")
            print(f"threshold search failed: {e}")
            failed += 1

    _write_atomic(os.path.join(cfg.output_dir, "sweep.csv"), lines)
    return EXIT_OK if failed == 0 else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="stickslip",
        description="Stability certificates and set-valued simulation for "
                    "a mass-spring system under Stribeck/Coulomb friction.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("roots", "stability-band roots of the linearised error dynamics"),
        ("certify", "compute and export a certificate"),
        ("simulate", "time-domain simulation and cycle report"),
        ("sweep", "regime classification over a v_ref grid"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", default=None, help="flat JSON config file")
        p.add_argument("--out", default=None, help="output directory (overrides config)")
        if name in ("certify", "simulate"):
            p.add_argument("--vref", type=float, default=None, help="reference speed override")
        if name == "certify":
            p.add_argument("--which", choices=("attractor", "basin", "gas"), required=True)

    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config, getattr(args, "vref", None), args.out)
        if args.command == "roots":
            return cmd_roots(cfg)
        if args.command == "certify":
            return cmd_certify(cfg, args.which)
        if args.command == "simulate":
            return cmd_simulate(cfg)
        return cmd_sweep(cfg)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except PreconditionError as e:
        print(f"precondition rejected: {e}", file=sys.stderr)
        return EXIT_PRECONDITION
    except CertificationFailure as e:
        print(f"not certified: {e}", file=sys.stderr)
        return EXIT_NOT_CERTIFIED


if __name__ == "__main__":
    raise SystemExit(main())
