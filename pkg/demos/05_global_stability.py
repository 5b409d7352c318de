"""Global asymptotic stability by set containment.

At high reference speed the certified trap region fits inside the
certified basin, so every trajectory — wherever it starts — eventually
enters the basin and converges: the equilibrium is globally
asymptotically stable.  The script certifies one such speed, overlays
the nested ellipses with far-flung trajectories, and (optionally, pass
--threshold) locates the smallest certifiable speed.

Writes global_stability.png next to this script.
"""

import math
import pathlib
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from stickslip import (
    PhysicalParams,
    SimConfig,
    certify_gas,
    equilibrium,
    find_gas_threshold,
    simulate,
)


def ellipse_points(P, n=400):
    w, V = np.linalg.eigh(P)
    ang = np.linspace(0, 2 * math.pi, n)
    circ = np.stack([np.cos(ang), np.sin(ang)])
    return (V @ (circ / np.sqrt(w)[:, None])).T


params = PhysicalParams()
v_ref = 10.0
cert = certify_gas(params, v_ref)
print(f"globally asymptotically stable at {v_ref} m/s")
print(f"  containment margin (min eig of P_trap - P_basin): {cert.inclusion_margin:.3e}")
print(f"  trap max semi-axis {cert.attractor.max_semi_axis:.3f}, "
      f"basin radius {cert.basin.radius:.3f}")

eq = equilibrium(params, v_ref)
fig, ax = plt.subplots(figsize=(7, 6))
pts = ellipse_points(cert.attractor.P)
ax.plot(pts[:, 0], pts[:, 1], "C0--", lw=1.5, label="trap region")
pts = ellipse_points(cert.basin.P)
ax.plot(pts[:, 0], pts[:, 1], "C3-.", lw=1.5, label="basin (contains the trap)")
for s in ([25.0, 5.0], [-9.5, -8.0], [0.0, 20.0]):
    traj = simulate(params, v_ref, SimConfig(dt=1e-3, T=60.0, v0=v_ref + s[0], z0=eq.z_inf + s[1]))
    ax.plot(traj.v - v_ref, traj.z - eq.z_inf, lw=0.7)
    ax.plot([s[0]], [s[1]], "d", ms=6)
ax.plot([0], [0], "r*", ms=10, label="equilibrium")
ax.set_xlabel("velocity error (m/s)")
ax.set_ylabel("elongation error (m)")
ax.set_title(f"global stability certificate at {v_ref} m/s")
ax.legend()
ax.set_aspect("equal")
fig.tight_layout()
out = pathlib.Path(__file__).with_name("global_stability.png")
fig.savefig(out, dpi=130)
print(f"wrote {out}")

if "--threshold" in sys.argv:
    print("searching for the smallest certifiable speed (about a minute) ...")
    thr = find_gas_threshold(params, v_lo=1.3, v_hi=20.0, tol=0.05)
    print(f"smallest certified globally-stable speed: {thr:.3f} m/s")
