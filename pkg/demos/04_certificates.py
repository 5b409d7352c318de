"""Ellipsoidal certificates against simulated phase portraits.

At a speed just above the unstable band, the basin certificate (region
of guaranteed convergence) is small while the certified trap region (the
set all trajectories eventually enter) is much larger — trajectories
starting between the two may stick-slip forever.  The script overlays
both ellipses on simulated trajectories in error coordinates.

Writes certificates.png next to this script.
"""

import math
import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from stickslip import (
    PhysicalParams,
    SimConfig,
    certify_attractor,
    equilibrium,
    maximize_basin,
    simulate,
)


def ellipse_points(P, n=400):
    w, V = np.linalg.eigh(P)
    ang = np.linspace(0, 2 * math.pi, n)
    circ = np.stack([np.cos(ang), np.sin(ang)])
    return (V @ (circ / np.sqrt(w)[:, None])).T


params = PhysicalParams()
v_ref = 1.45
eq = equilibrium(params, v_ref)

trap = certify_attractor(params, v_ref)
basin = maximize_basin(params, v_ref)
print(f"trap region: eta={trap.eta:.5f} -> max semi-axis {trap.max_semi_axis:.3f}")
print(f"basin: radius={basin.radius:.4f}, eta={basin.eta:.4f} -> min semi-axis {basin.min_semi_axis:.4f}")

fig, ax = plt.subplots(figsize=(7, 6))
pts = ellipse_points(trap.P)
ax.plot(pts[:, 0], pts[:, 1], "C0--", lw=1.5, label="certified trap region")
pts = ellipse_points(basin.P)
ax.plot(pts[:, 0], pts[:, 1], "C3-.", lw=1.5, label="certified basin")

# one trajectory from inside the basin, one from outside it
starts = [0.9 * np.array([basin.min_semi_axis, 0.0]), np.array([3.0, 1.0])]
for s, color in zip(starts, ("C2", "C1")):
    traj = simulate(params, v_ref, SimConfig(dt=1e-3, T=60.0, v0=v_ref + s[0], z0=eq.z_inf + s[1]))
    ax.plot(traj.v - v_ref, traj.z - eq.z_inf, color=color, lw=0.7)
    ax.plot([s[0]], [s[1]], "d", color=color, ms=7)
ax.plot([0], [0], "r*", ms=10, label="equilibrium")
ax.set_xlabel("velocity error (m/s)")
ax.set_ylabel("elongation error (m)")
ax.set_title(f"certificates at reference speed {v_ref} m/s")
ax.legend()
ax.set_aspect("equal")
fig.tight_layout()
out = pathlib.Path(__file__).with_name("certificates.png")
fig.savefig(out, dpi=130)
print(f"wrote {out}")
