"""Friction law of the benchmark system and its analysis companions.

Walks through the force model: the dry Stribeck/Coulomb part with its
set-valued jump at rest, the relay envelope that the certification
machinery uses to encapsulate it, and the shifted nonlinearity seen from
a moving operating point together with its sector lines.

Writes friction_curves.png next to this script.
"""

import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from stickslip import (
    FrictionBounds,
    PhysicalParams,
    dry_friction,
    error_nonlinearity,
    error_slope,
    sector_bound,
)

params = PhysicalParams()
b = FrictionBounds.from_params(params)
print(f"force levels: coulomb {b.F_C:.4f} N, static {b.F_S:.4f} N")

fig, axes = plt.subplots(1, 3, figsize=(13, 4))

# total friction force vs speed: non-monotone at low speed
v = np.linspace(-4, 4, 2001)
force = [dry_friction(params, vi) + params.k_v * vi if vi else np.nan for vi in v]
axes[0].plot(v, force, lw=1.5)
axes[0].vlines(0.0, -b.F_S, b.F_S, colors="C3", lw=2, label="rest set")
axes[0].set_xlabel("speed v (m/s)")
axes[0].set_ylabel("friction force (N)")
axes[0].set_title("force law (set-valued at rest)")
axes[0].legend()

# relay envelope of the dry part
vv = np.linspace(1e-4, 4, 1000)
dry = np.array([dry_friction(params, x) for x in vv])
axes[1].plot(vv, dry, lw=1.5, label="dry force")
axes[1].plot(-vv, -dry, lw=1.5, color="C0")
for level in (b.F_C, b.F_S):
    axes[1].axhline(level, color="C3", ls="--", lw=1)
    axes[1].axhline(-level, color="C3", ls="--", lw=1)
axes[1].set_xlabel("speed v (m/s)")
axes[1].set_title("relay envelope F_C <= |f| <= F_S")
axes[1].legend()

# shifted nonlinearity at a moving operating point, with sector lines
v_ref = 3.0
e = np.linspace(-v_ref + 1e-6, 2 * v_ref, 2000)
phi = np.array([error_nonlinearity(params, v_ref, x) if x else 0.0 for x in e])
axes[2].plot(e, phi, lw=1.5, label="deviation")
for radius, color in ((2.4, "C2"), (3.0, "C3")):
    lam = sector_bound(params, v_ref, radius)
    ee = np.linspace(-radius, radius, 10)
    axes[2].plot(ee, -lam * ee, color=color, ls="--", lw=1,
                 label=f"sector gain {lam:.3f} (radius {radius})")
    print(f"radius {radius}: smallest covering sector gain {lam:.5f}")
slope = error_slope(params, v_ref)
axes[2].plot(e[:400], slope * e[:400], color="0.5", ls=":", lw=1, label=f"slope at 0 = {slope:.2g}")
axes[2].set_xlabel("velocity error (m/s)")
axes[2].set_title(f"deviation from the operating speed {v_ref} m/s")
axes[2].legend(fontsize=8)

fig.tight_layout()
out = pathlib.Path(__file__).with_name("friction_curves.png")
fig.savefig(out, dpi=130)
print(f"wrote {out}")
