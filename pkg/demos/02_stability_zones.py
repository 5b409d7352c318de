"""Where the sliding equilibrium is linearly stable.

The linearised error dynamics lose stability exactly when the damping
cannot compensate the negative friction slope: the level set of
|v| exp(-(v/v_s)^2) against a damping threshold carves the reference
speeds into stable / unstable bands.  This script draws the indicator,
marks the band roots, and tabulates the certified regime at a few
representative speeds.

Writes stability_zones.png next to this script.
"""

import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from stickslip import PhysicalParams, hurwitz_interval, instability_indicator

params = PhysicalParams()
band = hurwitz_interval(params)
threshold = params.k_v * params.v_s**2 / (
    2 * params.m * params.g * (params.mu_S - params.mu_C)
)
print(f"damping threshold: {threshold:.6f}")
print(f"unstable speed band: [{band[0]:.4f}, {band[1]:.4f}] m/s")

v = np.linspace(0, 3.0, 1500)
theta = np.array([instability_indicator(params, x) for x in v])

fig, ax = plt.subplots(figsize=(7, 4.2))
ax.plot(v, theta, lw=1.5, label="indicator |v| exp(-(v/v_s)^2)")
ax.axhline(threshold, color="C3", ls="--", lw=1, label="damping threshold")
ax.axvspan(band[0], band[1], color="C3", alpha=0.15, label="unstable band")
for r in band:
    ax.plot([r], [threshold], "ko", ms=4)
    ax.annotate(f"{r:.3f}", (r, threshold), textcoords="offset points", xytext=(4, 6))
ax.set_xlabel("reference speed (m/s)")
ax.set_ylabel("indicator (m/s)")
ax.set_title("linear stability of the sliding equilibrium")
ax.legend()
fig.tight_layout()
out = pathlib.Path(__file__).with_name("stability_zones.png")
fig.savefig(out, dpi=130)
print(f"wrote {out}")

print("\nhigher viscosity closes the band entirely:")
print("  k_v = 10:", hurwitz_interval(PhysicalParams(k_v=10.0)))
