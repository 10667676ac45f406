"""Polariton band structure of the chirally coupled emitter array.

The array hybridizes with the two guided modes into two polariton bands.
For any multi-mode phase difference strictly between 0 and 2*pi there are two
resonant momenta, q d = 0 (minus band) and q d = pi (plus band), whose group
velocities differ; this velocity contrast lets one polariton overtake the
other inside the array and is the resource behind the conditional phase.
"""

import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from chiralgate import (
    ModelParams,
    dispersion_curve,
    exact_omega,
    group_velocity,
    markov_omega,
    resonant_delays,
)

OUT = pathlib.Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

params = ModelParams(delta_k_d=1.5 * np.pi)

# --- Markovian bands and group velocities -------------------------------
fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.6))
for band, color in (("minus", "tab:blue"), ("plus", "tab:red")):
    pts = [p for p in dispersion_curve(params, n_points=400) if p.band == band]
    order = np.argsort([p.q_d for p in pts])
    q = np.array([pts[i].q_d for i in order])
    w = np.array([pts[i].omega for i in order])
    v = np.array([pts[i].v_g for i in order])
    # mask the zone-edge wrap so the curve does not jump across the figure
    jump = np.abs(np.diff(q)) > 0.5
    w[1:][jump] = np.nan
    ax1.plot(q, w, color=color, label=f"{band} band")
    ax2.plot(q, v, color=color)
ax1.set(xlabel="q d", ylabel="omega - omega0 (Gamma)", ylim=(-4, 4))
ax1.axhline(0, lw=0.5, color="k")
ax1.plot([0, -np.pi], [0, 0], "o", color="k", ms=5, zorder=5)
ax1.legend()
ax2.set(xlabel="q d", ylabel="v_g (Gamma d)", yscale="log")
fig.suptitle(f"delta_k d = 3 pi / 2: two bands, distinct resonant velocities")
fig.tight_layout()
fig.savefig(OUT / "polariton_bands.png", dpi=150)

v_minus = group_velocity(0.0, params)
v_plus = group_velocity(np.pi, params)
tau_plus, tau_minus, tau = resonant_delays(params)
print(f"resonant group velocities: v(0) = {v_minus:.5f}, v(pi) = {v_plus:.5f} Gamma d")
print(f"per-cell delays: tau_plus = {tau_plus:.5f}, tau_minus = {tau_minus:.5f} / Gamma")
print(f"crossing delay for N = {params.n_emitters}: tau = {tau:.3f} / Gamma")

# --- retardation corrections --------------------------------------------
# with a finite light speed between the emitters the dispersion becomes
# self-consistent; the Markov curve is the inv_c -> 0 limit
qs = np.linspace(-0.7 * np.pi, 0.7 * np.pi, 101)
fig, ax = plt.subplots(figsize=(5, 3.5))
ax.plot(qs, [markov_omega(q, params) for q in qs], "k-", label="Markov limit")
for inv_c in (0.05, 0.2):
    retarded = params.replace(inv_c=inv_c)
    ax.plot(
        qs,
        [exact_omega(q, retarded) for q in qs],
        "--",
        label=f"Gamma d / c = {inv_c}",
    )
ax.set(xlabel="q d", ylabel="omega - omega0 (Gamma)", ylim=(-3, 3))
ax.legend()
fig.tight_layout()
fig.savefig(OUT / "retardation.png", dpi=150)

for inv_c in (1e-3, 1e-4):
    dev = abs(exact_omega(0.4, params.replace(inv_c=inv_c)) - markov_omega(0.4, params))
    print(f"inv_c = {inv_c:g}: |exact - Markov| at q d = 0.4: {dev:.2e}")
print(f"figures written to {OUT}")
