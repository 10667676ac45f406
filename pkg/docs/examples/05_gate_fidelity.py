"""CZ-gate fidelity: bandwidth trade-off and scaling with emitter number.

The gate encodes qubits in the photon number of channels a and b; only the
|1>|1> input probes the nonlinearity and picks up the conditional pi.  For
each array size there is an optimal pulse bandwidth: narrow pulses approach
the plane-wave limit, but their spatial extent must still fit inside the
array.  Both the optimal bandwidth and the residual infidelity fall off as
power laws in N.

Runs in about two minutes; pass --full for the six-point scaling fit used by
the acceptance suite.
"""

import pathlib
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from chiralgate import (
    GateConfig,
    ModelParams,
    build_grid,
    fit_power_law,
    gate_fidelity,
    optimize_sigma,
)

OUT = pathlib.Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)
FULL = "--full" in sys.argv

report = gate_fidelity(ModelParams(n_emitters=30), GateConfig(sigma=0.05))
print(f"N=30, sigma=0.05: F = {report.fidelity:.6f}")
print(f"  overlaps: a {abs(report.overlap_a):.5f}, b {abs(report.overlap_b):.5f}, "
      f"ab {abs(report.overlap_ab):.5f} (phase {np.angle(report.overlap_ab):+.4f})")

linear = gate_fidelity(ModelParams(n_emitters=30), GateConfig(sigma=0.05),
                       include_bound_term=False)
print(f"  with linear emitters (no conditional phase): F = {linear.fidelity:.4f}")

# --- infidelity vs bandwidth for a few array sizes -----------------------
scoring_grid = build_grid(3.0, 601)
sigmas = np.geomspace(0.012, 0.3, 16)
fig, ax = plt.subplots(figsize=(5.2, 3.8))
for n in (10, 20, 40):
    params = ModelParams(n_emitters=n)
    infid = [
        1.0 - gate_fidelity(params, GateConfig(sigma=float(s)), grid=scoring_grid).fidelity
        for s in sigmas
    ]
    ax.loglog(sigmas, infid, "o-", ms=3, label=f"N = {n}")
ax.set(xlabel="sigma (Gamma)", ylabel="1 - F")
ax.legend()
fig.tight_layout()
fig.savefig(OUT / "bandwidth_tradeoff.png", dpi=150)

# --- power-law scaling of the optimum ------------------------------------
n_values = [10, 20, 30, 40, 50, 60] if FULL else [10, 20, 30, 40]
fine_grid = build_grid(6.0, 1201)
sig_n, inf_n = [], []
for n in n_values:
    params = ModelParams(n_emitters=n)
    s_opt, _ = optimize_sigma(
        params,
        GateConfig(),
        bracket=(5e-3, 0.4),
        fidelity_fn=lambda s, p=params: gate_fidelity(
            p, GateConfig(sigma=s), grid=scoring_grid
        ).fidelity,
    )
    f_opt = gate_fidelity(params, GateConfig(sigma=s_opt), grid=fine_grid).fidelity
    sig_n.append(s_opt)
    inf_n.append(1.0 - f_opt)
    print(f"N = {n:2d}: sigma_N = {s_opt:.4f}, 1 - F = {1 - f_opt:.3e}")

exp_s, pre_s, r2_s = fit_power_law(n_values, sig_n)
exp_f, pre_f, r2_f = fit_power_law(n_values, inf_n)
print(f"sigma_N ~ N^{exp_s:.2f} (r^2 = {r2_s:.4f})")
print(f"1 - F   ~ N^{exp_f:.2f} (r^2 = {r2_f:.4f})")

fig, ax = plt.subplots(figsize=(5.2, 3.8))
ax.loglog(n_values, sig_n, "o-", label=f"sigma_N ~ N^{exp_s:.2f}")
ax.loglog(n_values, inf_n, "s-", label=f"1 - F ~ N^{exp_f:.2f}")
ax.set(xlabel="emitter number N")
ax.legend()
fig.tight_layout()
fig.savefig(OUT / "scaling.png", dpi=150)
print(f"figures written to {OUT}")
