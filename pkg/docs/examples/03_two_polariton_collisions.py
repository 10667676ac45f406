"""Two-polariton collisions: elastic probability, nonlinear phase, binding.

One polariton per band at common detuning delta collides inside the infinite
array.  Around resonance the inelastic pair momentum Q' turns complex: the
polaritons bind transiently and exit purely elastically with a phase that is
exactly pi at delta = 0 for every multi-mode phase difference.  Away from
resonance a real inelastic channel opens and |t_el| drops below 1.
"""

import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from chiralgate import ModelParams, resonance_scan, scatter

OUT = pathlib.Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

params = ModelParams()

# line cut through resonance at delta_k d = 3 pi / 2
deltas = np.linspace(-1.0, 1.0, 241)
p_el, phase, im_qp = [], [], []
for d in deltas:
    try:
        res = scatter(float(d), params)
    except ValueError:  # kernel-pole boundary cells
        p_el.append(np.nan), phase.append(np.nan), im_qp.append(np.nan)
        continue
    p_el.append(abs(res.t_el) ** 2)
    phase.append(np.angle(res.t_el))
    im_qp.append(-res.Qprime_d.imag)

fig, axes = plt.subplots(1, 3, figsize=(11, 3.2))
axes[0].plot(deltas, p_el)
axes[0].set(xlabel="delta (Gamma)", ylabel="|t_el|^2", title="elastic probability")
axes[1].plot(deltas, np.abs(phase))
axes[1].axhline(np.pi, ls=":", color="k")
axes[1].set(xlabel="delta (Gamma)", ylabel="|arg t_el|", title="nonlinear phase")
axes[2].plot(deltas, im_qp)
axes[2].set(
    xlabel="delta (Gamma)", ylabel="-Im Q' d", title="binding rate", ylim=(0, 6)
)
fig.tight_layout()
fig.savefig(OUT / "collision_linecut.png", dpi=150)

# maps over (delta, delta_k d), the full collision landscape
dk_grid = np.linspace(0.08, 2 * np.pi - 0.08, 121)
scan = resonance_scan(np.linspace(-1.0, 1.0, 121), dk_grid, params)
fig, axes = plt.subplots(1, 3, figsize=(12, 3.4), sharey=True)
extent = [dk_grid[0], dk_grid[-1], -1.0, 1.0]
for ax, key, title, clim in (
    (axes[0], "p_elastic", "|t_el|^2", (0, 1)),
    (axes[1], "arg_t_el", "arg t_el", (-np.pi, np.pi)),
    (axes[2], "minus_im_Qprime_d", "-Im Q' d", (0, 4)),
):
    imshow = ax.imshow(
        scan[key], origin="lower", aspect="auto", extent=extent,
        vmin=clim[0], vmax=clim[1], cmap="viridis",
    )
    ax.set(xlabel="delta_k d", title=title)
    fig.colorbar(imshow, ax=ax)
axes[0].set(ylabel="delta (Gamma)")
fig.tight_layout()
fig.savefig(OUT / "collision_maps.png", dpi=150)

res0 = scatter(0.0, params)
print(f"resonance: |t_el| = {abs(res0.t_el):.12f}, arg = {np.angle(res0.t_el):+.12f}")
print(f"label = {res0.label}, Im Q' d = {res0.Qprime_d.imag:.2f}")
frac = np.mean(scan["label"] == "resonance")
print(f"resonant fraction of the map: {frac:.2%}")
print(f"figures written to {OUT}")
