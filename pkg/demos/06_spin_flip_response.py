"""Unitary spin waves from a single spin flip.

Replacing the bath by a single flip of spin 1 isolates the wave carrier:
the magnetization response of a thermal chain is known in closed form and,
in the thermodynamic limit, reduces to a band integral with explicit
high-temperature asymptotics.  The crest travels at the band's maximal
group velocity j, matching the front speed seen while cooling (demo 05).
"""

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from xychain import (
    ChainParams,
    crest_positions,
    fit_crest_speed,
    high_temp_response,
    thermal_response,
)

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)

j, h = 2.0, 1.0

# %% finite chain at moderate temperature: reflections and revivals
p = ChainParams(N=7, j=j, h=h)
ts = np.linspace(0, 12, 400)
fig, axes = plt.subplots(1, 2, figsize=(11, 4))
resp = np.array([thermal_response(p, 0.8, n, ts) for n in range(1, 8)])
im = axes[0].pcolormesh(ts, np.arange(1, 8), resp, cmap="RdBu_r",
                        vmin=-np.max(np.abs(resp)), vmax=np.max(np.abs(resp)))
axes[0].set_xlabel("t")
axes[0].set_ylabel("site n")
axes[0].set_title(r"finite chain (N=7, $\beta_{sys,0}$=0.8): reflections")
fig.colorbar(im, ax=axes[0], label=r"$\Delta^z(n,t)$")

# %% thermodynamic limit, normalized high-temperature response
t_grid = np.linspace(0.5, 15, 160)
n_max = 40
field = np.empty((n_max, t_grid.size))
for i, t in enumerate(t_grid):
    for n in range(1, n_max + 1):
        field[n - 1, i] = high_temp_response(j, h, 1e-3, n, t) / (1e-3 * h)
im = axes[1].pcolormesh(t_grid * j, np.arange(1, n_max + 1), field, cmap="Blues_r")
crest = crest_positions(j, t_grid, n_max=n_max)
axes[1].plot(t_grid * j, crest, "r.", ms=2, label="crest")
axes[1].plot(t_grid * j, t_grid * j, "w--", lw=0.8, label="speed j")
axes[1].set_xlabel("t j")
axes[1].set_ylabel("site n")
axes[1].set_title("thermodynamic limit: dispersing crest, no reflection")
axes[1].legend(fontsize=8, loc="upper left")
fig.colorbar(im, ax=axes[1], label=r"$\Delta^z/(\beta h)$")

fig.tight_layout()
path = os.path.join(OUT, "spin_flip_response.png")
fig.savefig(path, dpi=150)
print(f"wrote {path}")

speed = fit_crest_speed(j, np.linspace(5.0 / j, 30.0 / j, 18), n_max=n_max)
print(f"fitted crest speed: {speed:.3f} sites/time (group velocity bound j = {j})")
