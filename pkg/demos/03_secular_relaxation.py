"""Closed-form relaxation in the semi-classical (secular) limit.

With strong coarse graining the populations obey classical rate equations
solved by per-mode exponentials.  The heat flux is then a finite sum of
decaying exponentials: featureless, monotone in envelope, and bounded by
two analytic exponentials.  Compare with demo 04 where the full quantum
kernel produces plateaus instead.
"""

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from xychain import (
    BathParams,
    ChainParams,
    SecularSolution,
    flux_bounds,
    occupations,
    relaxation_times,
    secular_flux,
    thermal_occupations,
)

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)

b = BathParams(lam=0.4, beta_bath=0.8, sigma=2.5)
p = ChainParams(N=5, j=2.0, h=1.0)
t = np.linspace(0, 80, 800)

# %% occupations relax mode by mode toward the bath's thermal values
sol = SecularSolution.solve(p, b, occ0=0.5)  # maximally mixed start
occ = occupations(t, sol)
fig, axes = plt.subplots(1, 2, figsize=(10, 3.8))
for a in range(p.N):
    axes[0].plot(t, occ[:, a], label=rf"mode {a + 1} ($\tau$={sol.tau[a]:.1f})")
axes[0].plot(t, np.full_like(t, 0.5), "k:", lw=0.7)
axes[0].set_xlabel("t")
axes[0].set_ylabel("mode occupation")
axes[0].legend(fontsize=7)
axes[0].set_title("exponential relaxation to the thermal state")

print("relaxation times:", np.array2string(relaxation_times(p, b), precision=2))
print("steady occupations:", np.array2string(sol.occ_inf, precision=4))
print("thermal occupations:", np.array2string(thermal_occupations(p, b.beta_bath), precision=4))

# %% flux with its exponential envelopes
for N in (3, 5, 7):
    pn = ChainParams(N=N, j=2.0, h=1.0)
    J = secular_flux(t, pn, b, 0.5)
    line, = axes[1].semilogy(t, np.abs(J / J[0]), label=f"N={N}")
    lo, hi = flux_bounds(t, pn, b)
    axes[1].semilogy(t, lo, color=line.get_color(), lw=0.6, ls="--")
    axes[1].semilogy(t, hi, color=line.get_color(), lw=0.6, ls=":")
axes[1].set_xlabel("t")
axes[1].set_ylabel("|J(t)/J(0)|")
axes[1].set_ylim(1e-4, 1.5)
axes[1].legend(fontsize=8)
axes[1].set_title("flux decay inside the analytic envelopes")

fig.tight_layout()
path = os.path.join(OUT, "secular_relaxation.png")
fig.savefig(path, dpi=150)
print(f"wrote {path}")
