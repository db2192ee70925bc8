"""Bath spectrum and the finite-time spectral function.

The bath is summarized by a Gaussian spectrum gamma(omega) obeying the KMS
condition.  Before the dynamics becomes Markovian, the kernel is the
finite-time half transform Gamma_t, evaluated here by the closed residue
formula for the order-n representation of the Gaussian.  The plots show the
spectrum alongside its truncation, and how fast Gamma_t settles onto the
Markov limit (which justifies switching kernels at t = 3.5/sigma).
"""

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from xychain import (
    BathParams,
    incomplete_spectral,
    markov_spectral,
    spectral_density,
    truncated_spectral_density,
)

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)

b = BathParams(lam=0.4, beta_bath=0.8, sigma=2.5, n_trunc=2)
om = np.linspace(-10, 15, 400)

# %% spectrum, its order-n stand-in, and KMS asymmetry
fig, axes = plt.subplots(1, 3, figsize=(12, 3.6))
axes[0].plot(om, spectral_density(b, om), label=r"$\gamma$ (Gaussian)")
axes[0].plot(om, truncated_spectral_density(b, om), "--", label=f"order-{b.n_trunc} form")
axes[0].plot(om, 2 * markov_spectral(b, om).real, ":", lw=2.5,
             label=r"$2\,\mathrm{Re}\,\Gamma_\infty$")
axes[0].set_xlabel(r"$\omega$")
axes[0].legend(fontsize=8)
axes[0].set_title("spectrum and Markov kernel")

# %% Gamma_t relaxing onto Gamma_inf at a fixed frequency
ts = np.linspace(0, 3.0, 300)
for w in (-1.0, 1.0, 2.4):
    vals = np.array([incomplete_spectral(b, w, t) for t in ts])
    ginf = markov_spectral(b, w)
    axes[1].semilogy(ts, np.abs(vals - ginf) / b.lam**2, label=rf"$\omega={w}$")
axes[1].axvline(3.5 / b.sigma, color="k", lw=0.8, ls="--")
axes[1].annotate(r"$t_{sw}=3.5/\sigma$", (3.5 / b.sigma, 1e-1), fontsize=8)
axes[1].set_xlabel("t")
axes[1].set_ylabel(r"$|\Gamma_t-\Gamma_\infty|/\lambda^2$")
axes[1].legend(fontsize=8)
axes[1].set_title("approach to the Markov limit")

# %% real part of Gamma_t across the band for a few times
for t in (0.2, 0.6, 1.4):
    axes[2].plot(om, incomplete_spectral(b, om, t).real, label=f"t={t}")
axes[2].plot(om, markov_spectral(b, om).real, "k--", label=r"$t\to\infty$")
axes[2].set_xlabel(r"$\omega$")
axes[2].set_ylabel(r"$\mathrm{Re}\,\Gamma_t$")
axes[2].legend(fontsize=8)
axes[2].set_title("kernel buildup")

fig.tight_layout()
path = os.path.join(OUT, "bath_spectral_functions.png")
fig.savefig(path, dpi=150)
print(f"wrote {path}")

gap = np.max(np.abs(incomplete_spectral(b, np.linspace(-2.5, 7.5, 41), 3.5 / b.sigma)
                    - markov_spectral(b, np.linspace(-2.5, 7.5, 41))))
print(f"max |Gamma_t - Gamma_inf| at t_sw over the band: {gap:.2e} "
      f"({gap / b.lam**2:.2e} in units of lambda^2)")
