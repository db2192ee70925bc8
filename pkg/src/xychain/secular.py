"""Semi-classical (secular) limit: rate equations and their closed form.

In the strong-coarse-graining limit the diagonal of the density matrix obeys
classical rate equations with per-mode rates built from the exact Gaussian
bath spectrum gamma.  A product ansatz solves them: each mode occupation
relaxes exponentially,

    occ_a(t) = occ_a(inf) + (occ_a(0) - occ_a(inf)) * exp(-t/tau_a),
    occ_a(inf) = gamma(omega_a) / (gamma(omega_a) + gamma(-omega_a)),
    tau_a = (N+1) / (2*(gamma(omega_a) + gamma(-omega_a)) * sin^2(pi*a/(N+1))),

so the steady state is the thermal product at the bath temperature (KMS) and
the system-bath heat flux is a finite sum of decaying exponentials.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .bath import BathParams, spectral_density
from .spectrum import ChainParams, dispersions, eigenbasis


def thermal_occupations(p: ChainParams, beta: float) -> np.ndarray:
    """Per-mode occupations 1/(1 + e^{-beta*omega_a}) of a thermal product."""
    return expit(beta * dispersions(p))


def steady_occupations(p: ChainParams, b: BathParams) -> np.ndarray:
    """Fixed point gamma(omega_a)/(gamma(omega_a) + gamma(-omega_a))."""
    om = dispersions(p)
    gp = spectral_density(b, om)
    gm = spectral_density(b, -om)
    return gp / (gp + gm)


def relaxation_times(p: ChainParams, b: BathParams) -> np.ndarray:
    """Per-mode relaxation times tau_a (> 0)."""
    om = dispersions(p)
    rates = spectral_density(b, om) + spectral_density(b, -om)
    a = np.arange(1, p.N + 1)
    return (p.N + 1) / (2.0 * rates * np.sin(np.pi * a / (p.N + 1)) ** 2)


def _occ0_array(p: ChainParams, occ0) -> np.ndarray:
    occ0 = np.broadcast_to(np.asarray(occ0, dtype=float), (p.N,)).copy()
    if np.any((occ0 < 0) | (occ0 > 1)):
        raise ValueError("initial occupations must lie in [0, 1]")
    return occ0


@dataclass(frozen=True)
class SecularSolution:
    """Closed-form relaxation data: initial/steady occupations and times."""

    omegas: np.ndarray
    occ0: np.ndarray
    occ_inf: np.ndarray
    tau: np.ndarray

    @classmethod
    def solve(cls, p: ChainParams, b: BathParams, occ0=0.5) -> "SecularSolution":
        """occ0 may be a scalar (0.5 = maximally mixed) or a per-mode array."""
        return cls(
            omegas=dispersions(p),
            occ0=_occ0_array(p, occ0),
            occ_inf=steady_occupations(p, b),
            tau=relaxation_times(p, b),
        )

    @classmethod
    def from_beta(cls, p: ChainParams, b: BathParams, beta_sys0: float) -> "SecularSolution":
        return cls.solve(p, b, thermal_occupations(p, beta_sys0))


def occupation(t, sol: SecularSolution, a: int):
    """Mode-a occupation at time(s) t; exponential interpolation."""
    if not 1 <= a <= len(sol.omegas):
        raise ValueError(f"mode index {a} out of range")
    i = a - 1
    t = np.asarray(t, dtype=float)
    return sol.occ_inf[i] + (sol.occ0[i] - sol.occ_inf[i]) * np.exp(-t / sol.tau[i])


def occupations(t, sol: SecularSolution) -> np.ndarray:
    """All mode occupations; shape (len(t), N) for array t, (N,) for scalar."""
    t = np.asarray(t, dtype=float)
    decay = np.exp(-t[..., None] / sol.tau)
    return sol.occ_inf + (sol.occ0 - sol.occ_inf) * decay


def secular_flux(t, p: ChainParams, b: BathParams, occ0=0.5):
    """Closed-form heat flux J(t) = -sum_a (omega_a/tau_a)(occ0_a - occ_inf_a) e^{-t/tau_a}.

    Equals -d<H>/dt of the closed-form occupations analytically; positive
    when heat flows from the chain into the (colder) bath.
    """
    sol = SecularSolution.solve(p, b, occ0)
    t = np.asarray(t, dtype=float)
    amp = sol.omegas / sol.tau * (sol.occ0 - sol.occ_inf)
    out = -(np.exp(-t[..., None] / sol.tau) @ amp)
    return float(out) if out.ndim == 0 else out


def secular_energy(t, p: ChainParams, b: BathParams, occ0=0.5):
    """<H>(t) = -sum_a omega_a * occ_a(t) for the closed-form solution."""
    sol = SecularSolution.solve(p, b, occ0)
    return -(occupations(t, sol) @ sol.omegas)


def secular_magnetization(t, p: ChainParams, b: BathParams, occ0=0.5) -> np.ndarray:
    """Local <sigma^z_n>(t) of the product solution; shape (..., N) over sites."""
    sol = SecularSolution.solve(p, b, occ0)
    a = np.arange(1, p.N + 1)
    n = np.arange(1, p.N + 1)
    weights = np.sin(np.pi * np.outer(n, a) / (p.N + 1)) ** 2  # [site, mode]
    occ = occupations(t, sol)
    return (4.0 / (p.N + 1)) * (occ @ weights.T) - 1.0


def flux_bounds(t, p: ChainParams, b: BathParams):
    """Exponential envelopes bounding |J(t)/J(0)| in the secular limit.

    lower: decay at the fastest rate 2(gamma(h)+gamma(-h))/(N+1) (center of
    the band); upper: decay at the slowest rate 2 pi^2 (gamma(h+j) +
    gamma(-h-j))/(N+1)^3 (band edge).  Both equal 1 at t = 0.
    """
    t = np.asarray(t, dtype=float)
    edge = p.h + p.j
    fast = 2.0 * (spectral_density(b, p.h) + spectral_density(b, -p.h)) / (p.N + 1)
    slow = (
        2.0 * np.pi**2
        * (spectral_density(b, edge) + spectral_density(b, -edge))
        / (p.N + 1) ** 3
    )
    return np.exp(-fast * t), np.exp(-slow * t)


def rate_matrix(p: ChainParams, b: BathParams) -> np.ndarray:
    """Classical generator M over the 2^N diagonal configurations.

    d(rho_kk)/dt = sum_m M[k, m] rho_mm with gain entries
    (2/(N+1)) sin^2(pi*a/(N+1)) gamma(s_{k_a} omega_a) from the single-flip
    neighbors; columns sum to zero exactly and the stationary vector is the
    thermal product (detailed balance via KMS).
    """
    tb = eigenbasis(p)
    om = tb.omegas
    win = 2.0 / (p.N + 1) * np.sin(np.pi * np.arange(1, p.N + 1) / (p.N + 1)) ** 2
    gp = spectral_density(b, om)
    gm = spectral_density(b, -om)
    M = np.zeros((tb.dim, tb.dim))
    codes = np.arange(tb.dim)
    diag = np.zeros(tb.dim)
    for ai in range(p.N):
        occ = tb.occupations[ai]
        gain = win[ai] * np.where(occ == 1, gp[ai], gm[ai])
        loss = win[ai] * np.where(occ == 1, gm[ai], gp[ai])
        M[codes, tb.flips[ai]] += gain
        diag -= loss
    M[codes, codes] += diag
    return M
