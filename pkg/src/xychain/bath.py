"""Heat-bath spectral functions.

The bath is characterized by a Gaussian spectrum
gamma(omega) = lambda^2 * exp(-(omega/sigma - beta*sigma/2)^2 / 2), which
satisfies the KMS condition gamma(omega) = e^{beta*omega} gamma(-omega) and
therefore drives the chain toward the thermal state at inverse temperature
beta.  The finite-time (incomplete) spectral function Gamma_t(omega) -- the
half Fourier transform of the bath auto-correlation up to time t -- is
evaluated in closed form by approximating the Gaussian with its order-n
power-law representation and closing the contour around the resulting pole
omega_0 = sigma*(beta*sigma/2 - i*sqrt(2n)).  The t -> infinity (Markov)
limit Gamma_inf is implemented independently as its own closed form and
satisfies Gamma_inf + conj(Gamma_inf) = truncated spectrum exactly.
"""

from dataclasses import dataclass
from math import comb

import numpy as np


@dataclass(frozen=True)
class BathParams:
    """Coupling strength lam, inverse temperature beta_bath, inverse
    correlation-decay timescale sigma, and truncation order n_trunc."""

    lam: float
    beta_bath: float
    sigma: float
    n_trunc: int = 2

    def __post_init__(self):
        object.__setattr__(self, "lam", float(self.lam))
        object.__setattr__(self, "beta_bath", float(self.beta_bath))
        object.__setattr__(self, "sigma", float(self.sigma))
        if self.lam < 0:
            raise ValueError(f"lambda must be >= 0, got {self.lam}")
        if self.sigma <= 0:
            raise ValueError(f"sigma must be > 0, got {self.sigma}")
        if not isinstance(self.n_trunc, (int, np.integer)) or not 1 <= self.n_trunc <= 4:
            raise ValueError(f"n_trunc must be an integer in 1..4, got {self.n_trunc!r}")
        object.__setattr__(self, "n_trunc", int(self.n_trunc))

    @property
    def pole(self) -> complex:
        """Lower-half-plane pole of the order-n spectrum representation."""
        return self.sigma * (self.beta_bath * self.sigma / 2 - 1j * np.sqrt(2 * self.n_trunc))


def spectral_density(b: BathParams, omega) -> np.ndarray:
    """Exact Gaussian bath spectrum gamma(omega); strictly positive."""
    x = np.asarray(omega) / b.sigma - b.beta_bath * b.sigma / 2
    return b.lam**2 * np.exp(-0.5 * x**2)


def truncated_spectral_density(b: BathParams, omega) -> np.ndarray:
    """Order-n power-law representation of the spectrum used inside Gamma_t."""
    n = b.n_trunc
    x = np.asarray(omega) / b.sigma - b.beta_bath * b.sigma / 2
    return b.lam**2 * (1.0 + x**2 / (2 * n)) ** (-n)


def regularized_gamma_p(k: int, z) -> np.ndarray:
    """Lower regularized incomplete gamma function P(k+1, z) for integer order.

    P(k+1, z) = 1 - e^{-z} * sum_{m=0}^{k} z^m / m!, evaluated with the factor
    z/m folded into a running term so intermediate magnitudes stay bounded for
    |z| up to several hundred.  P(k+1, 0) = 0 exactly; P -> 1 as Re z -> +inf.
    """
    if k < 0:
        raise ValueError(f"order k must be >= 0, got {k}")
    z = np.asarray(z, dtype=complex)
    term = np.exp(-z)
    total = term.copy()
    for m in range(1, k + 1):
        term = term * z / m
        total += term
    return 1.0 - total


def incomplete_spectral(b: BathParams, omega, t: float):
    """Finite-time bath spectral function Gamma_t(omega).

    Closed form from the contour integral around the pole of the order-n
    spectrum: a sum of binomial-weighted powers of i*sigma*sqrt(8n)/(omega -
    pole), each multiplied by P(k+1, -i*t*(omega - pole)).  Vanishes
    identically at t = 0 and tends to the Markov limit for t*sigma*sqrt(2n)
    >> 1.  The pole is strictly complex, so real omega is never singular.
    """
    if t < 0:
        raise ValueError(f"time must be >= 0, got {t}")
    n = b.n_trunc
    dw = np.asarray(omega, dtype=complex) - b.pole
    z = -1j * t * dw
    base = np.sqrt(8.0 * n) * 1j * b.sigma / dw
    power = base.copy()
    acc = np.zeros_like(dw)
    for k in range(n):
        acc = acc + comb(2 * n - 2 - k, n - 1) * power * regularized_gamma_p(k, z)
        power = power * base
    return b.lam**2 / 4**n * acc


def markov_spectral(b: BathParams, omega):
    """Markov (t -> infinity) limit Gamma_inf(omega) of the spectral function.

    Independent closed form (every P factor replaced by its limit 1), so the
    post-switch kernel is exact rather than a large-t evaluation.  Satisfies
    Gamma_inf(omega) + conj(Gamma_inf(omega)) = truncated_spectral_density.
    """
    n = b.n_trunc
    dw = np.asarray(omega, dtype=complex) - b.pole
    base = np.sqrt(8.0 * n) * 1j * b.sigma / dw
    power = base.copy()
    acc = np.zeros_like(dw)
    for k in range(n):
        acc = acc + comb(2 * n - 2 - k, n - 1) * power
        power = power * base
    return b.lam**2 / 4**n * acc
