"""Response of the local magnetization to a single spin flip at site 1.

Flipping the first spin of a thermalized chain launches spin waves whose
arrival changes <sigma^z_n>.  For an energy eigenstate the response is a
double mode sum with phase factors e^{-it(omega_a - omega_b)}; averaging
over a canonical product ensemble factorizes it into a difference of squared
single sums, antisymmetric under beta -> -beta.  In the thermodynamic limit
the mode sum becomes an integral over the band, with closed-form
high-temperature (~ beta) and low-temperature (band-edge) asymptotics built
from the Fourier coefficients b_n of sin(z*cos(a) - pi/4).

A dense 2^N evaluation of <sigma^x_1 e^{itH} sigma^z_n e^{-itH} sigma^x_1>
serves as the brute-force oracle for the analytic formulas.
"""

import threading
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.integrate import quad
from scipy.special import expit

from .errors import CapabilityError, QuadratureError
from .liouvillian import thermal_product_state
from .spectrum import ChainParams, OccupationConfig, dispersions, eigenbasis, sigma_z_matrix

_QUAD_OPTS = dict(limit=200, epsabs=1e-12, epsrel=1e-12)


def _code_of(k) -> int:
    return k.code if isinstance(k, OccupationConfig) else int(k)


def _mode_weights(p: ChainParams, n: int) -> np.ndarray:
    """sin(pi*a/(N+1)) * sin(pi*n*a/(N+1)) over modes a."""
    a = np.arange(1, p.N + 1)
    return np.sin(np.pi * a / (p.N + 1)) * np.sin(np.pi * n * a / (p.N + 1))


def eigenstate_response(p: ChainParams, k, n: int, t):
    """Magnetization response Delta^z(n, t) for initial eigenstate k.

    Real by a<->b symmetry of the double mode sum; at t = 0 it vanishes for
    n != 1 and equals -2<sigma^z_1> for n = 1.
    """
    if not 1 <= n <= p.N:
        raise ValueError(f"site index {n} out of range 1..{p.N}")
    code = _code_of(k)
    bits = (code >> np.arange(p.N)) & 1
    om = dispersions(p)
    S = _mode_weights(p, n)
    t = np.asarray(t, dtype=float)
    z = np.exp(-1j * t[..., None] * om)
    A = z @ S
    C = z @ (S * bits)
    val = np.abs(A) ** 2 - 2.0 * (A * np.conj(C)).real
    out = 2.0 * (2.0 / (p.N + 1)) ** 2 * val
    return float(out) if out.ndim == 0 else out


def thermal_response(p: ChainParams, beta: float, n: int, t):
    """Canonical-ensemble response at inverse temperature beta (finite N).

    Difference of squared single-mode sums; antisymmetric in beta, so the
    infinite-temperature ensemble gives exactly zero.
    """
    if not 1 <= n <= p.N:
        raise ValueError(f"site index {n} out of range 1..{p.N}")
    om = dispersions(p)
    S = _mode_weights(p, n)
    t = np.asarray(t, dtype=float)
    z = np.exp(1j * t[..., None] * om)
    pref = 2.0 / (p.N + 1)
    g_plus = pref * (z @ (S * expit(-beta * om)))
    g_minus = pref * (z @ (S * expit(beta * om)))
    out = 2.0 * (np.abs(g_plus) ** 2 - np.abs(g_minus) ** 2)
    return float(out) if out.ndim == 0 else out


def _quad_complex(func, lo, hi, tol):
    re, re_err = quad(lambda x: func(x).real, lo, hi, **_QUAD_OPTS)
    im, im_err = quad(lambda x: func(x).imag, lo, hi, **_QUAD_OPTS)
    achieved = re_err + im_err
    if achieved > 100 * tol:
        raise QuadratureError(
            f"quadrature reached {achieved:.3e}, requested {tol:.3e}", achieved=achieved
        )
    return re + 1j * im


def thermo_integral_response(j: float, h: float, beta: float, n: int, t,
                             tol: float = 1e-10):
    """Thermodynamic-limit (N -> infinity) thermal response.

    Band integral evaluated after the x = cos(a) substitution, which removes
    the inverse-square-root edge behavior; the integrand in a is smooth.
    """
    if n < 1:
        raise ValueError(f"site index must be >= 1, got {n}")
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.empty(t_arr.shape)
    for i, ti in enumerate(t_arr.ravel()):
        def g(sign):
            return _quad_complex(
                lambda a: (2.0 / np.pi) * np.exp(1j * ti * j * np.cos(a))
                * np.sin(n * a) * np.sin(a)
                * expit(-sign * beta * (h + j * np.cos(a))),
                0.0, np.pi, tol,
            )
        out.ravel()[i] = 2.0 * (abs(g(+1)) ** 2 - abs(g(-1)) ** 2)
    return float(out[0]) if np.asarray(t).ndim == 0 else out


_b_cache: dict = {}
_b_lock = threading.Lock()


def fourier_coeff_b(n: int, z: float) -> float:
    """Cosine-series coefficient b_n of sin(z*cos(a) - pi/4) on [0, pi].

    b_n = (2/pi) * integral_0^pi sin(z*cos(a) - pi/4) cos(n*a) da, memoized
    at 1e-12 granularity in z.  Equals +-sqrt(2)*J_n(z) up to the phase
    pattern of the Jacobi-Anger expansion (checked in the tests).
    """
    if n < 1:
        raise ValueError(f"harmonic index must be >= 1, got {n}")
    key = (n, round(float(z), 12))
    with _b_lock:
        if key in _b_cache:
            return _b_cache[key]
    val, _ = quad(
        lambda a: np.sin(z * np.cos(a) - np.pi / 4) * np.cos(n * a),
        0.0, np.pi, **_QUAD_OPTS,
    )
    val *= 2.0 / np.pi
    with _b_lock:
        _b_cache[key] = val
    return val


def high_temp_response(j: float, h: float, beta: float, n: int, t: float) -> float:
    """Leading small-beta response -2*beta*h*(n*b_n(tj)/(tj))^2.

    Normalized by beta*h it is temperature- and field-independent.  The
    formula is a large-argument form singular at t = 0, so t must be > 0.
    """
    if t <= 0:
        raise ValueError("high-temperature asymptotic is defined for t > 0 only")
    if j == 0:
        raise ValueError("coupling j must be nonzero")
    z = t * j
    bn = fourier_coeff_b(n, z)
    return -2.0 * beta * h * (n * bn / z) ** 2


def low_temp_response(j: float, h: float, n: int, t: float, tol: float = 1e-10) -> float:
    """Low-temperature (beta -> infinity) response.

    Quadrature over the Fermi window [pi/2 - zeta, pi/2 + zeta] with
    zeta = arcsin(min(1, |h/j|)); for |h/j| >= 1 the window spans the whole
    band and the result reduces to the high-temperature form with
    beta -> 2/|h| exactly.
    """
    if t <= 0:
        raise ValueError("low-temperature asymptotic is defined for t > 0 only")
    if j == 0:
        raise ValueError("coupling j must be nonzero")
    if n < 1:
        raise ValueError(f"site index must be >= 1, got {n}")
    zeta = np.arcsin(min(1.0, abs(h / j)))
    z = t * j
    bn = fourier_coeff_b(n, z)
    integral, err = quad(
        lambda a: np.cos(z * np.cos(a) - np.pi / 4) * np.sin(a) * np.sin(n * a),
        np.pi / 2 - zeta, np.pi / 2 + zeta, **_QUAD_OPTS,
    )
    if err > 100 * tol:
        raise QuadratureError(f"quadrature reached {err:.3e}", achieved=err)
    return -8.0 * np.sign(h) * n * bn / (np.pi * z) * integral


def brute_force_response(p: ChainParams, n: int, t: float, *, k=None, beta=None) -> float:
    """Dense-matrix oracle for the analytic response formulas.

    Builds sigma^x_1, sigma^z_n and the diagonal propagator in the 2^N
    eigenbasis and evaluates <sigma^x_1 e^{itH} sigma^z_n e^{-itH} sigma^x_1>
    - <sigma^z_n> for an eigenstate (k) or a canonical ensemble (beta).
    Exactly one of k, beta must be given; N <= 8.
    """
    if (k is None) == (beta is None):
        raise ValueError("give exactly one of k (eigenstate) or beta (thermal)")
    if p.N > 8:
        raise CapabilityError(f"brute-force response limited to N <= 8, got N={p.N}")
    if not 1 <= n <= p.N:
        raise ValueError(f"site index {n} out of range 1..{p.N}")
    tb = eigenbasis(p)
    X = tb.sigma_x1
    Z = sigma_z_matrix(p, n)
    phase = np.exp(1j * t * tb.energies)
    evolved = (phase[:, None] * Z) * np.conj(phase)[None, :]
    diff = np.diagonal(X @ evolved @ X).real - np.diagonal(Z).real
    if k is not None:
        return float(diff[_code_of(k)])
    weights = np.diagonal(thermal_product_state(p, beta)).real
    return float(weights @ diff)


def crest_positions(j: float, t_values, n_max: int = 45) -> np.ndarray:
    """Site of the strongest normalized high-temperature response per time."""
    t_values = np.asarray(t_values, dtype=float)
    crest = np.empty(t_values.size, dtype=int)
    for i, ti in enumerate(t_values):
        z = ti * j
        vals = [(n * fourier_coeff_b(n, z)) ** 2 for n in range(1, n_max + 1)]
        crest[i] = 1 + int(np.argmax(vals))
    return crest


def fit_crest_speed(j: float, t_values, n_max: int = 45) -> float:
    """Least-squares speed (sites per unit time) of the travelling wave crest."""
    t_values = np.asarray(t_values, dtype=float)
    ns = crest_positions(j, t_values, n_max)
    return float(np.polyfit(t_values, ns, 1)[0])


@dataclass(frozen=True)
class ResponseQuery:
    """One response evaluation request (the CLI's unit of work).

    mode: eigen | thermal | thermo | high_temp | low_temp.  Finite-chain
    modes (eigen, thermal) need `chain`; thermodynamic-limit modes need the
    couplings j, h.  `k` is the eigenstate code for mode eigen.
    """

    mode: str
    n: int
    t: float
    beta: float = 0.0
    chain: Optional[ChainParams] = None
    j: Optional[float] = None
    h: Optional[float] = None
    k: Optional[int] = None

    def __post_init__(self):
        modes = ("eigen", "thermal", "thermo", "high_temp", "low_temp")
        if self.mode not in modes:
            raise ValueError(f"unknown response mode {self.mode!r}; expected one of {modes}")
        if self.mode in ("eigen", "thermal"):
            if self.chain is None:
                raise ValueError(f"mode {self.mode!r} requires chain parameters")
            if not 1 <= self.n <= self.chain.N:
                raise ValueError(f"site index {self.n} out of range 1..{self.chain.N}")
        else:
            if self.j is None or self.h is None:
                raise ValueError(f"mode {self.mode!r} requires couplings j and h")
        if self.mode == "eigen" and self.k is None:
            raise ValueError("mode 'eigen' requires an occupation code k")


def evaluate_response(q: ResponseQuery) -> float:
    """Dispatch a ResponseQuery to the matching response operation."""
    if q.mode == "eigen":
        return eigenstate_response(q.chain, q.k, q.n, q.t)
    if q.mode == "thermal":
        return thermal_response(q.chain, q.beta, q.n, q.t)
    if q.mode == "thermo":
        return thermo_integral_response(q.j, q.h, q.beta, q.n, q.t)
    if q.mode == "high_temp":
        return high_temp_response(q.j, q.h, q.beta, q.n, q.t)
    return low_temp_response(q.j, q.h, q.n, q.t)
