"""Right-hand side of the master equation in the energy eigenbasis.

The reduced dynamics of the chain coupled to the bath through Pauli X on
site 1 is

    d(rho)/dt = -i[H + H_-, rho] - {H_+, rho} + G[rho],

where G is the relaxation generator and H_+/- are the Hermitian bath-induced
(Lamb-shift) operators.  All three are built from a single accumulated
coupling operator

    A = sum_{a,b,k} U[a,k] U[b,k] Gamma(s_{k_a} omega_a) |k^(b)><k^(a)|,

with U[a,k] the signed site-1 couplings, via H_+ = (A + A^dag)/2 and
H_- = (A - A^dag)/(2i); the non-unitary part then collapses to
-(A rho + rho A^dag).  Gamma is the finite-time spectral function before the
Markov switch, its t -> infinity limit after it, or half the exact Gaussian
spectrum in the semi-classical (secular) limit.

A coarse-graining window in its strong (Kronecker-delta) limit optionally
multiplies each summand by [s_{k_a} omega_a == s_{m_b} omega_b]; with the
non-degenerate dispersion this decouples the diagonal of rho and reproduces
the classical rate equations.

The generator application never materializes a 4^N x 4^N superoperator: the
windowless path exploits that the Gamma factor splits into row-only plus
column-only terms, costing O(N * 4^N) per call; the windowed path loops over
the N^2 mode pairs.
"""

import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .bath import BathParams, incomplete_spectral, markov_spectral, spectral_density
from .errors import CapabilityError
from .spectrum import DEFAULT_STATE_CAP, ChainParams, eigenbasis

RHS_MODES = ("nonmarkov", "markov", "secular")


@dataclass(frozen=True)
class WindowMode:
    """Coarse-graining window: 'none' or the strong limit 'kronecker_delta'.

    In the Kronecker limit two transition frequencies count as equal when
    they differ by at most `tol` (float-safe version of a discrete delta).
    """

    kind: str = "none"
    tol: float = 1e-9

    def __post_init__(self):
        if self.kind not in ("none", "kronecker_delta"):
            raise ValueError(f"unknown window kind {self.kind!r}")
        if self.kind == "kronecker_delta" and not self.tol > 0:
            raise ValueError(f"window tolerance must be > 0, got {self.tol}")


NO_WINDOW = WindowMode("none")


def kronecker_window(tol: float = 1e-9) -> WindowMode:
    return WindowMode("kronecker_delta", tol)


# ---------------------------------------------------------------------------
# density matrices

def maximally_mixed(N: int) -> np.ndarray:
    """Infinite-temperature state 1/2^N."""
    dim = 1 << N
    return np.eye(dim, dtype=complex) / dim


def thermal_product_state(p: ChainParams, beta: float) -> np.ndarray:
    """Diagonal canonical product state at inverse temperature beta.

    p(k_a = 1) = 1/(1 + e^{-beta*omega_a}) per mode; beta = 0 reproduces the
    maximally mixed state exactly.
    """
    tb = eigenbasis(p)
    log_z = np.sum(np.logaddexp(0.0, beta * tb.omegas))
    probs = np.exp(-beta * tb.energies - log_z)
    probs /= probs.sum()
    return np.diag(probs).astype(complex)


def trace_defect(rho: np.ndarray) -> float:
    return abs(np.trace(rho) - 1.0)


def hermiticity_defect(rho: np.ndarray) -> float:
    return float(np.max(np.abs(rho - rho.conj().T)))


def min_eigenvalue(rho: np.ndarray) -> float:
    """Smallest eigenvalue of the hermitized state (positivity diagnostic)."""
    return float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0])


# ---------------------------------------------------------------------------
# internal tables

@lru_cache(maxsize=None)
def _window_match(p: ChainParams, w: WindowMode, cap: int = DEFAULT_STATE_CAP):
    """(N, 2, N, 2) table [|s*omega_a - s'*omega_b| <= tol], or None."""
    if w.kind == "none":
        return None
    tb = eigenbasis(p, cap)
    freqs = np.stack([-tb.omegas, tb.omegas], axis=1)  # [a, bit] -> s*omega_a
    match = np.abs(freqs[:, :, None, None] - freqs[None, None, :, :]) <= w.tol
    if p.h == 0.0:
        warnings.warn(
            "h = 0 makes omega_a = -omega_{N+1-a}: the Kronecker-delta window "
            "keeps cross-mode terms beyond the classical rate equations",
            stacklevel=2,
        )
    match.setflags(write=False)
    return match


def _site_gamma(tb, gamma_plus, gamma_minus):
    """(N, dim) table Gamma(s_{k_a} omega_a) over modes and basis states."""
    return np.where(tb.occupations == 1, gamma_plus[:, None], gamma_minus[:, None])


def _coupling_operator(tb, GA, match):
    """Accumulated operator A feeding both Lamb-shift Hamiltonians."""
    U = tb.site1_couplings
    A = np.zeros((tb.dim, tb.dim), dtype=complex)
    for a in range(tb.N):
        TA = U[a] * GA[a]
        for b in range(tb.N):
            vals = TA * U[b]
            if match is not None:
                vals = vals * match[a, tb.occupations[a], b, tb.occupations[b]]
            # k -> (k^(b), k^(a)) is injective: plain fancy add is collision-free
            A[tb.flips[b], tb.flips[a]] += vals
    return A


def _apply_generator(tb, GA, rho, match):
    """G[rho] without materializing the superoperator."""
    U = tb.site1_couplings
    if match is None:
        # Gamma factor = row term + column term: two separable contractions
        Q = np.zeros_like(rho)
        R = np.zeros_like(rho)
        for m in range(tb.N):
            ix = tb.flips[m]
            Q += rho[:, ix] * U[m][None, :]
            R += U[m][:, None] * rho[ix, :]
        T = U * GA
        G = np.zeros_like(rho)
        for a in range(tb.N):
            ix = tb.flips[a]
            G += T[a][:, None] * Q[ix, :]
            G += np.conj(T[a])[None, :] * R[:, ix]
        return G
    G = np.zeros_like(rho)
    for a in range(tb.N):
        for b in range(tb.N):
            mask = match[a, :, b, :][np.ix_(tb.occupations[a], tb.occupations[b])]
            if not mask.any():
                continue
            fac = GA[a][:, None] + np.conj(GA[b])[None, :]
            src = rho[np.ix_(tb.flips[a], tb.flips[b])]
            G += (U[a][:, None] * U[b][None, :]) * (mask * fac) * src
    return G


def _gamma_pair(b: BathParams, omegas, t, mode):
    """Gamma evaluated at +omega_a and -omega_a for the requested kernel."""
    if mode == "markov":
        return markov_spectral(b, omegas), markov_spectral(b, -omegas)
    if mode == "secular":
        return (
            0.5 * spectral_density(b, omegas).astype(complex),
            0.5 * spectral_density(b, -omegas).astype(complex),
        )
    if mode == "nonmarkov":
        return incomplete_spectral(b, omegas, t), incomplete_spectral(b, -omegas, t)
    raise ValueError(f"unknown mode {mode!r}; expected one of {RHS_MODES}")


# ---------------------------------------------------------------------------
# public operations

def generator_apply(p: ChainParams, gamma_eval, rho: np.ndarray, w: WindowMode = NO_WINDOW):
    """Relaxation generator G[rho] for an arbitrary Gamma evaluator.

    gamma_eval maps a frequency to a complex Gamma value; it is sampled once
    at the 2N frequencies +-omega_a.  Hermitian in, Hermitian out.
    """
    tb = eigenbasis(p)
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (tb.dim, tb.dim):
        raise ValueError(f"state shape {rho.shape} does not match dim {tb.dim}")
    gp = np.array([complex(gamma_eval(om)) for om in tb.omegas])
    gm = np.array([complex(gamma_eval(-om)) for om in tb.omegas])
    return _apply_generator(tb, _site_gamma(tb, gp, gm), rho, _window_match(p, w))


def lamb_shift(p: ChainParams, gamma_eval, sign: int, w: WindowMode = NO_WINDOW):
    """Bath-induced Hermitian operator H_+ (sign=+1) or H_- (sign=-1).

    H_+ enters the master equation through the anticommutator, H_- through
    the commutator; both are Hermitian parts of the same accumulated A:
    H_+ = (A + A^dag)/2, H_- = (A - A^dag)/(2i).
    """
    if sign not in (+1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    tb = eigenbasis(p)
    gp = np.array([complex(gamma_eval(om)) for om in tb.omegas])
    gm = np.array([complex(gamma_eval(-om)) for om in tb.omegas])
    A = _coupling_operator(tb, _site_gamma(tb, gp, gm), _window_match(p, w))
    if sign > 0:
        return 0.5 * (A + A.conj().T)
    return (A - A.conj().T) / 2j


@lru_cache(maxsize=None)
def make_rhs(p: ChainParams, b: BathParams, mode: str, w: WindowMode = NO_WINDOW,
             cap: int = DEFAULT_STATE_CAP):
    """Compiled d(rho)/dt evaluator rhs(t, rho) for one kernel.

    For the time-independent kernels (markov, secular) the coupling operator
    and Gamma tables are prebuilt once.
    """
    if mode not in RHS_MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {RHS_MODES}")
    tb = eigenbasis(p, cap)
    match = _window_match(p, w, cap)
    gaps = tb.energy_gaps

    if mode == "nonmarkov":
        def rhs(t, rho):
            gp, gm = _gamma_pair(b, tb.omegas, t, "nonmarkov")
            GA = _site_gamma(tb, gp, gm)
            A = _coupling_operator(tb, GA, match)
            out = -1j * (gaps * rho)
            out -= A @ rho + rho @ A.conj().T
            out += _apply_generator(tb, GA, rho, match)
            return out
        return rhs

    gp, gm = _gamma_pair(b, tb.omegas, 0.0, mode)
    GA = _site_gamma(tb, gp, gm)
    A = _coupling_operator(tb, GA, match)
    Adag = A.conj().T.copy()

    def rhs(t, rho):
        out = -1j * (gaps * rho)
        out -= A @ rho + rho @ Adag
        out += _apply_generator(tb, GA, rho, match)
        return out

    return rhs


def master_rhs(p: ChainParams, b: BathParams, t: float, rho: np.ndarray,
               mode: str = "nonmarkov", w: WindowMode = NO_WINDOW):
    """d(rho)/dt of the master equation at time t.

    mode selects the kernel: "nonmarkov" (finite-time Gamma_t), "markov"
    (Gamma_inf), or "secular" (half the exact Gaussian spectrum, the
    semi-classical limit).  Traceless and Hermiticity-preserving.
    """
    tb = eigenbasis(p)
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (tb.dim, tb.dim):
        raise ValueError(f"state shape {rho.shape} does not match dim {tb.dim}")
    return make_rhs(p, b, mode, w)(t, rho)


def reference_rhs(p: ChainParams, b: BathParams, t: float, rho: np.ndarray,
                  mode: str = "nonmarkov"):
    """Literal double-commutator assembly of the master equation (dense oracle).

    Builds Pauli X on site 1 densely, filters it elementwise with Gamma at
    the energy differences, and assembles -i[H, rho] - ([X, F rho] + h.c.).
    Restricted to N <= 6; used to cross-check the generator form.
    """
    if p.N > 6:
        raise CapabilityError(f"reference assembly limited to N <= 6, got N={p.N}")
    if mode not in ("nonmarkov", "markov"):
        raise ValueError(f"reference kernel must be nonmarkov or markov, got {mode!r}")
    tb = eigenbasis(p)
    rho = np.asarray(rho, dtype=complex)
    X = tb.sigma_x1
    freqs = -tb.energy_gaps  # [n, m] = E_m - E_n
    if mode == "markov":
        g = markov_spectral(b, freqs)
    else:
        g = incomplete_spectral(b, freqs, t)
    F = X * g
    W = X @ (F @ rho) - (F @ rho) @ X
    return -1j * (tb.energy_gaps * rho) - (W + W.conj().T)
