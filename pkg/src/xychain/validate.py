"""Self-contained oracle suites behind the `validate` CLI subcommand.

Each suite pits an implementation against an independent route to the same
quantity (literal operator assembly, dense state evolution, numerical
quadrature, classical rate equations) and reports the worst deviation.
"""

import numpy as np
from scipy.integrate import quad

from .bath import BathParams, incomplete_spectral, truncated_spectral_density
from .liouvillian import kronecker_window, master_rhs, reference_rhs
from .secular import rate_matrix
from .spectrum import ChainParams
from .spinflip import brute_force_response, eigenstate_response, thermal_response


def _random_hermitian(rng, dim):
    A = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    H = 0.5 * (A + A.conj().T)
    return H / np.trace(H).real


def suite_generator_vs_reference(rng=None):
    """Eigenbasis generator form against the double-commutator assembly."""
    rng = rng or np.random.default_rng(2024)
    b = BathParams(0.4, 0.8, 2.5)
    worst = 0.0
    for N in (2, 3):
        p = ChainParams(N, 2.0, 1.0)
        for t in (0.1, 1.0, 5.0):
            for mode in ("nonmarkov", "markov"):
                rho = _random_hermitian(rng, 2**N)
                d = np.max(np.abs(
                    master_rhs(p, b, t, rho, mode) - reference_rhs(p, b, t, rho, mode)
                ))
                worst = max(worst, float(d))
    return "generator form vs literal assembly", worst, 1e-10


def suite_response_vs_brute_force(rng=None):
    """Analytic spin-flip response against dense evolution."""
    rng = rng or np.random.default_rng(7)
    worst = 0.0
    for N in (3, 4):
        p = ChainParams(N, 2.0, 1.0)
        for _ in range(5):
            code = int(rng.integers(0, 2**N))
            n = int(rng.integers(1, N + 1))
            t = float(rng.uniform(0.0, 8.0))
            d = abs(eigenstate_response(p, code, n, t) - brute_force_response(p, n, t, k=code))
            worst = max(worst, d)
        for beta in (0.4, 1.2):
            n = int(rng.integers(1, N + 1))
            t = float(rng.uniform(0.0, 8.0))
            d = abs(thermal_response(p, beta, n, t) - brute_force_response(p, n, t, beta=beta))
            worst = max(worst, d)
    return "spin-flip response vs dense evolution", worst, 1e-10


def suite_bath_vs_quadrature():
    """Closed-form finite-time spectral function against its defining integral."""
    b = BathParams(0.4, 0.8, 2.5, 2)
    mu = b.beta_bath * b.sigma**2 / 2
    L = 300.0

    def oracle(omega, t):
        def re_int(W):
            x = omega - W
            core = np.sin(x * t) / x if abs(x) > 1e-12 else t
            return float(truncated_spectral_density(b, W)) * core

        def im_int(W):
            x = omega - W
            core = (1 - np.cos(x * t)) / x if abs(x) > 1e-12 else 0.0
            return float(truncated_spectral_density(b, W)) * core

        opts = dict(limit=400, points=[omega, mu], epsabs=1e-12)
        re = quad(re_int, mu - L, mu + L, **opts)[0] / (2 * np.pi)
        im = quad(im_int, mu - L, mu + L, **opts)[0] / (2 * np.pi)
        return re + 1j * im

    worst = 0.0
    for om, t in [(1.0, 0.3), (2.4, 1.4), (-0.4, 0.7), (3.0, 5.0)]:
        worst = max(worst, abs(incomplete_spectral(b, om, t) - oracle(om, t)))
    return "finite-time bath function vs quadrature", worst, 1e-6


def suite_window_vs_rate_equations(rng=None):
    """Kronecker-delta-window master equation against the classical rates."""
    rng = rng or np.random.default_rng(11)
    b = BathParams(0.4, 0.8, 2.5)
    worst = 0.0
    for N in (2, 3):
        p = ChainParams(N, 2.0, 1.0)
        M = rate_matrix(p, b)
        probs = rng.random(2**N)
        probs /= probs.sum()
        rho = np.diag(probs).astype(complex)
        rhs = master_rhs(p, b, 0.0, rho, "secular", kronecker_window())
        worst = max(worst, float(np.max(np.abs(np.diagonal(rhs).real - M @ probs))))
        worst = max(worst, float(np.max(np.abs(rhs - np.diag(np.diagonal(rhs))))))
    return "delta-window dynamics vs rate equations", worst, 1e-10


ALL_SUITES = (
    suite_generator_vs_reference,
    suite_response_vs_brute_force,
    suite_bath_vs_quadrature,
    suite_window_vs_rate_equations,
)


def run_all(out=print) -> bool:
    """Run every oracle suite; report one line each; True when all pass."""
    ok = True
    for suite in ALL_SUITES:
        name, worst, tol = suite()
        passed = worst < tol
        ok = ok and passed
        out(f"{'PASS' if passed else 'FAIL'}  {name}: worst deviation {worst:.3e} (tolerance {tol:.0e})")
    return ok
