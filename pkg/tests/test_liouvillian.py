import numpy as np
import pytest

from xychain import (
    ChainParams,
    dispersions,
    eigenbasis,
    generator_apply,
    kronecker_window,
    lamb_shift,
    markov_spectral,
    master_rhs,
    maximally_mixed,
    rate_matrix,
    reference_rhs,
    spectral_density,
    thermal_product_state,
)
from xychain.errors import CapabilityError
from xychain.liouvillian import NO_WINDOW, WindowMode, _apply_generator, _site_gamma

from conftest import FIG1_BATH, fig1_chain, random_bath, random_chain, random_hermitian


class TestStates:
    def test_maximally_mixed(self):
        rho = maximally_mixed(3)
        assert np.trace(rho) == pytest.approx(1.0, abs=1e-15)
        assert np.allclose(rho, np.eye(8) / 8)

    def test_thermal_product_reduces_to_mixed_at_beta_zero(self):
        p = fig1_chain(4)
        assert np.allclose(thermal_product_state(p, 0.0), maximally_mixed(4))

    def test_thermal_product_occupations(self):
        p = fig1_chain(3)
        beta = 0.8
        tb = eigenbasis(p)
        probs = np.diagonal(thermal_product_state(p, beta)).real
        occ = tb.occupations @ probs
        expected = 1.0 / (1.0 + np.exp(-beta * dispersions(p)))
        assert np.max(np.abs(occ - expected)) < 1e-12

    def test_thermal_product_extreme_beta(self):
        # large beta must not overflow; ground state is all modes with omega>0 filled
        p = fig1_chain(3)
        probs = np.diagonal(thermal_product_state(p, 500.0)).real
        tb = eigenbasis(p)
        assert probs[np.argmin(tb.energies)] == pytest.approx(1.0, abs=1e-12)


class TestGeneratorApply:
    def test_linearity_zero(self, bath):
        p = fig1_chain(3)
        gamma = lambda w: markov_spectral(bath, w)
        out = generator_apply(p, gamma, np.zeros((8, 8), dtype=complex))
        assert np.max(np.abs(out)) == 0.0

    @pytest.mark.parametrize("N", [2, 3, 4])
    def test_hermiticity(self, N, bath):
        rng = np.random.default_rng(11 + N)
        p = fig1_chain(N)
        gamma = lambda w: complex(incomplete(bath, w))
        rho = random_hermitian(rng, 2**N)
        G = generator_apply(p, gamma, rho)
        assert np.max(np.abs(G - G.conj().T)) < 1e-12

    def test_fast_and_windowed_paths_agree(self, bath):
        # the loop path with an always-true window must equal the separable path
        rng = np.random.default_rng(5)
        p = fig1_chain(3)
        tb = eigenbasis(p)
        gp = markov_spectral(bath, tb.omegas)
        gm = markov_spectral(bath, -tb.omegas)
        GA = _site_gamma(tb, gp, gm)
        rho = random_hermitian(rng, tb.dim)
        fast = _apply_generator(tb, GA, rho, None)
        loose = _apply_generator(
            tb, GA, rho, np.ones((p.N, 2, p.N, 2), dtype=bool)
        )
        assert np.max(np.abs(fast - loose)) < 1e-13

    def test_generator_from_reference_decomposition(self, bath):
        # G must equal the reference assembly with its commutator and
        # anticommutator parts stripped off
        rng = np.random.default_rng(2)
        p = fig1_chain(2)
        t = 0.9
        rho = random_hermitian(rng, 4)
        gamma = lambda w: incomplete(bath, w, t)
        G = generator_apply(p, gamma, rho)
        Hp = lamb_shift(p, gamma, +1)
        Hm = lamb_shift(p, gamma, -1)
        tb = eigenbasis(p)
        H = np.diag(tb.energies)
        ref = reference_rhs(p, bath, t, rho)
        Heff = H + Hm
        G_extracted = (
            ref
            + 1j * (Heff @ rho - rho @ Heff)
            + (Hp @ rho + rho @ Hp)
        )
        assert np.max(np.abs(G - G_extracted)) < 1e-10


def incomplete(bath, w, t=1.0):
    from xychain import incomplete_spectral

    return incomplete_spectral(bath, w, t)


class TestLambShift:
    def test_zero_gamma(self):
        p = fig1_chain(3)
        for sign in (+1, -1):
            H = lamb_shift(p, lambda w: 0.0, sign)
            assert np.max(np.abs(H)) == 0.0

    @pytest.mark.parametrize("N", [2, 3, 4])
    @pytest.mark.parametrize("sign", [+1, -1])
    def test_hermitian(self, N, sign):
        rng = np.random.default_rng(100 * N + sign)
        b = random_bath(rng)
        p = random_chain(rng, N)
        gamma = lambda w: incomplete(b, w, 0.8)
        H = lamb_shift(p, gamma, sign)
        assert np.max(np.abs(H - H.conj().T)) < 1e-12

    def test_bad_sign(self):
        with pytest.raises(ValueError):
            lamb_shift(fig1_chain(2), lambda w: 0.0, 2)


class TestMasterRhs:
    def test_pure_commutator_at_time_zero(self, bath):
        # Gamma_0 = 0: the dissipator vanishes, energy is conserved
        rng = np.random.default_rng(8)
        p = fig1_chain(3)
        tb = eigenbasis(p)
        rho = random_hermitian(rng, 8)
        rhs = master_rhs(p, bath, 0.0, rho, "nonmarkov")
        expected = -1j * (tb.energy_gaps * rho)
        assert np.max(np.abs(rhs - expected)) < 1e-14
        assert abs(np.sum(tb.energies * np.diagonal(rhs)).real) < 1e-12

    @pytest.mark.parametrize("mode", ["nonmarkov", "markov", "secular"])
    @pytest.mark.parametrize("window", [NO_WINDOW, kronecker_window()])
    def test_trace_and_hermiticity_preserved(self, mode, window, bath):
        rng = np.random.default_rng(13)
        p = fig1_chain(3)
        for t in (0.2, 2.0):
            rho = random_hermitian(rng, 8)
            out = master_rhs(p, bath, t, rho, mode, window)
            assert abs(np.trace(out)) < 1e-12
            assert np.max(np.abs(out - out.conj().T)) < 1e-12

    def test_linearity(self, bath):
        rng = np.random.default_rng(21)
        p = fig1_chain(2)
        r1 = random_hermitian(rng, 4)
        r2 = random_hermitian(rng, 4)
        a_, b_ = 0.7, -1.3
        lhs = master_rhs(p, bath, 1.1, a_ * r1 + b_ * r2)
        rhs = a_ * master_rhs(p, bath, 1.1, r1) + b_ * master_rhs(p, bath, 1.1, r2)
        assert np.max(np.abs(lhs - rhs)) < 1e-12

    @pytest.mark.parametrize("N", [2, 3])
    @pytest.mark.parametrize("mode", ["nonmarkov", "markov"])
    def test_equivalence_with_reference(self, N, mode, bath):
        rng = np.random.default_rng(31 + N)
        p = fig1_chain(N)
        for t in (0.1, 1.0, 5.0):
            rho = random_hermitian(rng, 2**N)
            d = np.max(np.abs(
                master_rhs(p, bath, t, rho, mode) - reference_rhs(p, bath, t, rho, mode)
            ))
            assert d < 1e-10

    def test_window_reproduces_rate_equations(self, bath):
        # diagonal sub-block of the windowed secular RHS == classical rate matrix
        rng = np.random.default_rng(4)
        for N in (2, 3, 4):
            p = fig1_chain(N)
            M = rate_matrix(p, bath)
            probs = rng.random(2**N)
            probs /= probs.sum()
            rho = np.diag(probs).astype(complex)
            rhs = master_rhs(p, bath, 0.0, rho, "secular", kronecker_window())
            offdiag = rhs - np.diag(np.diagonal(rhs))
            assert np.max(np.abs(offdiag)) < 1e-14
            assert np.max(np.abs(np.diagonal(rhs).real - M @ probs)) < 1e-10

    def test_windowed_generator_masks_offresonant_pairs(self, bath):
        # off-diagonal input with no frequency match must not feed the diagonal
        rng = np.random.default_rng(77)
        p = fig1_chain(3)
        rho = random_hermitian(rng, 8)
        out = master_rhs(p, bath, 0.0, rho, "secular", kronecker_window())
        diag_in = np.diag(np.diagonal(rho))
        out_diag_only = master_rhs(p, bath, 0.0, diag_in, "secular", kronecker_window())
        assert np.max(np.abs(np.diagonal(out) - np.diagonal(out_diag_only))) < 1e-12

    def test_window_warns_at_zero_field(self, bath):
        p = ChainParams(3, 2.0, 0.0)
        rho = maximally_mixed(3)
        with pytest.warns(UserWarning):
            master_rhs(p, bath, 0.0, rho, "markov", WindowMode("kronecker_delta", 1e-9))

    def test_shape_mismatch(self, bath):
        with pytest.raises(ValueError):
            master_rhs(fig1_chain(3), bath, 0.0, np.eye(4, dtype=complex))


class TestReferenceRhs:
    def test_closed_system_limit(self):
        rng = np.random.default_rng(6)
        p = fig1_chain(3)
        from xychain import BathParams

        b0 = BathParams(0.0, 0.8, 2.5)
        tb = eigenbasis(p)
        rho = random_hermitian(rng, 8)
        out = reference_rhs(p, b0, 1.0, rho)
        assert np.max(np.abs(out + 1j * (tb.energy_gaps * rho))) < 1e-15

    def test_capability_cap(self, bath):
        p = fig1_chain(7)
        with pytest.raises(CapabilityError):
            reference_rhs(p, bath, 0.1, maximally_mixed(7))


class TestRandomizedEquivalence:
    def test_random_parameters(self):
        # generator form vs literal assembly over random chains and baths
        rng = np.random.default_rng(123)
        worst = 0.0
        for _ in range(15):
            N = int(rng.integers(2, 5))
            p = random_chain(rng, N)
            b = random_bath(rng)
            rho = random_hermitian(rng, 2**N)
            t = float(rng.uniform(0.05, 4.0))
            d = np.max(np.abs(master_rhs(p, b, t, rho) - reference_rhs(p, b, t, rho)))
            worst = max(worst, d)
        assert worst < 1e-10
