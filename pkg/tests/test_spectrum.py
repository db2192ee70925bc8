import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from xychain import (
    ChainParams,
    OccupationConfig,
    config_energy,
    dispersion,
    dispersions,
    eigenbasis,
    flip_config,
    mode_table,
    number_operator_matrix,
    sign_factors,
)
from xychain.errors import CapabilityError

from conftest import fig1_chain


class TestDispersion:
    def test_center_mode_equals_field(self):
        assert dispersion(fig1_chain(3), 2) == pytest.approx(1.0, abs=1e-15)

    def test_band_edge(self):
        # h + j*cos(pi/4) for N=3
        assert dispersion(fig1_chain(3), 1) == pytest.approx(1.0 + np.sqrt(2.0), rel=1e-14)

    @pytest.mark.parametrize("N", [1, 2, 5, 12])
    def test_antisymmetry_about_field(self, N):
        p = ChainParams(N, j=1.7, h=0.3)
        om = dispersions(p)
        assert np.max(np.abs(om + om[::-1] - 2 * p.h)) < 1e-12

    def test_out_of_range_index(self):
        with pytest.raises(ValueError):
            dispersion(fig1_chain(3), 0)
        with pytest.raises(ValueError):
            dispersion(fig1_chain(3), 4)

    def test_bad_chain_params(self):
        with pytest.raises(ValueError):
            ChainParams(0, 1.0, 1.0)


class TestModeTable:
    @pytest.mark.parametrize("N", [1, 2, 3, 8, 17, 32])
    def test_sine_transform_orthogonal(self, N):
        mt = mode_table(ChainParams(N, 1.0, 0.5))
        C = mt.site_mode_coeffs
        assert np.max(np.abs(C.T @ C - np.eye(N))) < 1e-12


class TestOccupationConfig:
    def test_flip_involution(self):
        k = OccupationConfig.from_bits([1, 0, 1, 1])
        for a in range(1, 5):
            assert k.flip(a).flip(a) == k

    def test_vacuum_energy_zero(self):
        p = fig1_chain(4)
        assert config_energy(p, 0) == 0.0

    def test_single_occupation(self):
        p = fig1_chain(3)
        for a in range(1, 4):
            k = OccupationConfig(3, 1 << (a - 1))
            assert config_energy(p, k) == pytest.approx(-dispersion(p, a), rel=1e-14)

    def test_symmetric_pair(self):
        # modes 1 and 3 of an N=3 chain add to 2h
        assert config_energy(fig1_chain(3), 0b101) == pytest.approx(-2.0, abs=1e-14)

    def test_energy_additivity(self):
        p = fig1_chain(5)
        total = -np.sum(dispersions(p))
        for code in range(32):
            comp = code ^ 0b11111
            assert config_energy(p, code) + config_energy(p, comp) == pytest.approx(
                total, abs=1e-12
            )

    @given(st.integers(0, 2**10 - 1), st.integers(1, 10))
    def test_flip_involution_codes(self, code, a):
        assert flip_config(flip_config(code, a), a) == code


class TestSignFactors:
    def test_vacuum(self):
        for a in range(1, 5):
            assert sign_factors(0, a) == (-1, 1)

    def test_one_below(self):
        assert sign_factors(OccupationConfig.from_bits([1, 0]), 2) == (-1, -1)

    def test_two_below(self):
        assert sign_factors(OccupationConfig.from_bits([1, 1, 0]), 3) == (-1, 1)

    @given(st.integers(0, 2**12 - 1), st.integers(1, 12), st.integers(12, 14))
    def test_prefix_ignores_high_bits(self, code, a, extra):
        # prefix sign depends only on bits strictly below a
        _, pref = sign_factors(code, a)
        _, pref2 = sign_factors(code | (1 << extra), a)
        assert pref == pref2

    @given(st.integers(0, 2**8 - 1), st.integers(1, 8))
    def test_occupation_sign(self, code, a):
        s, _ = sign_factors(code, a)
        assert s == (1 if (code >> (a - 1)) & 1 else -1)


class TestNumberOperator:
    def test_single_site(self):
        M = number_operator_matrix(ChainParams(1, 0.0, 1.0), 1)
        assert np.allclose(M, np.diag([0.0, 1.0]))

    @pytest.mark.parametrize("N,n", [(2, 1), (3, 2), (4, 3), (5, 1)])
    def test_trace(self, N, n):
        M = number_operator_matrix(fig1_chain(N), n)
        assert np.trace(M) == pytest.approx(2 ** (N - 1), rel=1e-12)

    def test_center_site_center_mode_vanishes(self):
        # sin(pi*2*2/4) = 0, so the singly-occupied center mode has no weight on site 2
        M = number_operator_matrix(fig1_chain(3), 2)
        assert abs(M[0b010, 0b010]) < 1e-14

    @pytest.mark.parametrize("N", [2, 3, 5])
    def test_hermitian(self, N):
        p = fig1_chain(N)
        for n in range(1, N + 1):
            M = number_operator_matrix(p, n)
            assert np.max(np.abs(M - M.T)) < 1e-14

    def test_site_sum_counts_particles(self):
        # sum_n sigma^+_n sigma^-_n = total particle number (diagonal)
        p = fig1_chain(4)
        tot = sum(number_operator_matrix(p, n) for n in range(1, 5))
        tb = eigenbasis(p)
        counts = tb.occupations.sum(axis=0)
        assert np.max(np.abs(tot - np.diag(counts.astype(float)))) < 1e-12

    def test_site_out_of_range(self):
        with pytest.raises(ValueError):
            number_operator_matrix(fig1_chain(3), 4)


class TestEigenbasis:
    def test_cap(self):
        with pytest.raises(CapabilityError):
            eigenbasis(ChainParams(11, 1.0, 0.0))

    def test_sigma_x1_squares_to_identity(self):
        tb = eigenbasis(fig1_chain(4))
        X = tb.sigma_x1
        assert np.max(np.abs(X @ X - np.eye(tb.dim))) < 1e-12

    def test_energies_match_config_energy(self):
        p = fig1_chain(4)
        tb = eigenbasis(p)
        for code in range(tb.dim):
            assert tb.energies[code] == pytest.approx(config_energy(p, code), abs=1e-13)

    def test_prefix_sign_table(self):
        tb = eigenbasis(fig1_chain(5))
        for code in (0, 7, 21, 30):
            for a in range(1, 6):
                assert tb.prefix_signs[a - 1, code] == sign_factors(code, a)[1]
