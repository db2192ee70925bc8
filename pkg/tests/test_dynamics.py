import numpy as np
import pytest

from xychain import (
    BathParams,
    IntegratorConfig,
    SecularSolution,
    adaptive_rk4,
    eigenbasis,
    heat_flux,
    integrate,
    magnetization,
    maximally_mixed,
    occupations,
    plateau_intervals,
    plateau_metrics,
    secular_flux,
    sigma_z_matrix,
    thermal_product_state,
)
from xychain.errors import IntegrationError

from conftest import fig1_chain


class TestIntegratorConfig:
    def test_defaults_resolve(self, bath):
        cfg = IntegratorConfig(t_max=40.0)
        assert cfg.resolved_switch(bath) == pytest.approx(1.4)
        assert cfg.resolved_sample_dt() == pytest.approx(0.1)
        assert cfg.sample_times()[0] == 0.0

    def test_switch_capped_by_t_max(self, bath):
        cfg = IntegratorConfig(t_max=1.0)
        assert cfg.resolved_switch(bath) == 1.0

    def test_validation(self):
        with pytest.raises(ValueError):
            IntegratorConfig(t_max=0.0)
        with pytest.raises(ValueError):
            IntegratorConfig(t_max=10.0, t_switch=11.0)
        with pytest.raises(ValueError):
            IntegratorConfig(t_max=10.0, rel_tol=0.0)
        with pytest.raises(ValueError):
            IntegratorConfig(t_max=10.0, sample_dt=-1.0)


class TestStepper:
    def test_exponential_decay(self):
        # scalar harness self-test: dx/dt = -x over [0, 10]
        samples, stats = adaptive_rk4(
            lambda t, y: -y, 0.0, np.array([1.0]), np.linspace(0, 10, 101)
        )
        err = max(abs(y[0] - np.exp(-t)) for t, y in samples)
        assert err < 1e-6
        assert stats["accepted"] >= 100

    def test_tightening_tolerance_reduces_error(self):
        def run(rel):
            samples, _ = adaptive_rk4(
                lambda t, y: -y, 0.0, np.array([1.0]), np.linspace(0, 10, 11),
                rel_tol=rel, abs_tol=rel * 1e-2,
            )
            return max(abs(y[0] - np.exp(-t)) for t, y in samples)

        assert run(1e-10) < run(1e-6) / 10

    def test_oscillator_phase(self):
        # y'' = -y as a 2-vector; checks the step-doubling accept logic on
        # non-decaying dynamics
        f = lambda t, y: np.array([y[1], -y[0]])
        samples, _ = adaptive_rk4(f, 0.0, np.array([1.0, 0.0]), [2 * np.pi])
        t, y = samples[-1]
        assert abs(y[0] - 1.0) < 1e-6
        assert abs(y[1]) < 1e-6

    def test_step_underflow_raises(self):
        f = lambda t, y: np.full_like(y, np.nan)
        with pytest.raises(IntegrationError) as exc:
            adaptive_rk4(f, 0.0, np.array([1.0]), [1.0])
        assert exc.value.t == 0.0

    def test_unsorted_samples_rejected(self):
        with pytest.raises(ValueError):
            adaptive_rk4(lambda t, y: -y, 0.0, np.array([1.0]), [2.0, 1.0])


class TestClosedSystem:
    def test_diagonal_state_is_stationary(self):
        # lambda = 0 and diagonal rho commuting with H: nothing moves
        p = fig1_chain(3)
        b0 = BathParams(0.0, 0.8, 2.5)
        rho0 = thermal_product_state(p, 0.4)
        cfg = IntegratorConfig(t_max=5.0, sample_dt=0.5)
        traj = integrate(p, b0, rho0, cfg)
        assert np.max(np.abs(traj.flux)) == 0.0
        assert np.max(np.abs(traj.energy - traj.energy[0])) < 1e-12
        assert np.max(np.abs(traj.magnetization - traj.magnetization[0])) < 1e-12

    def test_unitary_part_conserves_energy(self, bath):
        p = fig1_chain(3)
        tb = eigenbasis(p)
        rng = np.random.default_rng(0)
        from conftest import random_hermitian

        rho = random_hermitian(rng, 8)
        comm = -1j * (tb.energy_gaps * rho)
        assert abs(heat_flux(p, comm)) < 1e-12


class TestSecularDeltaScheme:
    @pytest.mark.parametrize("N", [2, 3])
    def test_matches_closed_form(self, N, bath):
        p = fig1_chain(N)
        cfg = IntegratorConfig(t_max=25.0, sample_dt=0.25, rel_tol=1e-9, abs_tol=1e-12)
        traj = integrate(p, bath, maximally_mixed(N), cfg,
                         scheme="secular_delta", store_states=True)
        tb = eigenbasis(p)
        occ_traj = np.array([
            [np.real(np.diagonal(s)) @ tb.occupations[a] for a in range(N)]
            for s in traj.states
        ])
        sol = SecularSolution.solve(p, bath, 0.5)
        occ_cf = occupations(traj.times, sol)
        assert np.max(np.abs(occ_traj - occ_cf)) < 1e-7
        J_cf = secular_flux(traj.times, p, bath, 0.5)
        assert np.max(np.abs(traj.flux - J_cf)) < 1e-7


@pytest.fixture(scope="module")
def short_run():
    from conftest import FIG1_BATH

    p = fig1_chain(3)
    cfg = IntegratorConfig(t_max=3.5, sample_dt=0.002)
    return integrate(p, FIG1_BATH, maximally_mixed(3), cfg)


class TestConcatenationScheme:
    def test_flux_starts_at_zero(self, short_run):
        assert abs(short_run.flux[0]) < 1e-12

    def test_flux_matches_energy_derivative(self, short_run):
        # central differences of <H> on the fine grid, away from the kernel
        # switch at t = 1.4 where dJ/dt is discontinuous
        tr = short_run
        dt = tr.times[1] - tr.times[0]
        fd = -(tr.energy[2:] - tr.energy[:-2]) / (2 * dt)
        J = tr.flux[1:-1]
        t = tr.times[1:-1]
        mask = (np.abs(J) > 0.1 * np.abs(tr.flux).max()) & (np.abs(t - 1.4) > 3 * dt)
        rel = np.abs(fd - J) / np.abs(J)
        assert rel[mask].max() < 1e-4

    def test_conservation_along_trajectory(self, short_run):
        assert short_run.trace_error.max() < 1e-8
        assert short_run.herm_error.max() < 1e-9
        assert short_run.max_flux_imag < 1e-10

    def test_initial_state_validation(self, bath):
        p = fig1_chain(2)
        cfg = IntegratorConfig(t_max=1.0)
        bad_trace = np.eye(4, dtype=complex)
        with pytest.raises(ValueError):
            integrate(p, bath, bad_trace, cfg)
        non_herm = maximally_mixed(2)
        non_herm[0, 1] = 0.1
        with pytest.raises(ValueError):
            integrate(p, bath, non_herm, cfg)
        with pytest.raises(ValueError):
            integrate(p, bath, maximally_mixed(2), cfg, scheme="nope")

    def test_tolerance_halving_robustness(self, bath):
        p = fig1_chain(3)
        rho0 = maximally_mixed(3)
        runs = []
        for rel in (1e-8, 5e-9):
            cfg = IntegratorConfig(t_max=10.0, sample_dt=0.1, rel_tol=rel)
            runs.append(integrate(p, bath, rho0, cfg).flux)
        assert np.max(np.abs(runs[0] - runs[1])) < 10 * 1e-8


class TestSchemeCrossValidation:
    def test_concatenation_agrees_with_reference(self, bath):
        p = fig1_chain(3)
        rho0 = maximally_mixed(3)
        cfg = IntegratorConfig(t_max=20.0, sample_dt=0.5)
        trc = integrate(p, bath, rho0, cfg, scheme="concatenation", store_states=True)
        trr = integrate(p, bath, rho0, cfg, scheme="reference", store_states=True)
        worst = max(
            float(np.max(np.abs(a - c))) for a, c in zip(trc.states, trr.states)
        )
        assert worst < 1e-6


class TestMagnetization:
    def test_maximally_mixed_is_unpolarized(self):
        p = fig1_chain(4)
        rho = maximally_mixed(4)
        for n in range(1, 5):
            assert abs(magnetization(p, rho, n)) < 1e-14

    def test_total_polarization_bounded(self, bath):
        p = fig1_chain(3)
        rho = thermal_product_state(p, 5.0)
        total = sum(magnetization(p, rho, n) for n in range(1, 4))
        assert abs(total) <= 3.0 + 1e-12

    def test_thermal_state_matches_diagonal_expectation(self):
        p = fig1_chain(4)
        beta = 0.9
        rho = thermal_product_state(p, beta)
        probs = np.diagonal(rho).real
        for n in range(1, 5):
            direct = float(np.diagonal(sigma_z_matrix(p, n)).real @ probs)
            assert magnetization(p, rho, n) == pytest.approx(direct, abs=1e-12)


class TestPlateaus:
    def test_constant_flux_single_plateau(self):
        t = np.linspace(0, 10, 101)
        J = np.full_like(t, 0.5)
        out = plateau_intervals(t, J, 2.0, 0.02)
        assert len(out) == 1
        assert out[0][0] == 0.0 and out[0][1] == 10.0
        assert out[0][2] == pytest.approx(0.5)

    def test_secular_closed_form_has_no_plateau(self, bath):
        # pure multi-exponential decay never flattens below 2% per unit J
        p = fig1_chain(3)
        t = np.arange(0, 60.0001, 0.15)
        J = secular_flux(t, p, bath, 0.5)
        assert plateau_intervals(t, J, 2.0, 0.02) == []

    def test_too_short_trajectory(self):
        assert plateau_intervals([0.0, 1.0], [1.0, 1.0], 0.5, 0.02) == []

    def test_nonuniform_grid_rejected(self):
        with pytest.raises(ValueError):
            plateau_intervals([0.0, 1.0, 3.0], [1.0, 1.0, 1.0], 0.5, 0.02)

    def test_concatenation_exhibits_plateau(self, bath):
        p = fig1_chain(3)
        cfg = IntegratorConfig(t_max=12.0, sample_dt=0.15)
        traj = integrate(p, bath, maximally_mixed(3), cfg)
        plats = plateau_metrics(traj, 1.0, 0.02)
        assert plats, "expected at least one flux plateau after the initial rise"
        # first plateau sits after the rise and at a substantial flux level
        t0, t1, level = plats[0]
        assert 0.5 < t0 < 3.0
        assert level > 0.5 * np.abs(traj.flux).max()


class TestWavefronts:
    def test_quench_front_speed_matches_spin_flip_response(self, bath):
        # the magnetization disturbance excited by cooling at site 1 travels
        # at the same speed as the single-flip response wavefront
        p = fig1_chain(5)

        def arrival(signal, times):
            s = np.abs(signal)
            return times[np.argmax(s >= 0.25 * s.max())]

        cfg = IntegratorConfig(t_max=6.0, sample_dt=0.02)
        tr = integrate(p, bath, maximally_mixed(5), cfg)
        arr_traj = [
            arrival(tr.magnetization[:, n - 1] - tr.magnetization[0, n - 1], tr.times)
            for n in range(2, 6)
        ]

        from xychain import thermal_response

        ts = np.linspace(0, 6, 301)
        arr_resp = [arrival(thermal_response(p, 0.8, n, ts), ts) for n in range(2, 6)]

        ns = np.arange(2, 6)
        slope_traj = np.polyfit(ns, arr_traj, 1)[0]
        slope_resp = np.polyfit(ns, arr_resp, 1)[0]
        assert 0.8 <= slope_resp / slope_traj <= 1.25
