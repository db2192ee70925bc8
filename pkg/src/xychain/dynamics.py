"""Time integration of the master equation and trajectory observables.

The stepper is classic fourth-order Runge-Kutta with step-doubling error
control: each step is taken once at full size and twice at half size, the
difference scaled by 1/15 estimates the local error, and the step is
accepted when the estimate is below abs_tol + rel_tol * max|rho|.  The step
grid is forced to land exactly on every output sample time and on the
kernel-switch time, so no dense interpolation is ever needed and the Gamma
evaluator swaps atomically between steps.

Schemes:
  concatenation  finite-time kernel for t < t_switch, Markov kernel after
  secular_delta  Kronecker-delta window with the exact Gaussian spectrum
                 (validates the closed-form rate-equation solution)
  reference      literal double-commutator assembly (dense oracle, N <= 6)

The heat flux is computed from the instantaneous right-hand side as
J = -Tr(H d(rho)/dt) with the bare chain Hamiltonian (no Lamb shifts).
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .bath import BathParams
from .errors import IntegrationError, IntegrityError
from .liouvillian import kronecker_window, make_rhs, min_eigenvalue, reference_rhs
from .spectrum import DEFAULT_STATE_CAP, ChainParams, eigenbasis, number_operator_matrix

SCHEMES = ("concatenation", "secular_delta", "reference")

_MIN_STEP = 1e-12


@dataclass(frozen=True)
class IntegratorConfig:
    """Adaptive-RK4 settings and output grid.

    t_switch defaults to 3.5/sigma (capped at t_max); sample_dt defaults to
    t_max/400.
    """

    t_max: float
    rel_tol: float = 1e-8
    abs_tol: float = 1e-10
    t_switch: Optional[float] = None
    sample_dt: Optional[float] = None
    max_step: float = np.inf

    def __post_init__(self):
        if not self.t_max > 0:
            raise ValueError(f"t_max must be > 0, got {self.t_max}")
        if not self.rel_tol > 0 or not self.abs_tol > 0:
            raise ValueError("tolerances must be > 0")
        if self.t_switch is not None and not 0 <= self.t_switch <= self.t_max:
            raise ValueError(
                f"t_switch must lie in [0, t_max], got {self.t_switch} with t_max={self.t_max}"
            )
        if self.sample_dt is not None and not 0 < self.sample_dt <= self.t_max:
            raise ValueError(f"sample_dt must lie in (0, t_max], got {self.sample_dt}")
        if not self.max_step > 0:
            raise ValueError(f"max_step must be > 0, got {self.max_step}")

    def resolved_switch(self, b: BathParams) -> float:
        if self.t_switch is not None:
            return self.t_switch
        return min(3.5 / b.sigma, self.t_max)

    def resolved_sample_dt(self) -> float:
        return self.sample_dt if self.sample_dt is not None else self.t_max / 400.0

    def sample_times(self) -> np.ndarray:
        dt = self.resolved_sample_dt()
        n = int(np.floor(self.t_max / dt + 1e-9)) + 1
        return np.arange(n) * dt


@dataclass
class Trajectory:
    """Time-ordered samples of the evolved state's observables.

    magnetization has one column per site; states (optional) holds density
    matrices at the sample times; max_flux_imag records the largest imaginary
    residue of -Tr(H d(rho)/dt) seen along the run.
    """

    times: np.ndarray
    flux: np.ndarray
    magnetization: np.ndarray
    energy: np.ndarray
    trace_error: np.ndarray
    herm_error: np.ndarray
    min_eigenvalue: np.ndarray
    states: Optional[list] = None
    max_flux_imag: float = 0.0
    stats: dict = field(default_factory=dict)


def _rk4_advance(f, t, y, h, k1):
    k2 = f(t + 0.5 * h, y + (0.5 * h) * k1)
    k3 = f(t + 0.5 * h, y + (0.5 * h) * k2)
    k4 = f(t + h, y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def adaptive_rk4(f, t0, y0, sample_times, rel_tol=1e-8, abs_tol=1e-10,
                 max_step=np.inf, extra_events=(), pre_step=None,
                 on_accept=None, on_sample=None):
    """Drive y' = f(t, y) landing exactly on each requested time.

    sample_times must be non-decreasing and start at or after t0.  Returns
    (samples, stats) where samples is a list of (t, y) pairs unless an
    on_sample callback consumes them.  pre_step(t) runs before each step
    attempt (kernel switching); on_accept(t, y) after each accepted step.

    Raises IntegrationError when the step size underflows below 1e-12; the
    exception carries the last good (t, state).
    """
    sample_times = np.atleast_1d(np.asarray(sample_times, dtype=float))
    if np.any(np.diff(sample_times) < 0):
        raise ValueError("sample times must be non-decreasing")
    if sample_times.size and sample_times[0] < t0:
        raise ValueError("sample times must start at or after t0")
    events = np.unique(np.concatenate([sample_times, np.asarray(extra_events, dtype=float)]))
    is_sample = np.isin(events, sample_times)

    y = np.array(y0, copy=True)
    t = float(t0)
    samples = []

    def emit(tt, yy):
        if on_sample is not None:
            on_sample(tt, yy)
        else:
            samples.append((tt, yy.copy()))

    stats = {"accepted": 0, "rejected": 0, "rhs_calls": 0}

    def call(tt, yy):
        stats["rhs_calls"] += 1
        return f(tt, yy)

    t_end = events[-1] if events.size else t
    h = min(max_step, 0.01, max(t_end - t, _MIN_STEP))

    for target, want in zip(events, is_sample):
        if target <= t + 1e-15 * max(1.0, abs(t)):
            if want:
                emit(t, y)
            continue
        k1 = None
        while True:
            if pre_step is not None:
                pre_step(t)
            remaining = target - t
            h_try = min(h, max_step, remaining)
            hits_target = h_try >= remaining * (1 - 1e-14)
            if k1 is None:
                k1 = call(t, y)
            y_full = _rk4_advance(call, t, y, h_try, k1)
            y_half = _rk4_advance(call, t, y, 0.5 * h_try, k1)
            k1h = call(t + 0.5 * h_try, y_half)
            y_half2 = _rk4_advance(call, t + 0.5 * h_try, y_half, 0.5 * h_try, k1h)
            err = np.max(np.abs(y_full - y_half2)) / 15.0
            tol = abs_tol + rel_tol * np.max(np.abs(y))
            factor = 0.9 * (tol / max(err, 1e-300)) ** 0.2
            h = h_try * min(5.0, max(0.2, factor))
            if err <= tol:
                stats["accepted"] += 1
                t = target if hits_target else t + h_try
                y = y_half2
                k1 = None
                if on_accept is not None:
                    on_accept(t, y)
                if hits_target:
                    break
            else:
                stats["rejected"] += 1
                if h < _MIN_STEP:
                    raise IntegrationError(
                        f"step size underflow ({h:.3e}) at t={t:.6g}", t=t, state=y
                    )
        if want:
            emit(t, y)
    return samples, stats


def heat_flux(p: ChainParams, rhs_value: np.ndarray) -> float:
    """Instantaneous system-to-bath heat flux -Tr(H d(rho)/dt), real part."""
    tb = eigenbasis(p)
    return float(-(tb.energies @ np.diagonal(rhs_value)).real)


def _heat_flux_full(energies, rhs_value) -> complex:
    return -(energies @ np.diagonal(rhs_value))


def magnetization(p: ChainParams, rho: np.ndarray, n: int) -> float:
    """Local <sigma^z_n> = 2 Tr(sigma^+_n sigma^-_n rho) - 1."""
    M = number_operator_matrix(p, n)
    return float(2.0 * np.einsum("ij,ji->", M, rho).real - 1.0)


def integrate(p: ChainParams, b: BathParams, rho0: np.ndarray, cfg: IntegratorConfig,
              scheme: str = "concatenation", store_states: bool = False,
              cap: int = DEFAULT_STATE_CAP) -> Trajectory:
    """Evolve rho0 and record observables on the uniform sample grid.

    rho0 must be Hermitian with unit trace.  Raises IntegrityError if the
    trace drifts by more than 1e-6 along the way.
    """
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")
    tb = eigenbasis(p, cap)
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.shape != (tb.dim, tb.dim):
        raise ValueError(f"state shape {rho0.shape} does not match dim {tb.dim}")
    if abs(np.trace(rho0) - 1.0) > 1e-8:
        raise ValueError("initial state must have unit trace")
    if np.max(np.abs(rho0 - rho0.conj().T)) > 1e-9:
        raise ValueError("initial state must be Hermitian")

    t_sw = cfg.resolved_switch(b)
    times = cfg.sample_times()

    if scheme == "secular_delta":
        rhs_pre = rhs_post = make_rhs(p, b, "secular", kronecker_window(), cap)
        events = ()
    elif scheme == "reference":
        def rhs_pre(t, y):
            return reference_rhs(p, b, t, y, "nonmarkov")

        def rhs_post(t, y):
            return reference_rhs(p, b, t, y, "markov")
        events = (t_sw,)
    else:
        rhs_pre = make_rhs(p, b, "nonmarkov", cap=cap)
        rhs_post = make_rhs(p, b, "markov", cap=cap)
        events = (t_sw,)

    current = [rhs_pre]

    def pre_step(t):
        current[0] = rhs_pre if t < t_sw else rhs_post

    def f(t, y):
        return current[0](t, y)

    mag_ops = np.stack([number_operator_matrix(p, n) for n in range(1, p.N + 1)])

    rows = {k: [] for k in ("flux", "energy", "trace", "herm", "mineig")}
    mags = []
    states = [] if store_states else None
    flux_imag_max = [0.0]

    def on_sample(t, y):
        kernel = rhs_pre if t < t_sw else rhs_post
        rhs_value = kernel(t, y)
        jc = _heat_flux_full(tb.energies, rhs_value)
        flux_imag_max[0] = max(flux_imag_max[0], abs(jc.imag))
        rows["flux"].append(jc.real)
        rows["energy"].append(float((tb.energies @ np.diagonal(y)).real))
        rows["trace"].append(abs(np.trace(y) - 1.0))
        rows["herm"].append(float(np.max(np.abs(y - y.conj().T))))
        rows["mineig"].append(min_eigenvalue(y))
        mags.append(2.0 * np.einsum("nij,ji->n", mag_ops, y).real - 1.0)
        if states is not None:
            states.append(y.copy())

    def on_accept(t, y):
        drift = abs(np.trace(y) - 1.0)
        if drift > 1e-6:
            raise IntegrityError(
                f"trace drift {drift:.3e} exceeds 1e-6 at t={t:.6g}", t=t, state=y
            )

    _, stats = adaptive_rk4(
        f, 0.0, rho0, times,
        rel_tol=cfg.rel_tol, abs_tol=cfg.abs_tol, max_step=cfg.max_step,
        extra_events=events, pre_step=pre_step, on_accept=on_accept,
        on_sample=on_sample,
    )

    return Trajectory(
        times=times,
        flux=np.array(rows["flux"]),
        magnetization=np.array(mags),
        energy=np.array(rows["energy"]),
        trace_error=np.array(rows["trace"]),
        herm_error=np.array(rows["herm"]),
        min_eigenvalue=np.array(rows["mineig"]),
        states=states,
        max_flux_imag=flux_imag_max[0],
        stats=stats,
    )


def plateau_intervals(times, flux, min_duration: float, slope_tol: float):
    """Maximal flat stretches of a uniformly sampled flux curve.

    A point is flat when |dJ/dt| (central differences) < slope_tol * |J|;
    contiguous flat runs lasting at least min_duration are returned as
    (t_start, t_end, mean_level) tuples in time order.  The initial rise is
    excluded automatically (large |dJ/dt| there).
    """
    times = np.asarray(times, dtype=float)
    flux = np.asarray(flux, dtype=float)
    if times.size < 3:
        return []
    dt = np.diff(times)
    if np.max(np.abs(dt - dt[0])) > 1e-9 * max(dt[0], 1e-300):
        raise ValueError("plateau detection requires a uniform sample grid")
    slope = np.gradient(flux, times)
    flat = np.abs(slope) < slope_tol * np.abs(flux)
    out = []
    i = 0
    n = times.size
    while i < n:
        if not flat[i]:
            i += 1
            continue
        j = i
        while j + 1 < n and flat[j + 1]:
            j += 1
        if times[j] - times[i] >= min_duration:
            out.append((times[i], times[j], float(np.mean(flux[i:j + 1]))))
        i = j + 1
    return out


def plateau_metrics(traj: Trajectory, window: float, slope_tol: float):
    """Plateau intervals of a trajectory's heat flux (see plateau_intervals)."""
    return plateau_intervals(traj.times, traj.flux, window, slope_tol)
