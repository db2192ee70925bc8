import numpy as np
import pytest

from xychain import BathParams, ChainParams

# Reference parameter set used throughout (heat-flux figure of the study):
# h=1, j=2, sigma=2.5, beta_bath=0.8, lambda=0.4, maximally mixed start.
FIG1_BATH = BathParams(lam=0.4, beta_bath=0.8, sigma=2.5, n_trunc=2)


def fig1_chain(N: int) -> ChainParams:
    return ChainParams(N=N, j=2.0, h=1.0)


@pytest.fixture
def bath() -> BathParams:
    return FIG1_BATH


def random_hermitian(rng: np.random.Generator, dim: int, unit_trace: bool = True) -> np.ndarray:
    A = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    H = 0.5 * (A + A.conj().T)
    if unit_trace:
        H = H + np.eye(dim) * (2.0 * dim - np.trace(H).real) / dim
        H = H / np.trace(H).real
    return H


def random_bath(rng: np.random.Generator) -> BathParams:
    return BathParams(
        lam=float(rng.uniform(0.1, 0.8)),
        beta_bath=float(rng.uniform(0.1, 1.5)),
        sigma=float(rng.uniform(0.8, 4.0)),
        n_trunc=int(rng.integers(1, 5)),
    )


def random_chain(rng: np.random.Generator, N: int) -> ChainParams:
    return ChainParams(N=N, j=float(rng.uniform(0.5, 3.0)), h=float(rng.uniform(-1.5, 1.5)))
