"""Diagonalized representation of the open-boundary isotropic XY chain.

The chain of N spins maps to free fermions with one mode per standing wave;
mode a = 1..N has frequency omega_a = h + j*cos(pi*a/(N+1)) and couples to
site n through the sine transform sqrt(2/(N+1))*sin(pi*n*a/(N+1)).  Energy
eigenstates are labelled by occupation bit patterns k (bit a-1 of an unsigned
integer stores k_a), with E_k = -sum_a k_a*omega_a; the additive constant of
the spin Hamiltonian is fixed to zero.  All dense operators produced here are
expressed in that eigenbasis with states ordered by integer code 0..2^N-1.

Everything in this module is a pure function of immutable parameters; tables
are cached per parameter set and safe for concurrent reads.
"""

from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from .errors import CapabilityError

# Dense density-matrix engine cap: state is 2^N x 2^N.
DEFAULT_STATE_CAP = 10


@dataclass(frozen=True)
class ChainParams:
    """Chain size and couplings (natural units, hbar = k_B = 1).

    N: number of sites, j: nearest-neighbor coupling, h: external field.
    """

    N: int
    j: float
    h: float

    def __post_init__(self):
        if not isinstance(self.N, (int, np.integer)) or self.N < 1:
            raise ValueError(f"N must be a positive integer, got {self.N!r}")
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "j", float(self.j))
        object.__setattr__(self, "h", float(self.h))
        if self.j != 0.0 and self.N > 1:
            # cos is strictly monotone on (0, pi), so modes never collide for
            # j != 0; assert anyway to catch regressions in the formula.
            om = np.sort(dispersions(self))
            if np.min(np.diff(om)) <= 1e-12 * max(1.0, abs(self.j)):
                raise ValueError("degenerate dispersion; chain parameters unusable")


def dispersion(p: ChainParams, a: int) -> float:
    """Frequency of mode a (1-based): h + j*cos(pi*a/(N+1))."""
    if not 1 <= a <= p.N:
        raise ValueError(f"mode index {a} out of range 1..{p.N}")
    return p.h + p.j * np.cos(np.pi * a / (p.N + 1))


def dispersions(p: ChainParams) -> np.ndarray:
    """All mode frequencies omega_1..omega_N as an array."""
    a = np.arange(1, p.N + 1)
    return p.h + p.j * np.cos(np.pi * a / (p.N + 1))


@dataclass(frozen=True)
class OccupationConfig:
    """Fermionic occupation pattern k_1..k_N; bit a-1 of `code` stores k_a."""

    N: int
    code: int

    def __post_init__(self):
        if not 0 <= self.code < (1 << self.N):
            raise ValueError(f"code {self.code} out of range for N={self.N}")

    @classmethod
    def from_bits(cls, bits) -> "OccupationConfig":
        bits = list(bits)
        code = sum(1 << i for i, b in enumerate(bits) if b)
        return cls(N=len(bits), code=code)

    @property
    def bits(self) -> tuple:
        return tuple((self.code >> i) & 1 for i in range(self.N))

    def flip(self, a: int) -> "OccupationConfig":
        """Toggle the occupation of mode a (1-based)."""
        if not 1 <= a <= self.N:
            raise ValueError(f"mode index {a} out of range 1..{self.N}")
        return OccupationConfig(self.N, self.code ^ (1 << (a - 1)))


def _code_of(k) -> int:
    return k.code if isinstance(k, OccupationConfig) else int(k)


def flip_config(code: int, a: int) -> int:
    """Integer-code version of OccupationConfig.flip."""
    return code ^ (1 << (a - 1))


def config_energy(p: ChainParams, k) -> float:
    """Eigenstate energy E_k = -sum_a k_a*omega_a (zero for the vacuum)."""
    code = _code_of(k)
    om = dispersions(p)
    bits = (code >> np.arange(p.N)) & 1
    return float(-(bits @ om))


def sign_factors(k, a: int):
    """Occupation sign s = 2*k_a - 1 and fermionic prefix sign for mode a.

    The prefix sign is (-1)**(number of occupied modes below a); the empty
    product is +1.
    """
    code = _code_of(k)
    if a < 1:
        raise ValueError(f"mode index {a} must be >= 1")
    s = 2 * ((code >> (a - 1)) & 1) - 1
    prefix = -1 if bin(code & ((1 << (a - 1)) - 1)).count("1") % 2 else 1
    return s, prefix


@dataclass(frozen=True)
class ModeTable:
    """Mode frequencies and the orthogonal site<->mode sine transform."""

    omegas: np.ndarray          # (N,)
    site_mode_coeffs: np.ndarray  # (N, N), [n-1, a-1] = sqrt(2/(N+1))*sin(pi*n*a/(N+1))


def mode_table(p: ChainParams) -> ModeTable:
    n = np.arange(1, p.N + 1)
    coeffs = np.sqrt(2.0 / (p.N + 1)) * np.sin(np.pi * np.outer(n, n) / (p.N + 1))
    om = dispersions(p)
    om.setflags(write=False)
    coeffs.setflags(write=False)
    return ModeTable(omegas=om, site_mode_coeffs=coeffs)


class Eigenbasis:
    """Precomputed index/sign tables over the 2^N occupation eigenbasis.

    Attributes (all read-only, mode axis 0-based for mode a = index+1):
      dim            2^N
      omegas         (N,) mode frequencies
      energies       (dim,) E_k
      occupations    (N, dim) uint8, bit a-1 of each code
      flips          (N, dim) index maps k -> k with bit a-1 toggled
      prefix_signs   (N, dim) float, (-1)**popcount(bits below a)
      weights        (N,) sqrt(2/(N+1))*sin(pi*a/(N+1)), the site-1 couplings
    """

    def __init__(self, params: ChainParams, cap: int = DEFAULT_STATE_CAP):
        if params.N > cap:
            raise CapabilityError(
                f"dense eigenbasis for N={params.N} exceeds the cap of {cap} "
                f"(state is 2^N x 2^N)"
            )
        self.params = params
        N = params.N
        self.N = N
        self.dim = 1 << N
        codes = np.arange(self.dim, dtype=np.uint64)
        a_idx = np.arange(N, dtype=np.uint64)[:, None]
        self.occupations = ((codes[None, :] >> a_idx) & 1).astype(np.uint8)
        self.omegas = dispersions(params)
        self.energies = -(self.omegas @ self.occupations)
        self.flips = (codes[None, :] ^ (np.uint64(1) << a_idx)).astype(np.intp)
        below = codes[None, :] & ((np.uint64(1) << a_idx) - np.uint64(1))
        self.prefix_signs = np.where(np.bitwise_count(below) % 2, -1.0, 1.0)
        self.weights = np.sqrt(2.0 / (N + 1)) * np.sin(np.pi * np.arange(1, N + 1) / (N + 1))
        for arr in (self.occupations, self.omegas, self.energies, self.flips,
                    self.prefix_signs, self.weights):
            arr.setflags(write=False)

    @cached_property
    def energy_gaps(self) -> np.ndarray:
        """(dim, dim) matrix of E_k - E_m (row minus column)."""
        gaps = self.energies[:, None] - self.energies[None, :]
        gaps.setflags(write=False)
        return gaps

    @cached_property
    def site1_couplings(self) -> np.ndarray:
        """(N, dim) signed couplings weights[a] * prefix_signs[a, k]."""
        U = self.weights[:, None] * self.prefix_signs
        U.setflags(write=False)
        return U

    @cached_property
    def sigma_x1(self) -> np.ndarray:
        """Pauli X on site 1 in the eigenbasis (real symmetric, squares to 1)."""
        X = np.zeros((self.dim, self.dim))
        cols = np.arange(self.dim)
        for ai in range(self.N):
            X[self.flips[ai], cols] += self.weights[ai] * self.prefix_signs[ai]
        X.setflags(write=False)
        return X


@lru_cache(maxsize=None)
def eigenbasis(p: ChainParams, cap: int = DEFAULT_STATE_CAP) -> Eigenbasis:
    """Cached Eigenbasis for the given chain parameters."""
    return Eigenbasis(p, cap=cap)


@lru_cache(maxsize=None)
def number_operator_matrix(p: ChainParams, n: int) -> np.ndarray:
    """Dense matrix of the site occupation sigma^+_n sigma^-_n in the eigenbasis.

    Expands the site operator over mode pairs (a, b); the entry between k and
    the configuration with one particle moved from mode b to mode a carries
    the fermionic prefix signs.  Real symmetric; trace is 2^(N-1).
    """
    if not 1 <= n <= p.N:
        raise ValueError(f"site index {n} out of range 1..{p.N}")
    tb = eigenbasis(p)
    coeff = np.sqrt(2.0 / (p.N + 1)) * np.sin(np.pi * n * np.arange(1, p.N + 1) / (p.N + 1))
    M = np.zeros((tb.dim, tb.dim))
    codes = np.arange(tb.dim)
    for bi in range(p.N):
        occupied = tb.occupations[bi] == 1
        k1 = tb.flips[bi, occupied]
        sb = tb.prefix_signs[bi, occupied]
        src = codes[occupied]
        for ai in range(p.N):
            vacant = tb.occupations[ai, k1] == 0
            k2 = tb.flips[ai, k1[vacant]]
            sa = tb.prefix_signs[ai, k1[vacant]]
            M[k2, src[vacant]] += coeff[ai] * coeff[bi] * sa * sb[vacant]
    M.setflags(write=False)
    return M


def sigma_z_matrix(p: ChainParams, n: int) -> np.ndarray:
    """Pauli Z on site n: 2*sigma^+_n sigma^-_n - 1 in the eigenbasis."""
    return 2.0 * number_operator_matrix(p, n) - np.eye(1 << p.N)
