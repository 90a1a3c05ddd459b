"""Model parameters and closed-form quasiparticle data.

Covers the transverse-field Ising chain, its XY generalisation and the
normal phase of the Dicke model in the N -> infinity limit. Units: hbar = 1.
"""

from __future__ import annotations

import math
from collections.abc import Iterator, Sequence
from dataclasses import dataclass

import numpy as np

ISING_CRITICAL_POINT = 1.0


@dataclass(frozen=True)
class QuenchSpec:
    """A sudden quench lambda -> lambda' near the critical value lambda_c.

    The offsets from the critical point are the stored quantities; epsilon is
    defined as ``delta - delta_lambda`` so that identity holds bit for bit.
    """

    lambda_c: float
    delta_lambda: float
    delta: float

    @classmethod
    def from_lambdas(cls, lambda_, lambda_prime, lambda_c) -> "QuenchSpec":
        return cls(float(lambda_c), float(lambda_) - lambda_c, float(lambda_prime) - lambda_c)

    @classmethod
    def from_offsets(cls, epsilon, delta, lambda_c) -> "QuenchSpec":
        """Quench specified by epsilon = lambda' - lambda and delta = lambda' - lambda_c."""
        return cls(float(lambda_c), float(delta) - float(epsilon), float(delta))

    @property
    def epsilon(self) -> float:
        return self.delta - self.delta_lambda

    @property
    def lambda_(self) -> float:
        return self.lambda_c + self.delta_lambda

    @property
    def lambda_prime(self) -> float:
        return self.lambda_c + self.delta

    @property
    def eta(self) -> float:
        if self.delta_lambda == 0.0:
            return math.inf if self.epsilon != 0.0 else math.nan
        return self.epsilon / self.delta_lambda

    def as_dict(self) -> dict:
        return {
            "lambda": self.lambda_,
            "lambda_prime": self.lambda_prime,
            "lambda_c": self.lambda_c,
            "epsilon": self.epsilon,
            "delta": self.delta,
            "delta_lambda": self.delta_lambda,
            "eta": self.eta,
        }


def _check_chain_length(n_sites) -> int:
    n = int(n_sites)
    if n != n_sites or n < 3 or n % 2 == 0:
        raise ValueError(f"chain length must be an odd integer >= 3, got {n_sites!r}")
    return n


@dataclass(frozen=True)
class IsingParams:
    n_sites: int
    lambda_: float

    def __post_init__(self):
        _check_chain_length(self.n_sites)


@dataclass(frozen=True)
class XYParams:
    n_sites: int
    lambda_: float
    gamma: float

    def __post_init__(self):
        _check_chain_length(self.n_sites)


@dataclass(frozen=True)
class DickeParams:
    omega: float
    omega0: float
    lambda_: float

    def __post_init__(self):
        if self.omega <= 0 or self.omega0 <= 0:
            raise ValueError("omega and omega0 must be positive")

    @property
    def lambda_c(self) -> float:
        return 0.5 * math.sqrt(self.omega * self.omega0)


@dataclass(frozen=True)
class ModeTable:
    ka_values: np.ndarray
    e_k: np.ndarray
    theta: np.ndarray


@dataclass(frozen=True)
class DickeSpectrum:
    e1: float
    e2: float
    gap_coefficient: float


# -- fermionic chains -------------------------------------------------------

def ising_mode_energy(ka, lambda_):
    """Quasiparticle energy 2 sqrt(1 + lambda^2 - 2 lambda cos ka)."""
    ka = np.asarray(ka, dtype=float)
    return 2.0 * np.hypot(lambda_ - np.cos(ka), np.sin(ka))


def ising_bogoliubov_angle(ka, lambda_):
    """Bogoliubov angle atan2(-sin ka, cos ka - lambda), in (-pi, pi]."""
    ka = np.asarray(ka, dtype=float)
    # adding +0.0 turns a -0.0 numerator into +0.0 so the branch stays at +pi
    return np.arctan2(-np.sin(ka) + 0.0, np.cos(ka) - lambda_)


def xy_mode_energy(ka, lambda_, gamma):
    """XY-chain energy 2 sqrt((lambda - cos ka)^2 + gamma^2 sin^2 ka).

    Not printed in the source model description; checked against the
    pair-subspace oracle in :mod:`qpt_echo.smalled`.
    """
    ka = np.asarray(ka, dtype=float)
    return 2.0 * np.hypot(lambda_ - np.cos(ka), gamma * np.sin(ka))


def xy_bogoliubov_angle(ka, lambda_, gamma):
    ka = np.asarray(ka, dtype=float)
    return np.arctan2(-(gamma * np.sin(ka)) + 0.0, np.cos(ka) - lambda_)


def grid_ka(m, n_sites):
    """ka = 2 pi m / N for integer mode labels ``m`` (shared by every grid user)."""
    return (2.0 * np.pi) * np.asarray(m, dtype=float) / n_sites


class ModeGrid(Sequence):
    """Lazy grid ka_m = 2 pi m / N, m = 1..M, N = 2M + 1.

    Elements are computed on demand so N = 2e8 costs no memory until
    :meth:`chunks` or ``np.asarray`` asks for values.
    """

    def __init__(self, n_sites: int):
        self.n_sites = _check_chain_length(n_sites)
        self.n_modes = (self.n_sites - 1) // 2

    def __len__(self) -> int:
        return self.n_modes

    def __getitem__(self, item):
        if isinstance(item, slice):
            return grid_ka(np.arange(*item.indices(self.n_modes)) + 1, self.n_sites)
        i = int(item)
        if i < 0:
            i += self.n_modes
        if not 0 <= i < self.n_modes:
            raise IndexError(item)
        return float(grid_ka(i + 1, self.n_sites))

    def __array__(self, dtype=None, copy=None):
        out = grid_ka(np.arange(1, self.n_modes + 1), self.n_sites)
        return out if dtype is None else out.astype(dtype)

    def chunk_bounds(self, chunk_size: int) -> list[tuple[int, int]]:
        """Half-open mode-label ranges [lo, hi) covering m = 1..M."""
        return [(lo, min(lo + chunk_size, self.n_modes + 1))
                for lo in range(1, self.n_modes + 1, chunk_size)]

    def chunks(self, chunk_size: int) -> Iterator[np.ndarray]:
        for lo, hi in self.chunk_bounds(chunk_size):
            yield grid_ka(np.arange(lo, hi), self.n_sites)

    def __repr__(self) -> str:
        return f"ModeGrid(n_sites={self.n_sites})"


def mode_grid(n_sites: int) -> ModeGrid:
    """Positive momenta of a periodic chain of odd length N."""
    return ModeGrid(n_sites)


def mode_table(params: IsingParams | XYParams) -> ModeTable:
    """Materialised (ka, e_k, theta) for a chain; only sensible for modest N."""
    ka = np.asarray(mode_grid(params.n_sites))
    gamma = getattr(params, "gamma", 1.0)
    return ModeTable(ka, xy_mode_energy(ka, params.lambda_, gamma),
                     xy_bogoliubov_angle(ka, params.lambda_, gamma))


def degenerate_mode_count(n_sites, lambda_, energy_threshold, chunk_size=1 << 16) -> int:
    """Number of grid modes with e_k(lambda) below ``energy_threshold``."""
    if energy_threshold <= 0:
        raise ValueError("energy_threshold must be positive")
    count = 0
    for ka in mode_grid(n_sites).chunks(chunk_size):
        count += int(np.count_nonzero(ising_mode_energy(ka, lambda_) < energy_threshold))
    return count


# -- Dicke model ------------------------------------------------------------

def dicke_gap_coefficient(omega, omega0) -> float:
    """A in e_1 ~ A |lambda - lambda_c|^(1/2)."""
    return 2.0 * (omega * omega0) ** 0.75 / math.sqrt(omega**2 + omega0**2)


def dicke_mode_energies(omega, omega0, delta_lambda) -> tuple[float, float]:
    """Normal-phase (e1, e2) from the offset delta_lambda = lambda - lambda_c <= 0.

    e1^2 is evaluated as 8 w w0 (lc - l)(lc + l) / (a + sqrt(b)), which keeps
    full relative precision as lambda approaches lambda_c.
    """
    lam_c = 0.5 * math.sqrt(omega * omega0)
    lam = lam_c + delta_lambda
    if delta_lambda > 0 or lam <= -lam_c:
        raise ValueError("Dicke coupling outside the normal phase")
    a = omega**2 + omega0**2
    root = math.sqrt((omega0**2 - omega**2) ** 2 + 16.0 * lam**2 * omega * omega0)
    e1_sq = 8.0 * omega * omega0 * (-delta_lambda) * (lam_c + lam) / (a + root)
    e2 = math.sqrt(0.5 * (a + root))
    return min(math.sqrt(e1_sq), e2), e2


def dicke_quasiparticle_energies(params: DickeParams) -> DickeSpectrum:
    """Soft and gapped quasiparticle energies in the normal phase."""
    lam_c = params.lambda_c
    if not -lam_c < params.lambda_ < lam_c:
        raise ValueError(
            f"lambda={params.lambda_} is not in the normal phase |lambda| < {lam_c}")
    a = params.omega**2 + params.omega0**2
    disc = (params.omega0**2 - params.omega**2) ** 2 + 16.0 * params.lambda_**2 * params.omega * params.omega0
    if 0.5 * (a - math.sqrt(disc)) < -1e-12 * a:
        raise ValueError("negative soft-mode energy squared: phase violation")
    e1, e2 = dicke_mode_energies(params.omega, params.omega0, params.lambda_ - lam_c)
    return DickeSpectrum(e1, e2, dicke_gap_coefficient(params.omega, params.omega0))
