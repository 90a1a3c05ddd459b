"""Brute-force oracles and the LMG model.

Everything here works with explicit matrices: 2x2 fermion pair blocks,
truncated Fock spaces, full 2^N spin chains and the (N+1)-dimensional
maximal-spin sector of the Lipkin-Meshkov-Glick Hamiltonian.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from itertools import combinations_with_replacement

import numpy as np
import scipy.linalg

from .gaussian import QuadraticBosonForm
from .series import SurvivalSeries
from .spectra import QuenchSpec

FOCK_TAIL_WARN = 1e-6
MAX_CHAIN_SITES = 12


class ConvergenceWarning(UserWarning):
    pass


@dataclass(frozen=True)
class LMGParams:
    n_spins: int
    lambda_: float
    gamma: float

    def __post_init__(self):
        if int(self.n_spins) != self.n_spins or self.n_spins < 2:
            raise ValueError("n_spins must be an integer >= 2")


@dataclass(frozen=True)
class SpectralDecomposition:
    energies: np.ndarray
    overlaps: np.ndarray

    def survival(self, times) -> np.ndarray:
        """|sum_a w_a exp(-i E_a t)|^2, energies measured from the lowest one."""
        times = np.asarray(times, dtype=float)
        e = self.energies - self.energies[0]
        amp = np.exp(-1j * np.multiply.outer(times, e)) @ self.overlaps
        return np.clip(np.abs(amp) ** 2, 0.0, None)


# -- fermion pair subspace --------------------------------------------------

def pair_hamiltonian(ka, mu, gamma=1.0) -> np.ndarray:
    """2 [(mu - cos ka) tau_z + gamma sin(ka) tau_x] on {empty, (k,-k) occupied}.

    Broadcasts over array inputs; returns shape (..., 2, 2).
    """
    ka, mu = np.broadcast_arrays(np.asarray(ka, float), np.asarray(mu, float))
    hz = 2.0 * (mu - np.cos(ka))
    hx = 2.0 * (gamma * np.sin(ka))
    return np.stack([np.stack([hz, hx], -1), np.stack([hx, -hz], -1)], -2)


def pair_subspace_oracle(ka, lambda_, lambda_prime, t, gamma=1.0):
    """Survival probability of the pair ground state at lambda under h(lambda').

    Ground state by ``eigh``; propagator exp(-i h t) = cos(Et) - i sin(Et) h/E
    for the traceless 2x2 h with eigenvalues +-E.
    """
    ka, lam, lamp, t = np.broadcast_arrays(*(np.asarray(x, float) for x in (ka, lambda_, lambda_prime, t)))
    _, vecs = np.linalg.eigh(pair_hamiltonian(ka, lam, gamma))
    g = vecs[..., :, 0]
    hp = pair_hamiltonian(ka, lamp, gamma)
    energy = np.hypot(hp[..., 0, 0], hp[..., 0, 1])
    hg = np.einsum("...ij,...j->...i", hp, g)
    proj = np.einsum("...i,...i->...", g, hg)
    cos_part = np.cos(energy * t)
    sin_part = np.sin(energy * t)
    ratio = np.divide(proj, energy, out=np.ones_like(proj), where=energy != 0)
    return cos_part**2 + (sin_part * ratio) ** 2


# -- truncated Fock space ---------------------------------------------------

def _single_mode_ops(cutoff: int):
    """x, p and the quadratic products x x, p p, (x p + p x)/2 on n < cutoff.

    Products are formed in a padded space and then truncated, so every kept
    matrix element is exact.
    """
    n = cutoff + 2
    a = np.diag(np.sqrt(np.arange(1, n)), 1)
    x = (a + a.T) / np.sqrt(2.0)
    p = (a - a.T) / (1j * np.sqrt(2.0))
    sl = slice(0, cutoff)
    lin = {"x": x[sl, sl], "p": p[sl, sl]}
    quad = {
        ("x", "x"): (x @ x)[sl, sl],
        ("p", "p"): (p @ p)[sl, sl],
        ("x", "p"): (0.5 * (x @ p + p @ x))[sl, sl],
    }
    return lin, quad


def fock_hamiltonian(h: QuadraticBosonForm, cutoff: int) -> np.ndarray:
    """Symmetrised 1/2 z^T H_m z as a Hermitian matrix on cutoff^d states."""
    d = h.n_modes
    lin, quad = _single_mode_ops(cutoff)
    eye = np.eye(cutoff)
    names = ("x", "p")

    def embed(ops):
        out = np.ones((1, 1))
        for j in range(d):
            out = np.kron(out, ops.get(j, eye))
        return out

    dim = cutoff**d
    mat = np.zeros((dim, dim), dtype=complex)
    hm = h.h_matrix
    for i, j in combinations_with_replacement(range(2 * d), 2):
        coef = hm[i, j] if i != j else 0.5 * hm[i, i]
        if coef == 0.0:
            continue
        mi, mj = divmod(i, 2)[0], divmod(j, 2)[0]
        if mi == mj:
            op = embed({mi: quad[(names[i % 2], names[j % 2])]})
        else:
            op = embed({mi: lin[names[i % 2]], mj: lin[names[j % 2]]})
        mat += coef * op
    return 0.5 * (mat + mat.conj().T)


def _tail_mass(state: np.ndarray, cutoff: int, d: int) -> float:
    """Probability on Fock levels in the top eighth of any mode."""
    probs = (np.abs(state) ** 2).reshape((cutoff,) * d)
    edge = cutoff - max(1, cutoff // 8)
    mask = np.zeros(probs.shape, dtype=bool)
    for axis in range(d):
        idx = [slice(None)] * d
        idx[axis] = slice(edge, None)
        mask[tuple(idx)] = True
    return float(probs[mask].sum())


def fock_ground_state(h: QuadraticBosonForm, cutoff: int) -> tuple[np.ndarray, float]:
    """Lowest eigenvector of the truncated Hamiltonian and its tail mass."""
    w, v = np.linalg.eigh(fock_hamiltonian(h, cutoff))
    g = v[:, 0]
    return g, _tail_mass(g, cutoff, h.n_modes)


def _check_fock(h_pre, h_post, cutoff):
    if h_pre.n_modes != h_post.n_modes or h_pre.n_modes > 2:
        raise ValueError("Fock oracle supports matching forms with d <= 2")
    if cutoff < 16:
        raise ValueError("cutoff must be >= 16")
    if cutoff ** h_pre.n_modes > 6000:
        raise ValueError("Fock space too large for dense diagonalisation")


def fock_ground_overlap(h_a: QuadraticBosonForm, h_b: QuadraticBosonForm, cutoff: int) -> float:
    """|<0_a|0_b>|^2 between two truncated-Fock ground states."""
    _check_fock(h_a, h_b, cutoff)
    ga, _ = fock_ground_state(h_a, cutoff)
    gb, _ = fock_ground_state(h_b, cutoff)
    return float(abs(np.vdot(ga, gb)) ** 2)


def fock_truncation_sp(h_pre: QuadraticBosonForm, h_post: QuadraticBosonForm, cutoff: int,
                       times) -> SurvivalSeries:
    """SP by exact diagonalisation in a truncated number basis."""
    _check_fock(h_pre, h_post, cutoff)
    g, tail = fock_ground_state(h_pre, cutoff)
    w, v = np.linalg.eigh(fock_hamiltonian(h_post, cutoff))
    overlaps = np.abs(v.conj().T @ g) ** 2
    m = SpectralDecomposition(w, overlaps).survival(times)
    meta = {"model": "fock", "grid": {"cutoff": cutoff, "n_modes": h_pre.n_modes},
            "tail_mass": tail, "converged": tail <= FOCK_TAIL_WARN}
    if tail > FOCK_TAIL_WARN:
        warnings.warn(f"Fock tail mass {tail:.2e} exceeds {FOCK_TAIL_WARN:.0e}",
                      ConvergenceWarning, stacklevel=2)
    return SurvivalSeries.from_probability(times, np.minimum(m, 1.0), meta)


# -- LMG model --------------------------------------------------------------

def lmg_blocks(params: LMGParams, lambda_=None):
    """Parity blocks of H in |S, m>, each tridiagonal (m couples to m +- 2).

    Returns a list of (m_values, diagonal, off_diagonal) for the two blocks.
    Matrix elements come from S_+ |m> = sqrt(S(S+1) - m(m+1)) |m+1>.
    """
    lam = params.lambda_ if lambda_ is None else lambda_
    n, g = params.n_spins, params.gamma
    s = n / 2.0
    m = np.arange(-s, s + 1)
    ss = s * (s + 1)
    diag = -(1.0 + g) * (ss - m * m) / (2.0 * n) - lam * m
    mm = m[:-2]
    off = -(1.0 - g) / (4.0 * n) * np.sqrt((ss - mm * (mm + 1)) * (ss - (mm + 1) * (mm + 2)))
    blocks = []
    for parity in (0, 1):
        idx = np.arange(parity, n + 1, 2)
        blocks.append((m[idx], diag[idx], off[idx[:-1]]))
    return blocks


def lmg_dense_hamiltonian(params: LMGParams, lambda_=None) -> np.ndarray:
    """Unblocked (N+1)x(N+1) matrix; reference for the block construction."""
    lam = params.lambda_ if lambda_ is None else lambda_
    mat = np.zeros((params.n_spins + 1,) * 2)
    for parity, (_, d, o) in zip((0, 1), lmg_blocks(params, lam)):
        idx = np.arange(parity, params.n_spins + 1, 2)
        mat[idx, idx] = d
        mat[idx[1:], idx[:-1]] = o
        mat[idx[:-1], idx[1:]] = o
    return mat


def lmg_decomposition(params: LMGParams, quench: QuenchSpec) -> SpectralDecomposition:
    """Weights of the lambda ground state on the eigenstates of H(lambda')."""
    pre = lmg_blocks(params, quench.lambda_)
    post = lmg_blocks(params, quench.lambda_prime)
    best = None
    for b, (_, d, o) in enumerate(pre):
        try:
            w, v = scipy.linalg.eigh_tridiagonal(d, o, select="i", select_range=(0, 0))
        except np.linalg.LinAlgError as exc:
            raise RuntimeError("LMG eigensolve did not converge") from exc
        if best is None or w[0] < best[0]:
            best = (w[0], v[:, 0], b)
    _, g, b = best
    energies, overlaps = [], []
    for k, (_, d, o) in enumerate(post):
        try:
            w, v = scipy.linalg.eigh_tridiagonal(d, o)
        except np.linalg.LinAlgError as exc:
            raise RuntimeError("LMG eigensolve did not converge") from exc
        energies.append(w)
        overlaps.append((v.T @ g) ** 2 if k == b else np.zeros_like(w))
    energies = np.concatenate(energies)
    overlaps = np.concatenate(overlaps)
    order = np.argsort(energies, kind="stable")
    return SpectralDecomposition(energies[order], overlaps[order])


def lmg_survival_probability(params: LMGParams, quench: QuenchSpec, times) -> SurvivalSeries:
    if params.n_spins > 20000:
        raise ValueError("LMG dense eigensolve limited to N <= 2e4")
    dec = lmg_decomposition(params, quench)
    meta = {"model": "lmg", "quench": quench.as_dict(),
            "grid": {"n_spins": params.n_spins, "gamma": params.gamma},
            "overlap_sum": float(dec.overlaps.sum())}
    return SurvivalSeries.from_probability(times, np.minimum(dec.survival(times), 1.0), meta)


# -- full spin chain --------------------------------------------------------

def ising_chain_hamiltonian(n_sites: int, lambda_: float) -> np.ndarray:
    """H = -sum_i (sz_i sz_{i+1} + lambda sx_i), periodic, dense 2^N matrix."""
    dim = 1 << n_sites
    states = np.arange(dim)
    bits = (states[:, None] >> np.arange(n_sites)) & 1
    spins = 1 - 2 * bits
    diag = -np.sum(spins * np.roll(spins, -1, axis=1), axis=1).astype(float)
    mat = np.diag(diag)
    for i in range(n_sites):
        mat[states ^ (1 << i), states] += -lambda_
    return mat


def small_chain_ed_sp(n_sites: int, lambda_: float, lambda_prime: float, times) -> SurvivalSeries:
    """Whole-chain SP by full diagonalisation (N <= 12)."""
    if n_sites > MAX_CHAIN_SITES:
        raise MemoryError(f"full diagonalisation limited to N <= {MAX_CHAIN_SITES}")
    if n_sites < 3 or n_sites % 2 == 0:
        raise ValueError("n_sites must be odd and >= 3")
    _, v0 = np.linalg.eigh(ising_chain_hamiltonian(n_sites, lambda_))
    g = v0[:, 0]
    w, v = np.linalg.eigh(ising_chain_hamiltonian(n_sites, lambda_prime))
    dec = SpectralDecomposition(w, (v.T @ g) ** 2)
    quench = QuenchSpec.from_lambdas(lambda_, lambda_prime, 1.0)
    meta = {"model": "ising-ed", "quench": quench.as_dict(), "grid": {"n_sites": n_sites}}
    return SurvivalSeries.from_probability(times, np.minimum(dec.survival(times), 1.0), meta)


def antiperiodic_grid(n_sites: int) -> np.ndarray:
    """Paired momenta pi (2m - 1) / N, m = 1..(N-1)/2, of the even-parity sector."""
    m = np.arange(1, (n_sites - 1) // 2 + 1)
    return np.pi * (2.0 * m - 1.0) / n_sites
