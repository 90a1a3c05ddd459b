"""Zero-mean Gaussian states of quadratic bosonic Hamiltonians.

Conventions: canonical coordinates z = (x1, p1, ..., xd, pd), H = 1/2 z^T H_m z
(additive constants dropped), hbar = 1, vacuum covariance 1/2 * identity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .series import SurvivalSeries
from .spectra import DickeParams, QuenchSpec, dicke_mode_energies

_SYM_TOL = 1e-12


class PhaseBoundaryError(ValueError):
    """Quadratic form is not positive definite (no stable ground state)."""


class DegenerateOverlapError(ValueError):
    """Overlap determinant is not positive."""


def omega_matrix(n_modes: int) -> np.ndarray:
    """Symplectic form for the (x1, p1, x2, p2, ...) ordering."""
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


@dataclass(frozen=True)
class QuadraticBosonForm:
    h_matrix: np.ndarray

    def __post_init__(self):
        h = np.array(self.h_matrix, dtype=float)
        if h.ndim != 2 or h.shape[0] != h.shape[1] or h.shape[0] % 2:
            raise ValueError("h_matrix must be square with even dimension")
        if not np.allclose(h, h.T, atol=_SYM_TOL * max(1.0, np.abs(h).max())):
            raise ValueError("h_matrix must be symmetric")
        h = 0.5 * (h + h.T)
        h.setflags(write=False)
        object.__setattr__(self, "h_matrix", h)

    @property
    def n_modes(self) -> int:
        return self.h_matrix.shape[0] // 2


@dataclass(frozen=True)
class CovarianceState:
    sigma: np.ndarray

    def __post_init__(self):
        s = np.array(self.sigma, dtype=float)
        s = 0.5 * (s + s.T)
        s.setflags(write=False)
        object.__setattr__(self, "sigma", s)

    @property
    def n_modes(self) -> int:
        return self.sigma.shape[0] // 2

    def purity_defect(self) -> float:
        """|det(2 sigma) - 1|; zero for a pure state."""
        return abs(np.linalg.det(2.0 * self.sigma) - 1.0)


def williamson(h: QuadraticBosonForm) -> tuple[np.ndarray, np.ndarray]:
    """Normal-mode frequencies and symplectic S with S^T H_m S = diag(nu1, nu1, ...).

    Built from the real Schur form of H^(1/2) Omega H^(1/2).
    """
    hm = h.h_matrix
    w, v = np.linalg.eigh(hm)
    if w[0] <= 0:
        raise PhaseBoundaryError(
            f"quadratic form not positive definite (min eigenvalue {w[0]:.3e})")
    root = (v * np.sqrt(w)) @ v.T
    inv_root = (v / np.sqrt(w)) @ v.T
    k = root @ omega_matrix(h.n_modes) @ root
    t, o = scipy.linalg.schur(0.5 * (k - k.T), output="real")
    d = h.n_modes
    nu = np.empty(d)
    for j in range(d):
        a, b = 2 * j, 2 * j + 1
        if t[a, b] < 0:
            o[:, [a, b]] = o[:, [b, a]]
            nu[j] = -t[a, b]
        else:
            nu[j] = t[a, b]
    order = np.argsort(nu)
    perm = np.ravel([[2 * j, 2 * j + 1] for j in order])
    o = o[:, perm]
    nu = nu[order]
    s = inv_root @ o @ np.diag(np.repeat(np.sqrt(nu), 2))
    return nu, s


def ground_state_covariance(h: QuadraticBosonForm) -> CovarianceState:
    """Ground state sigma = 1/2 S S^T of a positive-definite form."""
    _, s = williamson(h)
    return CovarianceState(0.5 * s @ s.T)


def symplectic_propagator(h: QuadraticBosonForm, t: float) -> np.ndarray:
    """S(t) = exp(Omega H_m t).

    Positive-definite forms use the normal-mode rotation S R(t) S^-1 (exact
    for any t); other forms fall back to scaling-and-squaring ``expm``.
    """
    d = h.n_modes
    om = omega_matrix(d)
    try:
        nu, s = williamson(h)
    except PhaseBoundaryError:
        return scipy.linalg.expm(om @ h.h_matrix * t)
    c, sn = np.cos(nu * t), np.sin(nu * t)
    r = np.zeros((2 * d, 2 * d))
    for j in range(d):
        r[2 * j:2 * j + 2, 2 * j:2 * j + 2] = [[c[j], sn[j]], [-sn[j], c[j]]]
    s_inv = -om @ s.T @ om
    return s @ r @ s_inv


def evolve(state: CovarianceState, h: QuadraticBosonForm, t: float) -> CovarianceState:
    st = symplectic_propagator(h, t)
    return CovarianceState(st @ state.sigma @ st.T)


def log_pure_overlap(a: CovarianceState, b: CovarianceState) -> float:
    """ln |<a|b>|^2 = -1/2 ln det(sigma_a + sigma_b)."""
    sign, logdet = np.linalg.slogdet(a.sigma + b.sigma)
    if sign <= 0:
        raise DegenerateOverlapError("det(sigma_a + sigma_b) is not positive")
    return -0.5 * logdet


def pure_overlap(a: CovarianceState, b: CovarianceState) -> float:
    """|<a|b>|^2 for zero-mean pure Gaussian states."""
    return float(np.exp(log_pure_overlap(a, b)))


def quench_survival(h_pre: QuadraticBosonForm, h_post: QuadraticBosonForm, times,
                    metadata=None) -> SurvivalSeries:
    """SP of the ground state of ``h_pre`` evolved under ``h_post``."""
    psi0 = ground_state_covariance(h_pre)
    times = np.atleast_1d(np.asarray(times, dtype=float))
    log_m = np.array([0.0 if t == 0 else log_pure_overlap(psi0, evolve(psi0, h_post, t))
                      for t in times])
    return SurvivalSeries.from_log(times, np.minimum(log_m, 0.0), metadata)


# -- Dicke model ------------------------------------------------------------

def oscillator_form(frequency: float) -> QuadraticBosonForm:
    """H = (p^2 + frequency^2 x^2) / 2: the soft mode with unit mass."""
    return QuadraticBosonForm(np.diag([frequency**2, 1.0]))


def frequency_quench_sp(e, e_post, t):
    """Closed-form SP of an oscillator ground state after e -> e_post.

    M = [cos^2(e' t) + (e/e' + e'/e)^2 sin^2(e' t) / 4]^(-1/2), with the
    free-particle limit [1 + (e t / 2)^2]^(-1/2) at e_post = 0.
    """
    t = np.asarray(t, dtype=float)
    if e_post == 0.0:
        return (1.0 + (0.5 * e * t) ** 2) ** -0.5
    r = e / e_post - e_post / e
    return (1.0 + 0.25 * r * r * np.sin(e_post * t) ** 2) ** -0.5


def _dicke_check(params: DickeParams, quench: QuenchSpec, allow_critical_post: bool):
    if not np.isclose(quench.lambda_c, params.lambda_c, rtol=1e-14, atol=0.0):
        raise ValueError("quench.lambda_c must equal the Dicke critical coupling")
    if quench.delta_lambda >= 0:
        raise ValueError("pre-quench coupling is not in the normal phase")
    if quench.delta > 0 or (quench.delta == 0 and not allow_critical_post):
        raise ValueError("post-quench coupling is not in the normal phase")


def dicke_sp_effective(params: DickeParams, quench: QuenchSpec, times) -> SurvivalSeries:
    """Dicke SP from the soft mode alone: oscillator frequency quench e1(lambda) -> e1(lambda')."""
    _dicke_check(params, quench, allow_critical_post=True)
    e_pre, _ = dicke_mode_energies(params.omega, params.omega0, quench.delta_lambda)
    e_post, _ = dicke_mode_energies(params.omega, params.omega0, quench.delta)
    meta = {"model": "dicke-effective", "quench": quench.as_dict(),
            "grid": {"omega": params.omega, "omega0": params.omega0,
                     "e_pre": e_pre, "e_post": e_post}}
    return quench_survival(oscillator_form(e_pre), oscillator_form(e_post), times, meta)


def dicke_two_mode_form(omega, omega0, lambda_) -> QuadraticBosonForm:
    """omega a^+a + omega0 b^+b + lambda (a^+ + a)(b^+ + b) in quadratures."""
    h = np.diag([omega, omega, omega0, omega0]).astype(float)
    h[0, 2] = h[2, 0] = 2.0 * lambda_
    return QuadraticBosonForm(h)


def dicke_sp_two_mode(params: DickeParams, quench: QuenchSpec, times) -> SurvivalSeries:
    """Dicke SP from the full linearised two-mode quadratic form."""
    _dicke_check(params, quench, allow_critical_post=False)
    meta = {"model": "dicke-two-mode", "quench": quench.as_dict(),
            "grid": {"omega": params.omega, "omega0": params.omega0}}
    return quench_survival(dicke_two_mode_form(params.omega, params.omega0, quench.lambda_),
                           dicke_two_mode_form(params.omega, params.omega0, quench.lambda_prime),
                           times, meta)
