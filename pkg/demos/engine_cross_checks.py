"""
Cross-checking the fast engines
===============================

Every closed form used by the library is compared here with a brute-force
diagonalisation of the same Hamiltonian.
"""

import numpy as np

from qpt_echo import DickeParams, QuenchSpec, dicke_sp_effective, dicke_sp_two_mode
from qpt_echo import mode_factor, pair_subspace_oracle, quench_survival
from qpt_echo.gaussian import oscillator_form
from qpt_echo.pairprod import log_survival_for_modes
from qpt_echo.smalled import antiperiodic_grid, fock_truncation_sp, small_chain_ed_sp
from qpt_echo.spectra import ising_bogoliubov_angle, ising_mode_energy

rng = np.random.default_rng(1)

# one momentum pair: closed form against a 4x4 Hamiltonian
ka, lam, lamp, t = rng.uniform(0, np.pi, 1000), *rng.uniform(0, 2, (2, 1000)), rng.uniform(0, 1e3, 1000)
fast = mode_factor(ising_bogoliubov_angle(ka, lam), ising_bogoliubov_angle(ka, lamp),
                   ising_mode_energy(ka, lamp), t)
print("pair closed form vs 4x4:", f"{np.max(np.abs(fast - pair_subspace_oracle(ka, lam, lamp, t))):.1e}")

# a whole 9-site chain: spin Hamiltonian against the mode product
times = np.linspace(0, 20, 41)
ed = small_chain_ed_sp(9, 1.2, 1.1, times)
prod = np.exp(log_survival_for_modes(antiperiodic_grid(9), QuenchSpec.from_lambdas(1.2, 1.1, 1.0), times))
print("9-site chain ED vs product:", f"{np.max(np.abs(ed.m_values - prod)):.1e}")

# a squeezed oscillator: covariance formula against a 256-level number basis
g = quench_survival(oscillator_form(0.7), oscillator_form(1.6), times)
f = fock_truncation_sp(oscillator_form(0.7), oscillator_form(1.6), 256, times)
print("Gaussian vs Fock(256):", f"{np.max(np.abs(g.m_values - f.m_values)):.1e}")

# the Dicke soft mode alone against the full two-mode form
q = QuenchSpec.from_offsets(1e-3, -1e-3, 0.5)
p = DickeParams(1.0, 1.0, q.lambda_)
times = np.linspace(0, 2000, 101)
a, b = dicke_sp_effective(p, q, times), dicke_sp_two_mode(p, q, times)
print("Dicke effective vs two-mode:", f"{np.max(np.abs(a.m_values - b.m_values)):.1e}")
