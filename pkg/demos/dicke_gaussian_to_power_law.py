"""
Dicke model: Gaussian decay, then 1/t
=====================================

The soft mode of the Dicke model is one classical degree of freedom. Its
survival probability first falls like exp(-Gamma t^2) and then like 1/(xi t).
"""

import numpy as np

from qpt_echo import DickeParams, QuenchSpec, dicke_sp_effective, fit_m1, loglog_envelope_slope
from qpt_echo import scaling_gamma, scaling_xi

LAMBDA_C = 0.5  # sqrt(omega omega0) / 2 with omega = omega0 = 1


def dicke(eps, delta, times):
    q = QuenchSpec.from_offsets(eps, delta, LAMBDA_C)
    return q, dicke_sp_effective(DickeParams(1.0, 1.0, q.lambda_), q, times)


# end points approaching the critical coupling, delta = -10^-m
times = np.logspace(0, 5, 400)
for m in (6, 8, 10, 11):
    _, s = dicke(1e-5, -10.0**-m, times)
    m3, m5 = (np.exp(s.value_at(t)[1]) for t in (1e3, 1e5))
    print(f"m={m:2d}  M(1e3) = {m3:.4f}  M(1e5) = {m5:.4f}")

# the M1 form describes the whole crossover
_, s = dicke(1e-5, -1e-11, times)
fit = fit_m1(s, (1.0, 1e5))
print("M1 fit:", {k: f"{v:.4e}" for k, v in fit.parameters.items()},
      f"residual_max = {fit.residual_max:.3f}")
print("implied Gamma/xi^2 =", f"{fit.diagnostics['gamma_over_xi_sq']:.2e}")
print("late envelope slope =", f"{loglog_envelope_slope(s, (1e3, 1e5)).parameters['slope']:.3f}")

# short times: -ln M / (eps t^2) depends on eps only through eta = eps / (lambda - lambda_c)
eta = -0.5
batches = [dicke(e, e * (1 + 1 / eta), np.array([0.05, 0.1]) / np.sqrt(abs(eta * e)))
           for e in (1e-7, 1e-6, 1e-5, 1e-4)]
collapse = scaling_gamma(batches)
print(f"Gamma collapse at eta={eta}: spread {collapse.max_deviation:.3f}")

# long times: ln M is a function of eps^(1/2) t alone
window = np.exp(np.linspace(8.6, 9.5, 40))
grid = np.union1d(window, np.logspace(0, np.log10(3e4), 300))
batches = [dicke(e, -1e-10, grid) for e in np.array([1.2, 2.0, 3.5, 6.0, 9.0]) * 1e-6]
rep = scaling_xi(batches, window=(window[0], window[-1]), fit_window=(1.0, 3e4))
print(f"xi overlay spread {rep.max_deviation:.3f}, xi ~ eps^{rep.fit.parameters['slope']:.3f}")
