import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qpt_echo.smalled import pair_hamiltonian, pair_subspace_oracle
from qpt_echo.spectra import (DickeParams, IsingParams, QuenchSpec, XYParams,
                              degenerate_mode_count, dicke_gap_coefficient, dicke_mode_energies,
                              dicke_quasiparticle_energies, grid_ka, ising_bogoliubov_angle,
                              ising_mode_energy, mode_grid, mode_table, xy_bogoliubov_angle,
                              xy_mode_energy)

ka_open = st.floats(1e-6, math.pi - 1e-6)
lam = st.floats(0.0, 3.0)


class TestQuenchSpec:
    def test_identities(self):
        q = QuenchSpec.from_lambdas(0.9, 0.95, 1.0)
        assert q.epsilon == pytest.approx(0.05)
        assert q.delta - q.delta_lambda == q.epsilon
        assert q.eta == pytest.approx(0.05 / -0.1)

    @given(st.floats(-1e-2, 1e-2), st.floats(-1e-2, 1e-2))
    def test_offsets_round_trip(self, eps, delta):
        q = QuenchSpec.from_offsets(eps, delta, 1.0)
        assert q.epsilon == q.delta - q.delta_lambda
        assert q.epsilon == pytest.approx(eps, abs=4 * np.spacing(max(abs(eps), abs(delta))))
        assert q.delta == delta

    def test_eta_at_critical_pre(self):
        q = QuenchSpec.from_offsets(1e-3, 1e-3, 1.0)
        assert q.delta_lambda == 0.0
        assert not math.isfinite(q.eta)


class TestParams:
    @pytest.mark.parametrize("n", [2, 4, 1, 0, -3, 3.5])
    def test_rejects_bad_chain_length(self, n):
        with pytest.raises(ValueError):
            IsingParams(n, 1.0)

    def test_xy_requires_odd(self):
        with pytest.raises(ValueError):
            XYParams(10, 1.0, 0.5)

    def test_dicke_critical_point(self):
        assert DickeParams(1.0, 4.0, 0.1).lambda_c == pytest.approx(1.0)


class TestIsingModes:
    def test_examples(self):
        assert ising_mode_energy(0.7, 0.0) == pytest.approx(2.0)
        assert ising_mode_energy(1e-9, 1.0) == pytest.approx(0.0, abs=1e-8)
        assert ising_mode_energy(math.pi, 1.0) == pytest.approx(4.0)

    def test_angle_examples(self):
        assert ising_bogoliubov_angle(math.pi / 2, 0.0) == pytest.approx(-math.pi / 2)
        assert abs(ising_bogoliubov_angle(math.pi / 2, 1e12)) == pytest.approx(math.pi)
        assert ising_bogoliubov_angle(math.pi / 3, 0.5) == pytest.approx(-math.pi / 2)

    @given(ka_open, lam)
    def test_energy_lower_bound(self, ka, lam_):
        assert ising_mode_energy(ka, lam_) >= 2 * abs(lam_ - 1) - 1e-12

    @given(ka_open, lam)
    def test_angle_range(self, ka, lam_):
        th = ising_bogoliubov_angle(ka, lam_)
        assert -math.pi < th <= math.pi


class TestXYModes:
    @given(ka_open, lam)
    def test_gamma_one_is_ising_bitwise(self, ka, lam_):
        assert xy_mode_energy(ka, lam_, 1.0) == ising_mode_energy(ka, lam_)
        assert xy_bogoliubov_angle(ka, lam_, 1.0) == ising_bogoliubov_angle(ka, lam_)

    def test_gamma_zero(self):
        assert xy_mode_energy(math.pi / 2, 1.0, 0.0) == pytest.approx(2.0)
        assert xy_bogoliubov_angle(math.pi / 2, 1.0, 0.0) == pytest.approx(math.pi)

    def test_anisotropic_energy_matches_pair_oracle(self):
        # the pair Hamiltonian's level splitting is the oracle for e_k
        e = xy_mode_energy(math.pi / 2, 1.0, 0.5)
        h = pair_hamiltonian(math.pi / 2, 1.0, 0.5)
        assert e == pytest.approx(np.linalg.eigvalsh(h)[1], rel=1e-14)
        assert e == pytest.approx(math.sqrt(5.0), rel=1e-14)

    @given(ka_open, st.floats(0, 2), st.floats(0, 2), st.floats(0, 50), st.floats(0.05, 2))
    def test_anisotropic_factor_matches_pair_oracle(self, ka, l1, l2, t, gamma):
        from qpt_echo.pairprod import mode_factor
        f = mode_factor(xy_bogoliubov_angle(ka, l1, gamma), xy_bogoliubov_angle(ka, l2, gamma),
                        xy_mode_energy(ka, l2, gamma), t)
        assert f == pytest.approx(pair_subspace_oracle(ka, l1, l2, t, gamma), abs=1e-12)


class TestModeGrid:
    def test_small(self):
        assert np.allclose(mode_grid(5), [2 * math.pi / 5, 4 * math.pi / 5])
        assert np.allclose(mode_grid(3), [2 * math.pi / 3])

    def test_huge_is_lazy(self):
        g = mode_grid(200_000_001)
        assert len(g) == 100_000_000
        assert g[0] == 2 * math.pi / 200_000_001
        assert g[-1] < math.pi

    def test_slices_and_chunks(self):
        g = mode_grid(101)
        full = np.asarray(g)
        assert np.array_equal(g[3:9], full[3:9])
        bounds = g.chunk_bounds(16)
        assert bounds[0][0] == 1 and bounds[-1][1] == 51
        assert sum(hi - lo for lo, hi in bounds) == 50
        assert np.array_equal(np.concatenate([grid_ka(np.arange(lo, hi), 101) for lo, hi in bounds]),
                              full)

    def test_rejects_even(self):
        with pytest.raises(ValueError):
            mode_grid(10)

    def test_mode_table(self):
        t = mode_table(IsingParams(11, 0.7))
        assert len(t.ka_values) == len(t.e_k) == len(t.theta) == 5
        assert np.all(np.diff(t.ka_values) > 0)
        assert np.all(t.e_k >= 0)


class TestDegeneracy:
    def test_examples(self):
        assert degenerate_mode_count(101, 1.0, 4.0) == 50
        assert degenerate_mode_count(101, 0.0, 1.0) == 0
        assert degenerate_mode_count(1001, 1.0, 0.1) == 7

    def test_grows_with_n_at_criticality(self):
        counts = [degenerate_mode_count(n, 1.0, 0.1) for n in (1001, 10001, 100001)]
        assert counts[1] > 5 * counts[0] and counts[2] > 5 * counts[1]

    def test_rejects_nonpositive_threshold(self):
        with pytest.raises(ValueError):
            degenerate_mode_count(11, 1.0, 0.0)


class TestDicke:
    def test_decoupled(self):
        s = dicke_quasiparticle_energies(DickeParams(1.0, 1.0, 0.0))
        assert s.e1 == pytest.approx(1.0) and s.e2 == pytest.approx(1.0)

    def test_critical(self):
        e1, e2 = dicke_mode_energies(1.0, 1.0, 0.0)
        assert e1 == 0.0 and e2 == pytest.approx(math.sqrt(2.0))

    def test_gap_coefficient(self):
        assert dicke_gap_coefficient(1.0, 1.0) == pytest.approx(math.sqrt(2.0))

    @pytest.mark.parametrize("dl", [1e-4, 1e-5, 1e-6, 1e-7, 1e-8])
    def test_soft_mode_asymptote(self, dl):
        for om, om0 in [(1.0, 1.0), (1.0, 2.5)]:
            e1, _ = dicke_mode_energies(om, om0, -dl)
            ratio = e1 / (dicke_gap_coefficient(om, om0) * math.sqrt(dl))
            assert abs(ratio - 1) <= (1e-3 if dl == 1e-8 else 10 * dl ** 0.5 + 1e-3)

    @given(st.floats(0.1, 3), st.floats(0.1, 3), st.floats(0, 0.999))
    def test_closed_form(self, om, om0, frac):
        lam_ = frac * 0.5 * math.sqrt(om * om0)
        s = dicke_quasiparticle_energies(DickeParams(om, om0, lam_))
        disc = math.sqrt((om0**2 - om**2) ** 2 + 16 * lam_**2 * om * om0)
        assert s.e1 ** 2 == pytest.approx(0.5 * (om**2 + om0**2 - disc), rel=1e-9, abs=1e-12)
        assert s.e2 ** 2 == pytest.approx(0.5 * (om**2 + om0**2 + disc), rel=1e-12)
        assert s.e1 <= s.e2

    def test_rejects_superradiant(self):
        with pytest.raises(ValueError):
            dicke_quasiparticle_energies(DickeParams(1.0, 1.0, 0.5))
        with pytest.raises(ValueError):
            dicke_mode_energies(1.0, 1.0, 1e-3)
