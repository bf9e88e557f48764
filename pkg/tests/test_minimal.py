import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qetspin.errors import AllZero, DomainError
from qetspin.minimal import H_MAX, minimal_closed_forms, minimal_fits, minimal_hamiltonian, minimal_numeric_crosscheck

fields = st.floats(min_value=0.0, max_value=H_MAX, allow_nan=False)
couplings = st.floats(min_value=0.2, max_value=3.0, allow_nan=False)


def block_ground_energy(h, k):
    # The even-parity block {|00>, |11>} holds the ground state: [[2h, 2k], [2k, -2h]].
    return -2 * np.hypot(h, k)


class TestClosedForms:
    def test_zero_field(self):
        r = minimal_closed_forms(0.0, 1.0)
        assert r.a == pytest.approx(1 / np.sqrt(2)) and r.b == pytest.approx(1 / np.sqrt(2))
        np.testing.assert_allclose(r.rhoB_g, np.eye(2) / 2)
        assert r.SB_g == pytest.approx(0.693147, abs=1e-6)
        assert r.EB_max == 0.0
        assert abs(r.dSB) < 1e-15

    def test_unit_field(self):
        # Evaluated independently: (3 / sqrt 2)(sqrt(1 + 1/9) - 1).
        assert minimal_closed_forms(1.0, 1.0).EB_max == pytest.approx(0.11474763394014725, abs=1e-14)
        assert minimal_closed_forms(1.0, 1.0).EB_max == pytest.approx(3 / np.sqrt(2) * (np.sqrt(10 / 9) - 1), abs=1e-14)

    @pytest.mark.parametrize("h,k", [(-0.1, 1.0), (0.5, 0.0), (0.5, -1.0), (float("nan"), 1.0)])
    def test_domain(self, h, k):
        with pytest.raises(DomainError):
            minimal_closed_forms(h, k)

    @settings(max_examples=100, deadline=None)
    @given(fields, couplings)
    def test_invariants(self, h, k):
        r = minimal_closed_forms(h, k)
        assert abs(r.a ** 2 + r.b ** 2 - 1) < 1e-12
        assert 0 <= r.theta <= np.pi / 4 + 1e-15
        lo, hi = sorted((r.a ** 2, r.b ** 2))
        f = np.diag(r.rhoB_f)
        assert np.all(f >= lo - 1e-14) and np.all(f <= hi + 1e-14)
        assert r.dSB >= -1e-12
        assert r.dSB_tilde >= r.dSB - 1e-12
        assert r.EB_max >= 0


class TestNumeric:
    def test_hamiltonian_ground_energy_zero(self):
        for h in (0.0, 0.5, 1.5):
            w = np.linalg.eigvalsh(minimal_hamiltonian(h, 1.0))
            assert abs(w[0]) < 1e-12
            assert abs(w[0] - 2 * np.hypot(h, 1.0) - block_ground_energy(h, 1.0)) < 1e-12

    def test_zero_field(self):
        rep = minimal_numeric_crosscheck(0.0, 1.0)
        assert abs(rep.EB_numeric) < 1e-10

    @pytest.mark.parametrize("h", [0.5, 1.5])
    def test_reduced_states(self, h):
        rep = minimal_numeric_crosscheck(h, 1.0)
        cf = minimal_closed_forms(h, 1.0)
        assert rep.rho_g_error < 1e-10
        assert abs(rep.rhoB_g[0, 1]) < 1e-12
        np.testing.assert_allclose(np.diag(rep.rhoB_g).real, [cf.a ** 2, cf.b ** 2], atol=1e-10)
        assert rep.EB_error < 1e-8
        assert rep.rho_f_error < 1e-8

    @settings(max_examples=100, deadline=None)
    @given(fields, couplings)
    def test_crosscheck_random(self, h, k):
        rep = minimal_numeric_crosscheck(h, k)
        assert rep.EB_error < 1e-8


class TestFits:
    def test_default_grid(self):
        fit = minimal_fits(1.0)
        assert -1.65 <= fit.beta <= -1.35
        assert -2.2 <= fit.beta_tilde <= -1.8

    def test_origin_only(self):
        with pytest.raises(AllZero):
            minimal_fits(1.0, [0.0])

    def test_grid_domain(self):
        with pytest.raises(DomainError):
            minimal_fits(1.0, [0.5, 2.0])

    def test_curves(self):
        c = minimal_fits(1.0, np.linspace(0, 1.99, 5)).curves()
        assert list(c) == ["h", "EB_max", "dSB", "dSB_tilde", "two_thirds_dSB", "half_dSB_tilde"]
        assert c["EB_max"][0] == 0 and c["two_thirds_dSB"][0] == 0 and c["half_dSB_tilde"][0] == 0
        np.testing.assert_allclose(c["two_thirds_dSB"], 2 * c["dSB"] / 3)
