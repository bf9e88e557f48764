import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qetspin.errors import DomainError
from qetspin.linalg import expectation
from qetspin.protocol import (
    apply_feedback,
    closed_form_EA,
    closed_form_EB,
    extracted_energy,
    extraction_breakdown,
    feedback,
    feedback_unitary,
    infused_energy,
    measure,
    measure_along,
    optimal_theta,
    projector,
    run_protocol,
    xy_coefficients,
)

from conftest import H_GRID, ground_state
from oracles import protocol_oracle

fields = st.floats(min_value=0.0, max_value=0.99, allow_nan=False)
angles = st.floats(min_value=0.0, max_value=np.pi, allow_nan=False)


class TestMeasurement:
    def test_projectors(self):
        P0, P1 = projector(0), projector(1)
        np.testing.assert_allclose(P0 + P1, np.eye(16), atol=1e-15)
        np.testing.assert_allclose(P0 @ P0, P0, atol=1e-15)
        assert np.max(np.abs(P0 @ P1)) < 1e-15

    def test_probabilities_half(self, gs05):
        out = measure(gs05)
        assert [o.mu for o in out] == [0, 1]
        for o in out:
            assert abs(o.probability - 0.5) < 1e-12
            assert abs(np.trace(o.post_state) - 1) < 1e-12

    def test_rejects_bad_axis(self, gs05):
        with pytest.raises(DomainError):
            measure_along(gs05.rho, (1.0, 1.0, 0.0))

    @settings(max_examples=100, deadline=None)
    @given(fields)
    def test_infused_energy(self, h):
        gs = ground_state(round(h, 3))
        EA = infused_energy(gs, measure(gs))
        ref, _, _ = protocol_oracle(gs.h, 0.0)
        assert abs(EA - ref) < 1e-10
        assert abs(EA - closed_form_EA(gs)) < 1e-10
        assert EA > 0


class TestFeedback:
    def test_unitary(self):
        for mu in (0, 1):
            U = feedback_unitary(mu, 0.7)
            np.testing.assert_allclose(U @ U.conj().T, np.eye(16), atol=1e-14)

    def test_identity_feedback_leaves_averaged_state(self, gs05):
        out = measure(gs05)
        rf = apply_feedback(out, [np.eye(16), np.eye(16)])
        np.testing.assert_allclose(rf, sum(o.probability * o.post_state for o in out), atol=1e-15)

    def test_zero_angle_extracts_negative_energy(self, gs05):
        # Measuring alone cannot lower Bob's energy below the ground value.
        assert extracted_energy(gs05, feedback(measure(gs05), 0.0)) <= 1e-12

    @settings(max_examples=100, deadline=None)
    @given(fields, angles)
    def test_extracted_energy_against_oracle(self, h, theta):
        gs = ground_state(round(h, 3))
        rho_f = feedback(measure(gs), theta)
        _, EB, rf = protocol_oracle(gs.h, theta)
        assert np.max(np.abs(rho_f - rf)) < 1e-10
        assert abs(extracted_energy(gs, rho_f) - EB) < 1e-10
        assert abs(closed_form_EB(gs, theta) - EB) < 1e-10

    @settings(max_examples=100, deadline=None)
    @given(fields, angles)
    def test_final_state_is_density_matrix(self, h, theta):
        gs = ground_state(round(h, 3))
        rf = feedback(measure(gs), theta)
        assert abs(np.trace(rf) - 1) < 1e-12
        assert np.max(np.abs(rf - rf.conj().T)) < 1e-12
        assert np.linalg.eigvalsh(rf)[0] > -1e-12


class TestOptimum:
    @settings(max_examples=100, deadline=None)
    @given(fields)
    def test_theta_star_beats_dense_grid(self, h):
        gs = ground_state(round(h, 3))
        theta, EBmax = optimal_theta(gs) if gs.h > 0 else (0.0, 0.0)
        thetas = np.linspace(0, np.pi, 2001)
        assert np.max(closed_form_EB(gs, thetas)) <= EBmax + 1e-12
        if gs.h > 0:
            assert abs(closed_form_EB(gs, theta) - EBmax) < 1e-14

    def test_zero_field_flat(self):
        gs = ground_state(0.0)
        X, Y = xy_coefficients(gs)
        assert abs(Y) < 1e-12
        run = run_protocol(gs)
        assert run.E_B_max == pytest.approx(0.0, abs=1e-15)
        assert abs(run.theta_star) < 1e-15

    def test_positive_for_positive_field(self):
        assert all(run_protocol(ground_state(float(h))).E_B_max > 0 for h in H_GRID[1:])

    def test_closed_form_max_matches_numeric(self, gs05):
        run = run_protocol(gs05)
        assert abs(run.E_B - run.E_B_max) < 1e-12

    def test_breakdown_sums(self, gs05):
        run = run_protocol(gs05)
        E4h, E34 = extraction_breakdown(gs05, run.rho_f)
        assert abs(E4h + E34 - run.E_B) < 1e-12

    def test_infused_energy_split(self, gs05):
        # The site-1 measurement commutes with every term except h S1z and S1.S2.
        from qetspin.chain import spin_operators
        run = run_protocol(gs05)
        rho_m = sum(o.probability * o.post_state for o in run.outcomes)
        field = gs05.h * spin_operators()["S1z"]
        field_part = expectation(rho_m, field) - expectation(gs05.rho, field)
        assert abs(run.breakdown.E12_int + field_part - run.E_A) < 1e-12
        assert abs(expectation(rho_m, gs05.parts.V)) < 1e-12
        assert abs(expectation(rho_m, gs05.parts.H_B)) < 1e-12


class TestBondTerm:
    @pytest.mark.parametrize("h", [0.2, 0.5, 0.9])
    def test_trigonometric_form(self, h):
        # E34_int(theta) = -A (1 - cos 2 theta) + B sin 2 theta with A > 0.
        gs = ground_state(h)
        out = measure(gs)

        def e34(t):
            return extraction_breakdown(gs, feedback(out, t))[1]

        A = -e34(np.pi / 2) / 2
        B = e34(np.pi / 4) + A
        assert A > 0
        for t in np.linspace(0, np.pi, 17):
            assert abs(e34(t) - (-A * (1 - np.cos(2 * t)) + B * np.sin(2 * t))) < 1e-12

    def test_negative_at_optimum(self):
        for h in H_GRID[1:]:
            assert run_protocol(ground_state(float(h))).breakdown.E34_int < 0

    def test_field_term_carries_extraction(self):
        for h in H_GRID:
            run = run_protocol(ground_state(float(h)))
            assert run.breakdown.E4_h >= -1e-12
            assert run.breakdown.E4_h >= run.E_B_max - 1e-12

    def test_positive_sliver_below_zero_angle(self, gs05):
        # Small negative angles (just below pi modulo pi) raise the bond term slightly.
        out = measure(gs05)
        assert extraction_breakdown(gs05, feedback(out, -0.01))[1] > 1e-4


class TestBookkeeping:
    @settings(max_examples=100, deadline=None)
    @given(fields, angles)
    def test_total_energy_and_boundary(self, h, theta):
        gs = ground_state(round(h, 3))
        run = run_protocol(gs, theta)
        assert abs(expectation(run.rho_f, gs.parts.H) - (run.E_A - run.E_B)) < 1e-10
        assert abs(expectation(run.rho_f, gs.parts.V)) < 1e-10
        for o in run.outcomes:
            assert abs(expectation(o.post_state, gs.parts.V)) < 1e-10

    @settings(max_examples=100, deadline=None)
    @given(fields, angles)
    def test_pi_periodic(self, h, theta):
        gs = ground_state(round(h, 3))
        out = measure(gs)
        assert abs(extracted_energy(gs, feedback(out, theta)) - extracted_energy(gs, feedback(out, theta + np.pi))) < 1e-12

    @settings(max_examples=100, deadline=None)
    @given(fields, angles)
    def test_outcome_independent_feedback(self, h, theta):
        gs = ground_state(round(h, 3))
        out = measure(gs)
        U = feedback_unitary(0, theta)
        assert extracted_energy(gs, apply_feedback(out, [U, U])) <= 1e-12
