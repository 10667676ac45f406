import numpy as np
import pytest

from chiralgate.model import BandCollapseError, ModelParams
from chiralgate import polariton as pol


@pytest.fixture
def symmetric():
    return ModelParams(delta_k_d=1.5 * np.pi, n_emitters=30)


class TestMarkovOmega:
    def test_resonant_momenta(self, symmetric):
        assert pol.markov_omega(1e-12, symmetric) == pytest.approx(0.0, abs=1e-9)
        assert pol.markov_omega(np.pi, symmetric) == pytest.approx(0.0, abs=1e-12)

    def test_single_mode_values(self):
        p = ModelParams(delta_k_d=0.0)
        assert pol.markov_omega(np.pi, p) == pytest.approx(0.0, abs=1e-12)
        assert pol.markov_omega(np.pi / 2, p) == pytest.approx(-0.5, abs=1e-12)

    def test_odd_in_q_for_symmetric_couplings(self, symmetric):
        for q in (0.3, 1.1, 2.0):
            assert pol.markov_omega(-q, symmetric) == pytest.approx(
                -pol.markov_omega(q, symmetric), rel=1e-12
            )

    def test_pole_proximity_reported(self, symmetric):
        with pytest.raises(pol.DivergentBandEdgeError):
            pol.markov_omega(0.75 * np.pi + 1e-10, symmetric)


class TestGroupVelocity:
    def test_resonant_values(self, symmetric):
        v0 = pol.group_velocity(0.0, symmetric)
        vpi = pol.group_velocity(np.pi, symmetric)
        assert v0 == pytest.approx(1.0 / (4 * np.sin(3 * np.pi / 8) ** 2), rel=1e-12)
        assert vpi == pytest.approx(1.0 / (4 * np.cos(3 * np.pi / 8) ** 2), rel=1e-12)
        assert v0 == pytest.approx(0.29289, abs=1e-5)
        assert vpi == pytest.approx(1.70711, abs=1e-5)

    def test_equal_velocities_at_dk_pi(self):
        p = ModelParams(delta_k_d=np.pi)
        assert pol.group_velocity(0.0, p) == pytest.approx(
            pol.group_velocity(np.pi, p), rel=1e-12
        )

    def test_matches_finite_difference(self):
        rng = np.random.default_rng(3)
        p = ModelParams(gamma_a=0.4, gamma_b=0.6, delta_k_d=1.9)
        h = 1e-5
        for _ in range(100):
            lo, hi = pol.band_bracket("minus", p)
            q = rng.uniform(lo + 0.05 * (hi - lo), hi - 0.05 * (hi - lo))
            fd = (pol.markov_omega(q + h, p) - pol.markov_omega(q - h, p)) / (2 * h)
            assert abs(pol.group_velocity(q, p) - fd) < 1e-6


class TestBandInvert:
    def test_resonant_inversion(self, symmetric):
        assert pol.band_invert(0.0, "minus", symmetric) == pytest.approx(0.0, abs=1e-12)
        assert pol.band_invert(0.0, "plus", symmetric) == pytest.approx(np.pi, abs=1e-12)

    def test_residual_at_tolerance(self, symmetric):
        for delta in (-0.9, -0.1, 0.1, 0.37, 2.5):
            for band in ("minus", "plus"):
                q = pol.band_invert(delta, band, symmetric)
                assert abs(pol.markov_omega(q, symmetric) - delta) < 1e-12 * max(1, abs(delta))

    def test_monotone_in_delta(self, symmetric):
        for band in ("minus", "plus"):
            qs = [pol.band_invert(d, band, symmetric) for d in np.linspace(-2, 2, 21)]
            assert np.all(np.diff(qs) > 0)

    def test_asymmetric_couplings(self):
        p = ModelParams(gamma_a=0.7, gamma_b=0.3, delta_k_d=2.4)
        q = pol.band_invert(0.4, "plus", p)
        assert abs(pol.markov_omega(q, p) - 0.4) < 1e-12

    def test_band_collapse_raises(self):
        with pytest.raises(BandCollapseError):
            pol.band_invert(0.1, "minus", ModelParams(delta_k_d=0.0))


class TestExactOmega:
    def test_requires_retardation(self, symmetric):
        with pytest.raises(ValueError):
            pol.exact_omega(0.3, symmetric)

    def test_residual_of_self_consistency(self):
        p = ModelParams(inv_c=1e-3)
        for q in (-0.6, 0.2, 0.9, np.pi):
            delta = pol.exact_omega(q, p)
            assert abs(pol._retarded_rhs(delta, q, p) - delta) < 1e-10

    def test_markov_limit_agreement(self):
        markov = ModelParams()
        p = ModelParams(inv_c=1e-3)
        for q in (-0.5, 0.3, 1.0, np.pi - 0.4):
            assert abs(pol.exact_omega(q, p) - pol.markov_omega(q, markov)) < 1e-2

    def test_deviation_decreases_with_inv_c(self):
        markov = ModelParams()
        for q in (-0.5, 0.4, np.pi + 0.3):
            ref = pol.markov_omega(q, markov)
            devs = [
                abs(pol.exact_omega(q, ModelParams(inv_c=ic)) - ref)
                for ic in (1e-3, 1e-4, 1e-5)
            ]
            assert devs[0] > devs[1] > devs[2]


class TestResonantDelays:
    def test_reference_values(self, symmetric):
        tau_plus, tau_minus, tau = pol.resonant_delays(symmetric)
        assert tau_plus == pytest.approx(0.58579, abs=1e-5)
        assert tau_minus == pytest.approx(3.41421, abs=1e-5)
        assert tau == pytest.approx(42.426, abs=1e-3)

    def test_equal_at_dk_pi(self):
        p = ModelParams(delta_k_d=np.pi)
        tau_plus, tau_minus, tau = pol.resonant_delays(p)
        assert tau_plus == pytest.approx(2.0, rel=1e-12)
        assert tau_minus == pytest.approx(2.0, rel=1e-12)
        assert tau == pytest.approx(0.0, abs=1e-12)

    def test_delays_are_inverse_group_velocities(self):
        for dk in (0.8, 1.9, 4.2, 5.5):
            p = ModelParams(delta_k_d=dk)
            tau_plus, tau_minus, _ = pol.resonant_delays(p)
            assert tau_plus == pytest.approx(1.0 / pol.group_velocity(np.pi, p), rel=1e-12)
            assert tau_minus == pytest.approx(1.0 / pol.group_velocity(0.0, p), rel=1e-12)

    def test_band_collapse_raises(self):
        with pytest.raises(BandCollapseError):
            pol.resonant_delays(ModelParams(delta_k_d=0.0))


def test_dispersion_curve_samples_both_bands(symmetric):
    points = pol.dispersion_curve(symmetric, n_points=64)
    bands = {p.band for p in points}
    assert bands == {"minus", "plus"}
    for p in points:
        assert -np.pi <= p.q_d < np.pi
        assert p.v_g > 0
