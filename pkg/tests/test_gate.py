import numpy as np
import pytest

from chiralgate.model import GateConfig, ModelParams, build_grid
from chiralgate import gate


@pytest.fixture
def params():
    return ModelParams(delta_k_d=1.5 * np.pi, n_emitters=30)


@pytest.fixture
def config():
    return GateConfig(sigma=0.05)


@pytest.fixture(scope="module")
def reference_report():
    return gate.gate_fidelity(
        ModelParams(delta_k_d=1.5 * np.pi, n_emitters=30), GateConfig(sigma=0.05)
    )


class TestGateFidelity:
    def test_good_configuration_reaches_high_fidelity(self, reference_report):
        assert reference_report.fidelity > 0.95

    def test_report_reconstructs_from_overlaps(self, reference_report):
        assert reference_report.recompute_fidelity() == pytest.approx(
            reference_report.fidelity, rel=1e-15
        )

    def test_fidelity_within_unit_interval(self, reference_report):
        # discrete quadrature can exceed the bound only at its own error level
        assert 0.0 <= reference_report.fidelity <= 1.0 + 1e-6

    def test_k0_gauge_invariance(self, config, reference_report):
        shifted = gate.gate_fidelity(
            ModelParams(n_emitters=30, k0_d=0.37), config
        ).fidelity
        assert abs(shifted - reference_report.fidelity) < 1e-12

    def test_disabling_bound_term_removes_conditional_phase(self, params, config, reference_report):
        linear = gate.gate_fidelity(params, config, include_bound_term=False)
        shift = np.angle(linear.overlap_ab) - np.angle(reference_report.overlap_ab)
        assert abs(abs(shift) - np.pi) < 0.05
        assert linear.fidelity == pytest.approx(0.25, abs=0.01)

    def test_equal_velocity_point_fails(self, config):
        report = gate.gate_fidelity(ModelParams(n_emitters=30, delta_k_d=np.pi), config)
        assert report.fidelity < 0.6

    def test_near_band_collapse_fails(self, config):
        report = gate.gate_fidelity(ModelParams(n_emitters=30, delta_k_d=0.3), config)
        assert report.fidelity < 0.6

    def test_mirror_configurations_agree(self, config):
        # dk -> 2*pi - dk swaps the band roles; at finite sigma the gate
        # fidelities agree closely (not exactly: the beam splitter couples to
        # fixed channel superpositions)
        f1 = gate.gate_fidelity(ModelParams(n_emitters=20, delta_k_d=1.5 * np.pi), config)
        f2 = gate.gate_fidelity(ModelParams(n_emitters=20, delta_k_d=0.5 * np.pi), config)
        assert f1.fidelity == pytest.approx(f2.fidelity, abs=1e-3)

    def test_loss_decreases_fidelity(self, config, reference_report):
        lossy = gate.gate_fidelity(ModelParams(n_emitters=30, gamma_loss=0.01), config)
        assert lossy.fidelity < reference_report.fidelity

    def test_asymmetry_decreases_fidelity(self, config, reference_report):
        skew = gate.gate_fidelity(
            ModelParams(n_emitters=30, gamma_a=0.55, gamma_b=0.45), config
        )
        assert skew.fidelity < reference_report.fidelity
        assert skew.fidelity > 0.9  # mild imperfection, mild penalty

    def test_convergence_flag(self, params, config):
        report = gate.gate_fidelity(
            params, config, grid=build_grid(2.0, 201), check_convergence=True
        )
        assert report.grid_converged is True


class TestOptimizeSigma:
    def test_quadratic_model_recovers_peak(self):
        calls = []

        def f(sigma):
            calls.append(sigma)
            return 1.0 - (np.log(sigma) - np.log(0.05)) ** 2

        s, v = gate.optimize_sigma(
            ModelParams(), GateConfig(), bracket=(1e-3, 0.5), fidelity_fn=f
        )
        assert s == pytest.approx(0.05, rel=2e-2)
        assert v == pytest.approx(1.0, abs=1e-3)

    def test_non_unimodal_bracket_reported_with_samples(self):
        def two_peaks(sigma):
            u = np.log(sigma)
            return np.exp(-((u + 5) ** 2) / 2) + 1.2 * np.exp(-((u + 2) ** 2) / 2)

        with pytest.raises(gate.NonUnimodalError) as exc:
            gate.optimize_sigma(
                ModelParams(), GateConfig(), bracket=(1e-3, 0.5), fidelity_fn=two_peaks
            )
        assert len(exc.value.samples) > 4

    def test_invalid_bracket(self):
        with pytest.raises(ValueError):
            gate.optimize_sigma(ModelParams(), GateConfig(), bracket=(0.5, 0.5))


class TestSweep:
    def test_axes_product_order_and_columns(self, config):
        table = gate.sweep(
            ModelParams(n_emitters=4),
            config,
            axes={"gamma_loss": [0.0, 0.01], "sigma": [0.05, 0.1]},
        )
        assert len(table.rows) == 4
        assert [r["gamma_loss"] for r in table.rows] == [0.0, 0.0, 0.01, 0.01]
        assert [r["sigma"] for r in table.rows] == [0.05, 0.1, 0.05, 0.1]
        assert np.all(np.isfinite(table.column("fidelity")))

    def test_delta_gamma_reparametrization(self, config):
        table = gate.sweep(ModelParams(n_emitters=4), config, axes={"delta_gamma": [0.0, 0.2]})
        assert table.rows[1]["error"] == ""
        # the perturbed row must differ from the clean one
        assert table.rows[0]["fidelity"] != table.rows[1]["fidelity"]

    def test_per_cell_failures_recorded_in_row(self, config):
        table = gate.sweep(
            ModelParams(n_emitters=4), config, axes={"delta_gamma": [0.0, 1.5]}
        )
        assert table.rows[0]["error"] == ""
        assert "negative" in table.rows[1]["error"]
        assert np.isnan(table.rows[1]["fidelity"])
        assert len(table.rows) == 2


class TestFitPowerLaw:
    def test_exact_synthetic_data(self):
        xs = np.array([1.0, 2.0, 4.0, 8.0, 16.0])
        exponent, prefactor, r_sq = gate.fit_power_law(xs, 3.0 * xs**-2)
        assert exponent == pytest.approx(-2.0, abs=1e-12)
        assert prefactor == pytest.approx(3.0, rel=1e-12)
        assert r_sq == pytest.approx(1.0, abs=1e-12)

    def test_rejects_nonpositive_data(self):
        with pytest.raises(ValueError, match="positive"):
            gate.fit_power_law([1, 2, 3, 4], [1, -1, 2, 3])

    def test_rejects_short_data(self):
        with pytest.raises(ValueError, match="4 points"):
            gate.fit_power_law([1, 2, 3], [1, 2, 3])

    def test_noisy_data_r_squared_below_one(self):
        rng = np.random.default_rng(0)
        xs = np.linspace(1, 10, 8)
        ys = 2.0 * xs**-1.5 * np.exp(rng.normal(0, 0.05, 8))
        exponent, _, r_sq = gate.fit_power_law(xs, ys)
        assert exponent == pytest.approx(-1.5, abs=0.2)
        assert r_sq < 1.0


def test_default_gate_grid_covers_pulse_and_resonance():
    g = gate.default_gate_grid(0.05)
    assert g.half_width >= 2.0
    assert g.h <= 0.01
    g_wide = gate.default_gate_grid(0.5)
    assert g_wide.half_width >= 3.0
    g_narrow = gate.default_gate_grid(0.004)
    assert g_narrow.h <= 0.004 / 2.5
