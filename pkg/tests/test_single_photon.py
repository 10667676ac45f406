import numpy as np
import pytest

from chiralgate.model import BandCollapseError, GateConfig, ModelParams
from chiralgate import single_photon as sp

SQ2 = np.sqrt(2.0)


@pytest.fixture
def symmetric():
    return ModelParams(gamma_a=0.5, gamma_b=0.5, delta_k_d=1.5 * np.pi, n_emitters=30)


class TestEmitterT:
    def test_resonant_symmetric_swap(self, symmetric):
        t = sp.emitter_t(0.0, symmetric)
        assert t[0, 0] == pytest.approx(0.0, abs=1e-15)
        assert t[1, 1] == pytest.approx(0.0, abs=1e-15)
        assert t[1, 0] == pytest.approx(-1.0, abs=1e-15)

    def test_far_detuned_limit_is_identity(self, symmetric):
        t = sp.emitter_t(1e8, symmetric)
        assert np.abs(t - np.eye(2)).max() < 1e-7

    def test_beam_splitter_coupling_values(self):
        p = ModelParams(gamma_a=(2 + SQ2) / 4, gamma_b=(2 - SQ2) / 4)
        t = sp.emitter_t(0.0, p)
        assert t[0, 0] == pytest.approx(-1 / SQ2, abs=1e-12)
        assert t[1, 0] == pytest.approx(-1 / SQ2, abs=1e-12)
        assert t[1, 1] == pytest.approx(+1 / SQ2, abs=1e-12)

    def test_reciprocity(self, symmetric):
        p = ModelParams(gamma_a=0.3, gamma_b=0.7, gamma_loss=0.02)
        t = sp.emitter_t(np.linspace(-3, 3, 11), p)
        assert np.abs(t[:, 0, 1] - t[:, 1, 0]).max() == 0.0

    def test_loss_breaks_unitarity(self):
        p = ModelParams(gamma_loss=0.05)
        t = sp.emitter_t(0.1, p)
        col = np.abs(t[:, 0]) ** 2
        assert col.sum() < 1.0


class TestUnitCell:
    def test_unitary_at_zero_loss_random_samples(self):
        rng = np.random.default_rng(7)
        worst = 0.0
        for _ in range(200):
            ga = rng.uniform(0.05, 0.95)
            p = ModelParams(
                gamma_a=ga,
                gamma_b=1 - ga,
                delta_k_d=rng.uniform(0.01, 2 * np.pi - 0.01),
                k0_d=rng.uniform(-np.pi, np.pi),
            )
            s = sp.unit_cell_s1(rng.uniform(-5, 5), p)
            worst = max(worst, np.abs(s.conj().T @ s - np.eye(2)).max())
        assert worst < 1e-12

    def test_resonant_eigenvalues_plus_minus_one(self, symmetric):
        s = sp.unit_cell_s1(0.0, symmetric)
        lam = np.sort(np.linalg.eigvals(s).real)
        assert lam == pytest.approx([-1.0, 1.0], abs=1e-12)

    def test_resonant_eigenphases_independent_of_dk(self):
        for dk in np.linspace(0.1, 2 * np.pi - 0.1, 11):
            if abs(dk - np.pi) < 1e-9:
                continue
            p = ModelParams(delta_k_d=dk)
            lam = np.linalg.eigvals(sp.unit_cell_s1(0.0, p))
            phases = np.sort(np.abs(np.angle(lam)))
            assert phases[0] == pytest.approx(0.0, abs=1e-10)
            assert phases[1] == pytest.approx(np.pi, abs=1e-10)

    def test_single_mode_limit_bright_band_pi_shift(self):
        # dk = 0: the coupled (bright) superposition takes the chiral pi
        # shift per emitter, the dark one decouples with eigenvalue +1
        p = ModelParams(delta_k_d=0.0)
        lam = np.sort(np.linalg.eigvals(sp.unit_cell_s1(0.0, p)).real)
        assert lam == pytest.approx([-1.0, 1.0], abs=1e-12)

    def test_markov_phases_frequency_independent(self, symmetric):
        pa0, pb0 = sp.propagation_phases(0.0, symmetric)
        pa1, pb1 = sp.propagation_phases(3.0, symmetric)
        assert pa0 == pa1 and pb0 == pb1

    def test_retarded_phases_shift_linearly(self):
        p = ModelParams(inv_c=0.01)
        pa0, _ = sp.propagation_phases(0.0, p)
        pa1, _ = sp.propagation_phases(2.0, p)
        assert np.angle(pa1 / pa0) == pytest.approx(0.5 * 2.0 * 0.01, abs=1e-12)


class TestTransferEigen:
    def test_resonant_symmetric_eigenstates(self, symmetric):
        te = sp.transfer_eigen(0.0, symmetric)
        assert te.theta == pytest.approx(np.pi / 2, abs=1e-12)
        assert np.allclose(te.eigvec_plus, [1 / SQ2, 1 / SQ2], atol=1e-12)
        assert np.allclose(te.eigvec_minus, [1 / SQ2, -1 / SQ2], atol=1e-12)
        assert te.q_plus_d == pytest.approx(np.pi, abs=1e-12)
        assert te.q_minus_d == pytest.approx(0.0, abs=1e-12)

    def test_eigvecs_orthogonal_without_loss(self, symmetric):
        for d in (-1.3, -0.2, 0.4, 2.0):
            te = sp.transfer_eigen(d, symmetric)
            assert abs(np.dot(te.eigvec_plus, te.eigvec_minus)) < 1e-12

    def test_closed_form_matches_numerical_eigendecomposition(self):
        p = ModelParams(gamma_a=0.31, gamma_b=0.69, delta_k_d=2.1)
        for d in (-0.7, 0.0, 0.9, 3.0):
            te = sp.transfer_eigen(d, p)
            s1 = sp.unit_cell_s1(d, p)
            resid = s1 @ te.eigvec_plus - np.exp(1j * (p.k0_d + te.q_plus_d)) * te.eigvec_plus
            assert np.abs(resid).max() < 1e-10
            resid = s1 @ te.eigvec_minus - np.exp(1j * (p.k0_d + te.q_minus_d)) * te.eigvec_minus
            assert np.abs(resid).max() < 1e-10

    def test_far_detuned_eigvecs_approach_channel_basis(self, symmetric):
        te = sp.transfer_eigen(-200.0, symmetric)
        vecs = np.abs(np.stack([te.eigvec_plus, te.eigvec_minus]))
        # one eigenvector per channel, in either order
        assert np.allclose(np.sort(vecs.max(axis=1)), [1.0, 1.0], atol=5e-3)
        assert np.allclose(np.sort(vecs.min(axis=1)), [0.0, 0.0], atol=5e-3)

    def test_lossy_eigenphases_gain_decay(self):
        p = ModelParams(gamma_loss=0.02)
        te = sp.transfer_eigen(0.0, p)
        assert isinstance(te.q_plus_d, complex)
        assert te.q_plus_d.imag > 0.0  # per-cell attenuation
        assert te.q_plus_d.real == pytest.approx(np.pi, abs=1e-2)

    def test_band_collapse_reported(self):
        with pytest.raises(BandCollapseError):
            sp.transfer_eigen(0.0, ModelParams(delta_k_d=0.0))


class TestBeamSplitter:
    def test_resonant_matrix_values(self):
        t = sp.beam_splitter_t(0.0, GateConfig())
        assert t[0, 0] == pytest.approx(-1 / SQ2, abs=1e-12)
        assert t[1, 0] == pytest.approx(-1 / SQ2, abs=1e-12)
        assert t[0, 1] == pytest.approx(-1 / SQ2, abs=1e-12)
        assert t[1, 1] == pytest.approx(+1 / SQ2, abs=1e-12)

    def test_maps_channels_to_superpositions(self):
        t = sp.beam_splitter_t(0.0, GateConfig())
        out_a = t @ np.array([1.0, 0.0])
        assert np.allclose(out_a, [-1 / SQ2, -1 / SQ2], atol=1e-12)
        out_b = t @ np.array([0.0, 1.0])
        assert np.allclose(out_b, [-1 / SQ2, +1 / SQ2], atol=1e-12)

    def test_squared_is_identity_on_resonance(self):
        t = sp.beam_splitter_t(0.0, GateConfig())
        assert np.abs(t @ t - np.eye(2)).max() < 1e-12

    def test_unitary_at_all_frequencies(self):
        t = sp.beam_splitter_t(np.linspace(-4, 4, 41), GateConfig())
        prod = np.conj(np.swapaxes(t, -1, -2)) @ t
        assert np.abs(prod - np.eye(2)).max() < 1e-12

    def test_group_delay_slopes(self):
        # combined slope of both splitters: 4 +/- 2 sqrt(2) per channel
        cfg = GateConfig()
        eps = 1e-7

        def round_trip(delta):
            t = sp.beam_splitter_t(delta, cfg)
            return t @ t

        for idx, expect in ((0, 4 + 2 * SQ2), (1, 4 - 2 * SQ2)):
            slope = (
                np.angle(round_trip(eps)[idx, idx])
                - np.angle(round_trip(-eps)[idx, idx])
            ) / (2 * eps)
            assert slope == pytest.approx(expect, rel=1e-5)


class TestChain:
    def test_resonant_identity_for_even_n(self, symmetric):
        g = sp.chain_g1(0.0, symmetric, GateConfig())
        assert np.abs(g - np.eye(2)).max() < 1e-12

    def test_odd_n_flips_a_channel_sign(self):
        p = ModelParams(n_emitters=31)
        g = sp.chain_g1(0.0, p, GateConfig())
        assert g[0, 0] == pytest.approx(-1.0, abs=1e-12)
        assert g[1, 1] == pytest.approx(+1.0, abs=1e-12)

    def test_norm_preserved_without_loss(self, symmetric):
        g = sp.chain_g1(np.linspace(-2, 2, 101), symmetric, GateConfig())
        prod = np.conj(np.swapaxes(g, -1, -2)) @ g
        assert np.abs(prod - np.eye(2)).max() < 1e-11

    def test_loss_shrinks_output_norm(self):
        p = ModelParams(gamma_loss=0.01, n_emitters=30)
        g = sp.chain_g1(0.0, p, GateConfig())
        out = g @ np.array([1.0, 0.0])
        assert np.linalg.norm(out) < 1.0

    def test_matrix_power_matches_repeated_product(self, symmetric):
        m = sp.unit_cell_s1(0.37, symmetric)
        direct = np.eye(2, dtype=complex)
        for _ in range(13):
            direct = direct @ m
        assert np.abs(sp.matrix_power_2x2(m, 13) - direct).max() < 1e-12
