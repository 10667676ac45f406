"""Single-photon scattering of the emitter array and the beam splitter.

A single frequency component scatters elastically, so everything in this
module is a 2x2 complex matrix acting on the (a, b) channel amplitude pair at
fixed detuning ``delta``:

* :func:`emitter_t` -- bare transmission matrix of one emitter,
* :func:`unit_cell_s1` -- emitter dressed with half-cell propagation phases
  on each side,
* :func:`transfer_eigen` -- eigenstates of the unit cell (the channel
  superpositions scattering without mixing) and their per-cell phases,
* :func:`beam_splitter_t` -- the linear scatterer that maps resonant channel
  photons onto the symmetric/antisymmetric superpositions,
* :func:`chain_g1` -- the full gate chain, splitter * (unit cell)^N * splitter.

All functions broadcast over ``delta``: passing an array of shape ``(n,)``
returns matrices of shape ``(n, 2, 2)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import BandCollapseError, GateConfig, ModelParams

_BAND_COLLAPSE_TOL = 1e-12


def _scatterer_t(delta, ga: float, gb: float, gl: float) -> np.ndarray:
    """Transmission matrix of a two-level scatterer with raw couplings."""
    delta = np.asarray(delta, dtype=float)
    den = gl + ga + gb - 2j * delta
    t = np.empty(delta.shape + (2, 2), dtype=complex)
    t[..., 0, 0] = (gl + gb - ga - 2j * delta) / den
    t[..., 1, 1] = (gl + ga - gb - 2j * delta) / den
    t[..., 0, 1] = t[..., 1, 0] = -2.0 * np.sqrt(ga * gb) / den
    return t


def emitter_t(delta, params: ModelParams) -> np.ndarray:
    """Transmission matrix of a single emitter at detuning ``delta``.

    The diagonal entries are ``(gamma + Gamma_b - Gamma_a - 2i delta) / D``
    (and a<->b), the off-diagonal ones ``-2 sqrt(Gamma_a Gamma_b) / D``, with
    the common denominator ``D = gamma + Gamma_a + Gamma_b - 2i delta``.  The
    denominator never vanishes for real detuning, and for ``gamma_loss = 0``
    the matrix is unitary (probability conservation per channel).
    """
    return _scatterer_t(delta, params.gamma_a, params.gamma_b, params.gamma_loss)


def propagation_phases(delta, params: ModelParams) -> tuple[np.ndarray, np.ndarray]:
    """Half-cell propagation phases ``exp(i k_alpha(delta) d / 2)`` per channel.

    In the Markov limit (``inv_c = 0``) the phases are frozen at their
    resonant values ``k_alpha d = k0 d -/+ delta_k_d / 2``; with retardation
    they gain the linear dispersion ``delta * inv_c``.
    """
    delta = np.asarray(delta, dtype=float)
    shift = delta * params.inv_c
    pa = np.exp(0.5j * (params.k_a_d + shift))
    pb = np.exp(0.5j * (params.k_b_d + shift))
    return pa, pb


def unit_cell_s1(delta, params: ModelParams) -> np.ndarray:
    """Single-photon S-matrix of one unit cell, ``P1 . s1 . P1``.

    The unit cell is one emitter framed by free propagation over half a cell
    on each side, so each matrix element picks up the product of the in- and
    out-channel half-cell phases.
    """
    t = emitter_t(delta, params)
    pa, pb = propagation_phases(delta, params)
    s = np.empty_like(t)
    s[..., 0, 0] = pa * pa * t[..., 0, 0]
    s[..., 0, 1] = pa * pb * t[..., 0, 1]
    s[..., 1, 0] = pb * pa * t[..., 1, 0]
    s[..., 1, 1] = pb * pb * t[..., 1, 1]
    return s


def mixing_angle(delta, params: ModelParams):
    """Mixing angle ``theta`` of the lossless transfer eigenstates.

    ``cot(theta) = (Gamma_b - Gamma_a) cos(dk/2) / (2 sqrt(Gamma_a Gamma_b))
    - delta sin(dk/2) / sqrt(Gamma_a Gamma_b)``, with the arccot branch taken
    in (0, pi) so the eigenvectors rotate continuously through resonance.
    """
    delta = np.asarray(delta, dtype=float)
    ga, gb = params.gamma_a, params.gamma_b
    half_dk = 0.5 * params.delta_k_d
    root = np.sqrt(ga * gb)
    with np.errstate(divide="ignore"):
        cot = (gb - ga) * np.cos(half_dk) / (2.0 * root) - delta * np.sin(half_dk) / root
    return np.arctan2(1.0, cot)


@dataclass(frozen=True)
class TransferEigen:
    """Eigen-decomposition of the unit-cell S-matrix at one detuning.

    ``q_plus_d`` / ``q_minus_d`` are the per-cell phases beyond the gauge
    phase ``k0_d`` (complex when ``gamma_loss > 0``, the imaginary part
    encoding per-cell attenuation).  The branch windows are chosen to match
    the band supports: the minus phase lies in (-pi, pi], the plus phase in
    [0, 2*pi).  ``eigvec_plus`` is ``(sin(theta/2), cos(theta/2))`` and
    ``eigvec_minus`` is ``(cos(theta/2), -sin(theta/2))`` in the (a, b) basis.
    """

    theta: float
    q_plus_d: complex
    q_minus_d: complex
    eigvec_plus: np.ndarray
    eigvec_minus: np.ndarray


def transfer_eigen(delta: float, params: ModelParams) -> TransferEigen:
    """Diagonalize the unit-cell S-matrix at one detuning.

    For ``gamma_loss = 0`` the eigenvectors are the closed-form real
    rotations by ``theta/2``; with loss the matrix is diagonalized
    numerically and the bands are labeled by overlap with the lossless
    eigenvectors at the same detuning (continuity from the resonant
    assignment).  Both bands collapse when ``delta_k_d`` is 0 or 2*pi, which
    is reported as an error.
    """
    dk = params.delta_k_d
    if min(abs(dk), abs(dk - 2.0 * np.pi)) < _BAND_COLLAPSE_TOL:
        raise BandCollapseError(
            f"transfer eigenstates are degenerate at delta_k_d = {dk}"
        )
    theta = float(mixing_angle(delta, params))
    v_plus = np.array([np.sin(0.5 * theta), np.cos(0.5 * theta)])
    v_minus = np.array([np.cos(0.5 * theta), -np.sin(0.5 * theta)])
    s1 = unit_cell_s1(float(delta), params)

    if params.gamma_loss == 0.0:
        lam_plus = v_plus @ s1 @ v_plus
        lam_minus = v_minus @ s1 @ v_minus
        vec_plus, vec_minus = v_plus, v_minus
    else:
        lam, vecs = np.linalg.eig(s1)
        overlaps = np.abs(v_plus @ vecs)
        i_plus = int(np.argmax(overlaps))
        i_minus = 1 - i_plus
        lam_plus, lam_minus = lam[i_plus], lam[i_minus]
        vec_plus = vecs[:, i_plus]
        vec_minus = vecs[:, i_minus]

    gauge = np.exp(-1j * params.k0_d)
    q_plus = -1j * np.log(lam_plus * gauge)
    q_minus = -1j * np.log(lam_minus * gauge)
    # branch windows matching the band arcs: minus in (-pi, pi], plus in [0, 2*pi)
    if q_plus.real < 0.0:
        q_plus += 2.0 * np.pi
    if params.gamma_loss == 0.0:
        q_plus, q_minus = q_plus.real, q_minus.real
    return TransferEigen(
        theta=theta,
        q_plus_d=q_plus,
        q_minus_d=q_minus,
        eigvec_plus=vec_plus,
        eigvec_minus=vec_minus,
    )


def beam_splitter_t(delta, config: GateConfig) -> np.ndarray:
    """Transmission matrix of the beam-splitter scatterer.

    This is the emitter transmission matrix evaluated with the splitter
    couplings (defaults ``(2 +/- sqrt(2))/4``) and no loss; the splitter is
    an ideal linear element.  On resonance it maps a -> -(a+b)/sqrt(2) and
    b -> -(a-b)/sqrt(2), and applying it twice returns the identity.
    """
    return _scatterer_t(delta, config.bs_gamma_a, config.bs_gamma_b, 0.0)


def matrix_power_2x2(mats: np.ndarray, n: int) -> np.ndarray:
    """``mats ** n`` for a stack of 2x2 matrices via repeated squaring."""
    if n < 0:
        raise ValueError("negative matrix power")
    result = np.zeros_like(mats)
    result[..., 0, 0] = 1.0
    result[..., 1, 1] = 1.0
    base = mats
    k = n
    while k > 0:
        if k & 1:
            result = result @ base
        k >>= 1
        if k:
            base = base @ base
    return result


def chain_g1(delta, params: ModelParams, config: GateConfig) -> np.ndarray:
    """Global single-photon S-matrix of the gate: splitter * S1^N * splitter."""
    s1n = matrix_power_2x2(unit_cell_s1(delta, params), params.n_emitters)
    t_bs = beam_splitter_t(delta, config)
    return t_bs @ s1n @ t_bs
