"""Photon scattering and passive CZ-gate fidelity in chiral two-mode waveguide QED.

A periodic array of two-level emitters chirally coupled to two co-propagating
waveguide modes with different resonant momenta hosts two polariton bands
with distinct group velocities.  Two photons prepared in the two bands cross
inside the array and pick up a conditional pi phase; framed by two beam
splitters, the array acts as a passive CZ gate.  This package computes the
single- and two-photon scattering response and the resulting gate fidelity.
"""

from .model import (
    BS_GAMMA_A,
    BS_GAMMA_B,
    FrequencyGrid,
    GateConfig,
    ModelParams,
    RunManifest,
    build_grid,
    validate,
)
from .single_photon import (
    TransferEigen,
    beam_splitter_t,
    chain_g1,
    emitter_t,
    transfer_eigen,
    unit_cell_s1,
)
from .polariton import (
    BandPoint,
    ResonantBands,
    band_invert,
    dispersion_curve,
    exact_omega,
    group_velocity,
    markov_omega,
    resonant_bands,
    resonant_delays,
)
from .two_polariton import (
    ScatteringResult,
    TwoPolaritonInput,
    amplitudes,
    classify,
    degenerate_Q,
    resonance_scan,
    resonant_pair,
    scatter,
)
from .two_photon import (
    TwoPhotonState,
    apply_beam_splitter2,
    apply_chain,
    apply_unit_cell,
    bound_state_profile,
    build_input,
    gaussian_spectrum,
    ideal_outputs,
    inner,
    joint_spectral_density,
    plus_minus_ideal,
    plus_minus_input,
    product_state,
)
from .gate import (
    FidelityReport,
    SweepTable,
    default_gate_grid,
    fit_power_law,
    gate_fidelity,
    optimize_sigma,
    sweep,
)

__version__ = "0.1.0"
