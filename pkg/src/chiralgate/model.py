"""Physical parameters, unit conventions and frequency grids shared by all modules.

Unit conventions used throughout the package:

* the total guided decay rate ``Gamma = gamma_a + gamma_b`` is the unit of
  energy and is normalized to 1, so all frequencies are detunings
  ``delta = omega - omega0`` measured in units of ``Gamma``;
* the emitter spacing ``d`` is the unit of length, so quasimomenta appear
  only through the phases ``q*d``;
* times are measured in ``1/Gamma``.

With these conventions every scattering quantity depends only on the ratios
stored in :class:`ModelParams`.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, asdict
from typing import Any

import numpy as np

TWO_PI = 2.0 * np.pi

#: couplings of the beam-splitter scatterer, (2 +/- sqrt(2))/4 of Gamma
BS_GAMMA_A = (2.0 + np.sqrt(2.0)) / 4.0
BS_GAMMA_B = (2.0 - np.sqrt(2.0)) / 4.0


class ValidationError(ValueError):
    """A parameter record violates one of its invariants."""


class BandCollapseError(ValueError):
    """The two polariton bands degenerate into one (``delta_k_d`` in {0, 2*pi})."""


class GridCoverageError(ValueError):
    """A frequency grid is too small to hold the requested state."""


@dataclass(frozen=True)
class ModelParams:
    """Parameters of the emitter array coupled to the two chiral modes.

    Attributes
    ----------
    gamma_a, gamma_b:
        Decay rates into waveguide channels a and b.  The normalization
        convention ``gamma_a + gamma_b = 1`` fixes the energy unit.
    gamma_loss:
        Decay rate into non-guided channels (same units).
    delta_k_d:
        Multi-mode phase difference ``(k_b - k_a) d`` in radians, in [0, 2*pi).
    k0_d:
        Mean resonant momentum phase ``(k_a + k_b) d / 2``.  Pure gauge: it
        cancels between exact and ideal outputs in every fidelity, and
        defaults to 0.
    n_emitters:
        Number of unit cells in the array.
    inv_c:
        Retardation parameter ``Gamma d / c``.  0 selects the Markov limit
        (infinite light speed between emitters), which is the default for
        all gate computations.
    """

    gamma_a: float = 0.5
    gamma_b: float = 0.5
    gamma_loss: float = 0.0
    delta_k_d: float = 1.5 * np.pi
    k0_d: float = 0.0
    n_emitters: int = 30
    inv_c: float = 0.0

    def __post_init__(self):
        validate(self)

    @property
    def gamma_total(self) -> float:
        """Total decay rate ``gamma_a + gamma_b + gamma_loss`` (enters the
        single-emitter resonance width)."""
        return self.gamma_a + self.gamma_b + self.gamma_loss

    @property
    def k_a_d(self) -> float:
        """Resonant momentum phase of channel a, ``k0_d - delta_k_d/2``."""
        return self.k0_d - 0.5 * self.delta_k_d

    @property
    def k_b_d(self) -> float:
        """Resonant momentum phase of channel b, ``k0_d + delta_k_d/2``."""
        return self.k0_d + 0.5 * self.delta_k_d

    def replace(self, **changes) -> "ModelParams":
        d = asdict(self)
        d.update(changes)
        return ModelParams(**d)


def validate(params: ModelParams) -> ModelParams:
    """Check all :class:`ModelParams` invariants, reporting the first violation.

    Returns the record unchanged when valid, so the call is idempotent.
    """
    if not params.gamma_a >= 0.0:
        raise ValidationError(f"negative rate: gamma_a = {params.gamma_a}")
    if not params.gamma_b >= 0.0:
        raise ValidationError(f"negative rate: gamma_b = {params.gamma_b}")
    if abs(params.gamma_a + params.gamma_b - 1.0) > 1e-9:
        raise ValidationError(
            "normalization: gamma_a + gamma_b must equal 1, got "
            f"{params.gamma_a + params.gamma_b!r}"
        )
    if not params.gamma_loss >= 0.0:
        raise ValidationError(f"negative rate: gamma_loss = {params.gamma_loss}")
    if not (0.0 <= params.delta_k_d < TWO_PI):
        raise ValidationError(
            f"delta_k_d out of range [0, 2*pi): {params.delta_k_d}"
        )
    if not np.isfinite(params.k0_d):
        raise ValidationError(f"k0_d not finite: {params.k0_d}")
    if int(params.n_emitters) != params.n_emitters or params.n_emitters < 1:
        raise ValidationError(f"n_emitters must be a positive integer: {params.n_emitters}")
    if not params.inv_c >= 0.0:
        raise ValidationError(f"inv_c must be >= 0: {params.inv_c}")
    return params


@dataclass(frozen=True)
class GateConfig:
    """Pulse and beam-splitter settings of the gate protocol.

    ``tau`` is the initial delay imprinted on the a-channel photon so the two
    wavepackets cross mid-array; when ``None`` it is computed from the
    resonant per-cell delays as ``(tau_minus - tau_plus) * N / 2``.

    ``compensate_bs_delays`` subtracts the known first-order group delays of
    the two beam splitters from the ideal reference, so the fidelity measures
    gate error rather than a deterministic delay.  Toggleable for comparison.
    """

    sigma: float = 0.05
    tau: float | None = None
    bs_gamma_a: float = BS_GAMMA_A
    bs_gamma_b: float = BS_GAMMA_B
    phi_ideal: float = np.pi
    compensate_bs_delays: bool = True

    def __post_init__(self):
        if not self.sigma > 0.0:
            raise ValidationError(f"sigma must be > 0: {self.sigma}")
        if self.bs_gamma_a < 0.0 or self.bs_gamma_b < 0.0:
            raise ValidationError("beam-splitter couplings must be >= 0")

    def replace(self, **changes) -> "GateConfig":
        d = asdict(self)
        d.update(changes)
        return GateConfig(**d)


@dataclass(frozen=True)
class FrequencyGrid:
    """Uniform symmetric detuning grid with composite-trapezoid weights.

    The grid is uniform so that anti-diagonals ``delta1 + delta2 = const`` of
    the two-photon quadrature square are exact grid lines, and it always
    contains ``delta = 0`` as a node (odd point count).
    """

    points: np.ndarray
    weights: np.ndarray
    h: float

    def __post_init__(self):
        self.points.setflags(write=False)
        self.weights.setflags(write=False)

    @property
    def n(self) -> int:
        return self.points.size

    @property
    def half_width(self) -> float:
        return float(self.points[-1])

    @property
    def i_zero(self) -> int:
        """Index of the on-resonance node."""
        return (self.n - 1) // 2


def build_grid(half_width: float, n_points: int) -> FrequencyGrid:
    """Build a uniform grid on ``[-half_width, +half_width]`` centered at 0.

    ``n_points`` must be odd so the resonance sits exactly on a node, and at
    least 3.  The trapezoid weights sum to the interval length ``2*half_width``.
    """
    if not half_width > 0.0:
        raise ValidationError(f"half_width must be > 0: {half_width}")
    if n_points < 3:
        raise ValidationError(f"n_points must be >= 3: {n_points}")
    if n_points % 2 == 0:
        raise ValidationError(
            f"n_points must be odd so the resonance is a grid node: {n_points}"
        )
    m = (n_points - 1) // 2
    h = half_width / m
    # integer multiples of h keep the grid exactly symmetric with 0 on-node
    points = np.arange(-m, m + 1) * h
    weights = np.full(n_points, h)
    weights[0] = weights[-1] = 0.5 * h
    return FrequencyGrid(points=points, weights=weights, h=h)


@dataclass
class RunManifest:
    """Reproducibility record written next to every CLI output."""

    parameters: dict[str, Any]
    grid: dict[str, Any]
    code_version: str
    wall_seconds: float = 0.0
    output_digests: dict[str, str] = field(default_factory=dict)

    def add_file(self, name: str, payload: bytes) -> None:
        self.output_digests[name] = hashlib.sha256(payload).hexdigest()

    def as_dict(self) -> dict[str, Any]:
        return {
            "parameters": self.parameters,
            "grid": self.grid,
            "code_version": self.code_version,
            "wall_seconds": self.wall_seconds,
            "output_digests": self.output_digests,
        }
