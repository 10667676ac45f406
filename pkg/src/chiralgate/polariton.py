"""Polariton band structure of the infinite array.

The photon-mediated spin model of the array has plane-wave eigenstates whose
dispersion, in the Markov limit, is the two-cotangent band

    omega(q) = -(Gamma_a/2) cot[(q d + dk/2)/2] - (Gamma_b/2) cot[(q d - dk/2)/2],

with poles at ``q d = -/+ dk/2`` (mod 2*pi).  Between consecutive poles the
dispersion rises monotonically from -inf to +inf, giving two bands for any
``dk`` strictly inside (0, 2*pi): the "minus" band through ``q d = 0`` and
the "plus" band through ``q d = pi``.  With retardation the dispersion turns
into a self-consistent equation solved numerically by :func:`exact_omega`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .model import BandCollapseError, ModelParams

TWO_PI = 2.0 * np.pi

_POLE_TOL = 1e-8


class DivergentBandEdgeError(ValueError):
    """A quasimomentum was requested too close to a dispersion pole."""


class NoRootError(RuntimeError):
    """Band inversion or the retarded dispersion failed to bracket a root."""


def _pole_distance(x):
    """Distance of the half-argument ``x`` from the cotangent poles (mod pi)."""
    return np.abs((x + 0.5 * np.pi) % np.pi - 0.5 * np.pi)


def _check_poles(q_d, params: ModelParams):
    x1 = 0.5 * (np.asarray(q_d, dtype=float) + 0.5 * params.delta_k_d)
    x2 = 0.5 * (np.asarray(q_d, dtype=float) - 0.5 * params.delta_k_d)
    if np.any(_pole_distance(x1) < _POLE_TOL) or np.any(_pole_distance(x2) < _POLE_TOL):
        raise DivergentBandEdgeError(
            f"quasimomentum phase {q_d!r} is within {_POLE_TOL} of a band-edge pole"
        )


def markov_omega(q_d, params: ModelParams):
    """Markovian polariton dispersion ``omega(q) - omega0`` at phase ``q_d``."""
    _check_poles(q_d, params)
    q_d = np.asarray(q_d, dtype=float)
    x1 = 0.5 * (q_d + 0.5 * params.delta_k_d)
    x2 = 0.5 * (q_d - 0.5 * params.delta_k_d)
    out = -0.5 * params.gamma_a / np.tan(x1) - 0.5 * params.gamma_b / np.tan(x2)
    return float(out) if out.ndim == 0 else out


def group_velocity(q_d, params: ModelParams):
    """Group velocity ``d omega / d q`` (units of Gamma*d), always positive."""
    _check_poles(q_d, params)
    q_d = np.asarray(q_d, dtype=float)
    x1 = 0.5 * (q_d + 0.5 * params.delta_k_d)
    x2 = 0.5 * (q_d - 0.5 * params.delta_k_d)
    out = 0.25 * params.gamma_a / np.sin(x1) ** 2 + 0.25 * params.gamma_b / np.sin(x2) ** 2
    return float(out) if out.ndim == 0 else out


def band_bracket(band: str, params: ModelParams) -> tuple[float, float]:
    """Open pole-to-pole interval supporting the requested band.

    The minus band is the monotone branch through ``q d = 0``, bracketed by
    the poles at ``-/+ dk/2``; the plus band is the complementary branch
    through ``q d = pi`` on ``(dk/2, 2*pi - dk/2)``.  Values returned for the
    plus band are therefore not wrapped into the first Brillouin zone.
    """
    dk = params.delta_k_d
    if min(abs(dk), abs(dk - TWO_PI)) < 1e-12:
        raise BandCollapseError(
            f"two distinct bands require delta_k_d strictly inside (0, 2*pi): {dk}"
        )
    if band == "minus":
        return (-0.5 * dk, 0.5 * dk)
    if band == "plus":
        return (0.5 * dk, TWO_PI - 0.5 * dk)
    raise ValueError(f"band must be 'minus' or 'plus': {band!r}")


def band_invert(delta: float, band: str, params: ModelParams) -> float:
    """Quasimomentum phase with ``markov_omega(q_d) = delta`` on one band.

    Each band is strictly monotone (the group velocity is a sum of positive
    terms), so the root is unique on its pole-to-pole bracket and is found by
    bisection; the returned phase satisfies the dispersion to 1e-12.
    """
    lo, hi = band_bracket(band, params)

    def f(q):
        return markov_omega(q, params) - delta

    # approach both poles until the monotone branch brackets the root
    span = hi - lo
    eps = 1e-3 * span
    for _ in range(60):
        a, b = lo + eps, hi - eps
        if f(a) < 0.0 < f(b):
            break
        eps *= 0.1
        if eps < 1e-15 * span:
            raise NoRootError(
                f"no root in {band} band bracket for delta = {delta}"
            )
    else:
        raise NoRootError(f"no root in {band} band bracket for delta = {delta}")

    q = brentq(f, a, b, xtol=1e-15, rtol=8.9e-16, maxiter=200)
    if abs(markov_omega(q, params) - delta) > 1e-12 * max(1.0, abs(delta)):
        raise NoRootError(
            f"band inversion residual too large at delta = {delta}, band = {band}"
        )
    return float(q)


def _retarded_rhs(delta: float, q_d: float, params: ModelParams) -> float:
    """Right-hand side of the self-consistent retarded dispersion."""
    shift = delta * params.inv_c
    x1 = 0.5 * (q_d + 0.5 * params.delta_k_d - shift)
    x2 = 0.5 * (q_d - 0.5 * params.delta_k_d - shift)
    if _pole_distance(x1) < _POLE_TOL or _pole_distance(x2) < _POLE_TOL:
        raise DivergentBandEdgeError(
            f"retarded dispersion pole at q_d = {q_d}, delta = {delta}"
        )
    return -0.5 * params.gamma_a / np.tan(x1) - 0.5 * params.gamma_b / np.tan(x2)


def exact_omega(q_d: float, params: ModelParams, residual_tol: float = 1e-10) -> float:
    """Retardation-corrected dispersion at fixed ``q_d`` (requires ``inv_c > 0``).

    Solves ``delta = rhs(delta)`` where the propagation phases inside the
    cotangents are shifted by ``delta * inv_c``.  A damped fixed-point
    iteration seeded with the Markovian value localizes the root, which is
    then polished by bracketed bisection; the residual of the self-consistent
    equation at the returned value is below ``residual_tol``.
    """
    if not params.inv_c > 0.0:
        raise ValueError("exact_omega requires inv_c > 0; use markov_omega instead")

    delta = markov_omega(q_d, params)

    def residual(x):
        return _retarded_rhs(x, q_d, params) - x

    r = residual(delta)
    for _ in range(200):
        if abs(r) < 0.25 * residual_tol:
            break
        step = 0.5 * r
        # keep the cotangent arguments away from their poles
        while True:
            try:
                r_new = residual(delta + step)
                break
            except DivergentBandEdgeError:
                step *= 0.5
                if abs(step) < 1e-16:
                    raise
        if abs(r_new) > 0.9 * abs(r):
            delta += step
            r = r_new
            break
        delta += step
        r = r_new

    if abs(r) >= 0.25 * residual_tol:
        # bracket around the fixed-point estimate and bisect
        width = max(10.0 * abs(r), 1e-12)
        for _ in range(80):
            a, b = delta - width, delta + width
            try:
                ra, rb = residual(a), residual(b)
            except DivergentBandEdgeError:
                width *= 0.5
                continue
            if ra * rb < 0.0:
                delta = brentq(residual, a, b, xtol=1e-15, rtol=8.9e-16, maxiter=200)
                break
            width *= 2.0
        r = residual(delta)
        if abs(r) > residual_tol:
            raise NoRootError(
                f"retarded dispersion did not converge at q_d = {q_d}: "
                f"last residual {r:.3e}"
            )
    return float(delta)


def resonant_delays(params: ModelParams) -> tuple[float, float, float]:
    """Per-cell delays of the resonant polaritons and the crossing delay.

    Returns ``(tau_plus, tau_minus, initial_delay)`` with
    ``tau_plus = 4 cos^2(dk/4)``, ``tau_minus = 4 sin^2(dk/4)`` (each equal to
    ``d / v_g`` at the corresponding resonant momentum) and the initial delay
    ``(tau_minus - tau_plus) * N / 2`` that makes equal-bandwidth wavepackets
    cross at the middle of the array.
    """
    dk = params.delta_k_d
    if min(abs(dk), abs(dk - TWO_PI)) < 1e-12:
        raise BandCollapseError(
            f"resonant delays undefined at band collapse, delta_k_d = {dk}"
        )
    tau_plus = 4.0 * np.cos(0.25 * dk) ** 2
    tau_minus = 4.0 * np.sin(0.25 * dk) ** 2
    tau = 0.5 * (tau_minus - tau_plus) * params.n_emitters
    return float(tau_plus), float(tau_minus), float(tau)


@dataclass(frozen=True)
class ResonantBands:
    """Resonant momenta and per-cell delays read off the actual bands.

    For symmetric couplings the momenta are exactly {0, pi} and the delays
    reduce to the closed forms of :func:`resonant_delays`; with asymmetric
    couplings the resonant momenta shift linearly in ``gamma_a - gamma_b``
    and these values keep the transfer phases and delays consistent.
    """

    q_plus_d: float
    q_minus_d: float
    tau_plus: float
    tau_minus: float
    initial_delay: float


def resonant_bands(params: ModelParams) -> ResonantBands:
    """Invert both bands at resonance and derive the crossing delay."""
    q_minus = band_invert(0.0, "minus", params)
    q_plus = band_invert(0.0, "plus", params)
    tau_plus = 1.0 / group_velocity(q_plus, params)
    tau_minus = 1.0 / group_velocity(q_minus, params)
    return ResonantBands(
        q_plus_d=q_plus,
        q_minus_d=q_minus,
        tau_plus=tau_plus,
        tau_minus=tau_minus,
        initial_delay=0.5 * (tau_minus - tau_plus) * params.n_emitters,
    )


@dataclass(frozen=True)
class BandPoint:
    """One sample of a polariton band: phase, band label, energy, velocity."""

    q_d: float
    band: str
    omega: float
    v_g: float


def dispersion_curve(
    params: ModelParams,
    n_points: int = 256,
    exact: bool = False,
    edge_margin: float = 1e-3,
) -> list[BandPoint]:
    """Sample both bands on their pole-free arcs, for tabulation and plotting.

    Quasimomentum phases are wrapped into [-pi, pi).  With ``exact=True`` the
    retarded dispersion is solved at every sample (requires ``inv_c > 0``).
    """
    points: list[BandPoint] = []
    for band in ("minus", "plus"):
        lo, hi = band_bracket(band, params)
        margin = edge_margin * (hi - lo)
        qs = np.linspace(lo + margin, hi - margin, n_points)
        for q in qs:
            omega = exact_omega(q, params) if exact else markov_omega(q, params)
            q_wrapped = (q + np.pi) % TWO_PI - np.pi
            points.append(
                BandPoint(
                    q_d=float(q_wrapped),
                    band=band,
                    omega=float(omega),
                    v_g=float(group_velocity(q, params)),
                )
            )
    return points
