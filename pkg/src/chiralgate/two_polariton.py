"""Two-polariton plane-wave scattering in the infinite-array spin model.

Two polaritons with quasimomenta ``q1, q2`` conserve their total
quasimomentum ``K = 2 k0 + q1 + q2`` and total energy, so a collision can
only move the relative momentum ``Q = (q1 - q2)/2`` to ``-Q`` (elastic
crossing) or to the unique degenerate value ``-Q'`` sharing energy and total
momentum (inelastic pair).  :func:`degenerate_Q` evaluates the closed form
for ``cos(Q' d)``; when it falls outside [-1, 1] the inelastic pair is
evanescent in the relative coordinate (``Im Q' d < 0``) and the collision is
a scattering resonance: the polaritons bind transiently and exit elastically
with the nonlinear phase ``arg(t_el)``, which is exactly pi on resonance.

:func:`amplitudes` solves the two-equation linear system for the elastic and
inelastic amplitudes.  Near the resonance the inelastic coefficients
``1 - i f(Q', .)`` vanish like ``exp(i Q' d)`` while ``t_in`` diverges, so
the solver works with the rescaled unknown ``t_in * exp(-i Q' d)`` and
closed-form coefficients that stay O(1); the reported residuals are those of
the original equations evaluated through the same stable factorization.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import ModelParams
from .polariton import band_invert, group_velocity, markov_omega

TWO_PI = 2.0 * np.pi

_IM_TOL = 1e-6  # classification tolerance on Im{Q' d}
_EL_TOL = 1e-6  # classification tolerance on |t_el|^2


class DegenerateDenominatorError(ValueError):
    """The closed form for cos(Q' d) is indeterminate (0/0)."""


class SingularSystemError(ValueError):
    """The amplitude system is singular at the requested momenta."""


def degenerate_Q(K_d: float, Q_d: float, params: ModelParams) -> complex:
    """Degenerate relative momentum phase ``Q' d`` for input ``(K d, Q d)``.

    Evaluates the closed form for ``cos(Q' d)`` with ``r = -Gamma_b/Gamma_a``
    and ``kappa = K/2 - k0``, then takes the arccos branch with
    ``Im{Q' d} <= 0`` so the inelastic ansatz term decays with the relative
    coordinate.  For a real result the sign is fixed by the outgoing
    ordering: the leading polariton of the scattered pair must be the faster
    one.  On resonance the denominator vanishes while the numerator stays
    finite; ``|cos(Q' d)|`` then diverges and ``-Im{Q' d}`` grows
    logarithmically, which is handled transparently.  A genuine 0/0
    (band collapse at ``delta_k_d`` in {0, 2*pi}) is reported as an error.
    """
    if params.gamma_a <= 0.0:
        raise ValueError("degenerate_Q requires gamma_a > 0")
    r = -params.gamma_b / params.gamma_a
    kap = 0.5 * K_d - params.k0_d
    half_dk = 0.5 * params.delta_k_d

    num = (
        2.0 * r * np.cos(half_dk + kap) ** 2 * np.sin(half_dk - kap)
        + np.cos(Q_d) * ((r - 1.0) * np.sin(2.0 * kap) - (r + 1.0) * np.sin(params.delta_k_d))
        + 2.0 * np.cos(half_dk - kap) ** 2 * np.sin(half_dk + kap)
    )
    den = 2.0 * (r - 1.0) * np.sin(kap) * (np.cos(Q_d) * np.cos(half_dk) - np.cos(kap)) + 2.0 * (
        r + 1.0
    ) * np.sin(half_dk) * (np.cos(half_dk) - np.cos(Q_d) * np.cos(kap))

    if den == 0.0:
        if abs(num) < 1e-12:
            raise DegenerateDenominatorError(
                f"cos(Q' d) is indeterminate at K_d = {K_d}, Q_d = {Q_d} "
                f"(delta_k_d = {params.delta_k_d})"
            )
        # exactly cancelled denominator with finite numerator: infinitely
        # tight binding; represent with the largest float the arccos handles
        den = np.copysign(5e-324, num)

    x = num / den
    qp = complex(np.emath.arccos(x))
    if abs(qp.imag) > 0.0:
        if qp.imag > 0.0:
            qp = qp.conjugate()
        return qp

    # real branch: pick the sign that makes the outgoing pair ordered
    # fastest-ahead, i.e. v_g(kappa - Q') >= v_g(kappa + Q')
    qp = abs(qp.real)
    with np.errstate(divide="ignore"):
        try:
            v_ahead = group_velocity(_wrap(kap - qp), params)
            v_behind = group_velocity(_wrap(kap + qp), params)
        except ValueError:
            return complex(qp)
    return complex(qp if v_ahead >= v_behind else -qp)


def _wrap(q_d: float) -> float:
    return (q_d + np.pi) % TWO_PI - np.pi


def _ab_coeff(p, y):
    """Coefficients ``1 + i f(p, y)`` and ``1 - i f(p, y)`` in stable closed form.

    ``f(x, y) = sin(x d) / [cos(x d) - cos(y d)]`` gives
    ``1 +/- i f = (exp(-/+ i p) - cos y) / (cos p - cos y)`` exactly.
    """
    den = np.cos(p) - np.cos(y)
    a = (np.exp(1j * p) - np.cos(y)) / den
    b = (np.exp(-1j * p) - np.cos(y)) / den
    return a, b


def _b_scaled(p, y):
    """``[1 - i f(p, y)] * exp(i p)``, evaluated without cancellation.

    Equal to ``(1 - cos(y) exp(i p)) / (cos p - cos y)``; stays O(1) as
    ``Im p -> -inf`` where the unscaled coefficient underflows to 0.
    """
    return (1.0 - np.cos(y) * np.exp(1j * p)) / (np.cos(p) - np.cos(y))


def amplitudes(
    K_d: float, Q_d: float, Qprime_d: complex, params: ModelParams
) -> tuple[complex, complex]:
    """Elastic and inelastic amplitudes ``(t_el, t_in)``.

    Solves the channel-pair system

        [1 + i f(Q, y_c)] + t_el [1 - i f(Q, y_c)] + t_in [1 - i f(Q', y_c)] = 0

    for ``y_c = k_c d - K d / 2`` with ``c`` in {a, b}, internally in the
    rescaled unknown ``t_in * exp(-i Q' d)`` so the solve stays
    well-conditioned through the scattering resonance.
    """
    y_a = params.k_a_d - 0.5 * K_d
    y_b = params.k_b_d - 0.5 * K_d

    rows = []
    rhs = []
    with np.errstate(divide="ignore", invalid="ignore"):
        for y in (y_a, y_b):
            # the kernel f(x, y) is singular on cos(x d) = cos(y d); treat an
            # (almost) exact hit as a singular system
            for x in (Q_d, Qprime_d):
                if abs(np.cos(x) - np.cos(y)) < 1e-8 * (1.0 + abs(np.cos(x))):
                    raise SingularSystemError(
                        f"kernel pole in the amplitude system at K_d = {K_d}, "
                        f"Q_d = {Q_d}, Q'_d = {Qprime_d!r} (y = {y})"
                    )
            a_in, b_el = _ab_coeff(Q_d, y)
            b_sc = _b_scaled(Qprime_d, y)
            # equilibrate: row scaling leaves the solution unchanged but keeps
            # the solve conditioned near pole boundaries
            scale = max(abs(a_in), abs(b_el), abs(b_sc))
            if not (np.isfinite(scale) and scale > 0.0):
                raise SingularSystemError(
                    f"kernel pole in the amplitude system at K_d = {K_d}, "
                    f"Q_d = {Q_d}, Q'_d = {Qprime_d!r} (y = {y})"
                )
            rows.append((b_el / scale, b_sc / scale))
            rhs.append(-a_in / scale)

    m = np.array(rows, dtype=complex)
    v = np.array(rhs, dtype=complex)
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    if not np.isfinite(det) or abs(det) < 1e-12:
        raise SingularSystemError(
            f"amplitude system is singular: determinant = {det!r} at "
            f"K_d = {K_d}, Q_d = {Q_d}, Q'_d = {Qprime_d!r}"
        )
    t_el = (v[0] * m[1, 1] - v[1] * m[0, 1]) / det
    t_in_scaled = (m[0, 0] * v[1] - m[1, 0] * v[0]) / det
    t_in = t_in_scaled * np.exp(1j * Qprime_d)
    return complex(t_el), complex(t_in)


def system_residual(
    K_d: float,
    Q_d: float,
    Qprime_d: complex,
    t_el: complex,
    t_in: complex,
    params: ModelParams,
) -> float:
    """Max modulus of the two amplitude equations at the given solution.

    The inelastic term is evaluated as
    ``(t_in exp(-i Q' d)) * ([1 - i f] exp(i Q' d))`` so the residual is
    meaningful even where both factors are individually extreme.
    """
    t_in_scaled = t_in * np.exp(-1j * Qprime_d)
    res = 0.0
    for y in (params.k_a_d - 0.5 * K_d, params.k_b_d - 0.5 * K_d):
        a_in, b_el = _ab_coeff(Q_d, y)
        b_sc = _b_scaled(Qprime_d, y)
        res = max(res, abs(a_in + t_el * b_el + t_in_scaled * b_sc))
    return res


def classify(t_el: complex, Qprime_d: complex) -> str:
    """Classify a collision as ``elastic``, ``inelastic`` or ``resonance``.

    Resonance: unit elastic probability with evanescent ``Q'``;
    inelastic: real ``Q'`` with elastic probability strictly below 1;
    elastic: unit elastic probability with real ``Q'``.
    """
    p_el = abs(t_el) ** 2
    evanescent = Qprime_d.imag < -_IM_TOL
    unit = abs(p_el - 1.0) <= _EL_TOL
    if unit and evanescent:
        return "resonance"
    if not evanescent and p_el < 1.0 - _EL_TOL:
        return "inelastic"
    if unit:
        return "elastic"
    raise ValueError(
        f"unclassifiable collision: |t_el|^2 = {p_el}, Im Q' d = {Qprime_d.imag}"
    )


@dataclass(frozen=True)
class TwoPolaritonInput:
    """Degenerate-detuning two-polariton input resolved into pair coordinates."""

    q1_d: float
    q2_d: float
    K_d: float
    Q_d: float
    delta: float
    E: float


def resonant_pair(delta: float, params: ModelParams) -> TwoPolaritonInput:
    """Input pair with one polariton per band at common detuning ``delta``.

    Both bands are inverted at the same energy and ordered so the slower
    polariton leads: ``q1 = q_minus`` for ``pi < dk < 2*pi`` and
    ``q1 = q_plus`` for ``0 < dk < pi``.  Quasimomenta are wrapped into
    [-pi, pi).
    """
    q_minus = _wrap(band_invert(delta, "minus", params))
    q_plus = _wrap(band_invert(delta, "plus", params))
    if params.delta_k_d > np.pi:
        q1, q2 = q_minus, q_plus
    else:
        q1, q2 = q_plus, q_minus
    K_d = 2.0 * params.k0_d + q1 + q2
    return TwoPolaritonInput(
        q1_d=q1,
        q2_d=q2,
        K_d=K_d,
        Q_d=0.5 * (q1 - q2),
        delta=delta,
        E=2.0 * delta,
    )


@dataclass(frozen=True)
class ScatteringResult:
    """Outcome of one two-polariton collision."""

    Qprime_d: complex
    t_el: complex
    t_in: complex
    label: str


def scatter(delta: float, params: ModelParams) -> ScatteringResult:
    """Full collision solution for the band-degenerate input at ``delta``."""
    pair = resonant_pair(delta, params)
    qp = degenerate_Q(pair.K_d, pair.Q_d, params)
    t_el, t_in = amplitudes(pair.K_d, pair.Q_d, qp, params)
    return ScatteringResult(Qprime_d=qp, t_el=t_el, t_in=t_in, label=classify(t_el, qp))


def resonance_scan(delta_grid, dk_grid, params: ModelParams) -> dict:
    """Collision maps over a (detuning x multi-mode phase) grid.

    Returns a dict of arrays of shape ``(len(delta_grid), len(dk_grid))``
    holding ``|t_el|^2``, ``arg(t_el)``, ``-Im{Q' d}`` and the classification
    label, plus a parallel array of per-cell error strings.  Columns at
    ``dk`` in {0, pi, 2*pi} are undefined (band collapse or equal group
    velocities) and recorded as such without aborting the scan.
    """
    delta_grid = np.asarray(delta_grid, dtype=float)
    dk_grid = np.asarray(dk_grid, dtype=float)
    shape = (delta_grid.size, dk_grid.size)
    p_el = np.full(shape, np.nan)
    arg_el = np.full(shape, np.nan)
    im_qp = np.full(shape, np.nan)
    labels = np.full(shape, "", dtype=object)
    errors = np.full(shape, "", dtype=object)

    for j, dk in enumerate(dk_grid):
        if min(abs(dk), abs(dk - np.pi), abs(dk - TWO_PI)) < 1e-12:
            errors[:, j] = f"undefined at delta_k_d = {dk}"
            continue
        pj = params.replace(delta_k_d=float(dk))
        for i, delta in enumerate(delta_grid):
            try:
                res = scatter(float(delta), pj)
            except (ValueError, RuntimeError) as exc:
                errors[i, j] = str(exc)
                continue
            p_el[i, j] = abs(res.t_el) ** 2
            arg_el[i, j] = np.angle(res.t_el)
            im_qp[i, j] = -res.Qprime_d.imag
            labels[i, j] = res.label
    return {
        "delta": delta_grid,
        "delta_k_d": dk_grid,
        "p_elastic": p_el,
        "arg_t_el": arg_el,
        "minus_im_Qprime_d": im_qp,
        "label": labels,
        "error": errors,
    }
