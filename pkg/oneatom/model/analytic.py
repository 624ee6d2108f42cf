"""Closed-form solution of the effective two-level dynamics.

In the third interaction picture the Magnus series stops after two terms, so the
field branches are exact coherent states |alpha_plus>, |alpha_minus> and
time-ordering only shifts the relative phase phi.
"""
import cmath
import logging
import math
from typing import Sequence, Tuple

import numpy as np
from scipy.optimize import brentq

from oneatom.core.errors import ContractViolationError, ZeroProbabilityError
from oneatom.core.objects import DEFAULT_WEIGHTS, Branch, CatState, Ordering, SystemParams
from oneatom.fock.space import FockVector
from oneatom.fock.states import superposition
from oneatom.util import excess_over_sine, reduce_phase, reduced_angle, scaled_sine

ZERO_PROBABILITY = 1e-14
COHERENT_WIGNER_SIGMA = 0.5


def _check_time(t: float) -> float:
    if not t >= 0:
        raise ContractViolationError("time must be non-negative, got %r" % (t,))
    return float(t)


def alpha_pm(t: float, params: SystemParams, sign: Branch) -> complex:
    """alpha_plus = -r(1 - e^{-i delta t}), alpha_minus = r(1 - e^{i delta t})"""
    theta = reduced_angle(params.delta, _check_time(t))
    return -sign.sign * params.r * (1.0 - cmath.exp(-1j * sign.sign * theta))


def amplitudes(t: float, params: SystemParams) -> Tuple[complex, complex]:
    return alpha_pm(t, params, Branch.plus), alpha_pm(t, params, Branch.minus)


def phase_no_ordering(t: float, params: SystemParams) -> float:
    """(Omega12 + r^2 delta) t reduced to [0, 2pi)."""
    t = _check_time(t)
    return reduce_phase((params.omega12, t), (params.r, params.r, params.delta, t))


def ordering_correction(t: float, params: SystemParams) -> float:
    """r^2 (delta t - sin delta t); not reduced, it grows monotonically."""
    return excess_over_sine(params.r**2, params.delta, _check_time(t))


def phase_exact(t: float, params: SystemParams) -> float:
    """Omega12 t + r^2 sin(delta t) reduced to [0, 2pi)."""
    t = _check_time(t)
    return reduce_phase((params.omega12, t), scaled_sine(params.r**2, params.delta, t))


def phase(t: float, params: SystemParams, ordering: Ordering) -> float:
    if ordering is Ordering.with_ordering:
        return phase_exact(t, params)
    return phase_no_ordering(t, params)


def coherent_overlap(alpha: complex, beta: complex) -> complex:
    """<alpha|beta> = exp(-|alpha|^2/2 - |beta|^2/2 + alpha* beta)"""
    alpha, beta = complex(alpha), complex(beta)
    return cmath.exp(-0.5 * abs(alpha) ** 2 - 0.5 * abs(beta) ** 2 + alpha.conjugate() * beta)


def _unit_weights(weights: Sequence[complex]) -> Tuple[complex, complex]:
    w_plus, w_minus = (complex(w) for w in weights)
    length = math.sqrt(abs(w_plus) ** 2 + abs(w_minus) ** 2)
    if length == 0.0:
        raise ContractViolationError("initial atomic weights are both zero")
    return w_plus / length, w_minus / length


def _mixing(cat: CatState) -> Tuple[float, float, complex, float]:
    """|c1|^2, |c2|^2, c1* c2 <alpha_plus|alpha_minus> and their sum Z = 2 prob."""
    c1, c2 = cat.coefficients()
    p1, p2 = abs(c1) ** 2, abs(c2) ** 2
    s = c1.conjugate() * c2 * coherent_overlap(cat.alpha_plus, cat.alpha_minus)
    return p1, p2, s, p1 + p2 + 2.0 * s.real


def make_cat(
    alpha_plus: complex,
    alpha_minus: complex,
    phi: float,
    branch: Branch,
    ordering: Ordering = Ordering.with_ordering,
    weights: Sequence[complex] = DEFAULT_WEIGHTS,
) -> CatState:
    """Conditional state for explicit amplitudes and phase."""
    draft = CatState(
        alpha_plus=complex(alpha_plus),
        alpha_minus=complex(alpha_minus),
        phi=float(phi),
        branch=branch,
        norm=1.0,
        prob=1.0,
        ordering=ordering,
        weights=_unit_weights(weights),
    )
    _, _, _, z = _mixing(draft)
    prob = min(1.0, max(0.0, 0.5 * z))
    if prob < ZERO_PROBABILITY:
        raise ZeroProbabilityError(
            "probability %.3e of detecting the atom in the %s branch is zero" % (prob, branch.name)
        )
    return CatState(
        alpha_plus=draft.alpha_plus,
        alpha_minus=draft.alpha_minus,
        phi=draft.phi,
        branch=branch,
        norm=1.0 / math.sqrt(z),
        prob=prob,
        ordering=ordering,
        weights=draft.weights,
    )


def conditional_state(
    t: float,
    params: SystemParams,
    branch: Branch,
    ordering: Ordering = Ordering.with_ordering,
    weights: Sequence[complex] = DEFAULT_WEIGHTS,
) -> CatState:
    """Field state after the atom, started in |1>|vac> by default, is detected at time t."""
    alpha_plus, alpha_minus = amplitudes(t, params)
    return make_cat(alpha_plus, alpha_minus, phase(t, params, ordering), branch, ordering, weights)


def detection_probabilities(
    t: float, params: SystemParams, ordering: Ordering, weights: Sequence[complex] = DEFAULT_WEIGHTS
) -> Tuple[float, float]:
    """(p_plus, p_minus) without raising on a vanishing outcome."""
    probs = []
    for branch in (Branch.plus, Branch.minus):
        try:
            probs.append(conditional_state(t, params, branch, ordering, weights).prob)
        except ZeroProbabilityError:
            probs.append(0.0)
    return probs[0], probs[1]


def overlap_q(t: float, params: SystemParams, ordering: Ordering = Ordering.with_ordering) -> complex:
    """q = <alpha_plus|alpha_minus> e^{2 i phi}"""
    alpha_plus, alpha_minus = amplitudes(t, params)
    return coherent_overlap(alpha_plus, alpha_minus) * cmath.exp(2j * phase(t, params, ordering))


def cat_to_fock(cat: CatState, dim: int) -> FockVector:
    c1, c2 = cat.coefficients()
    return superposition((cat.norm * c1, cat.norm * c2), (cat.alpha_plus, cat.alpha_minus), dim)


def total_noise_closed_form(cat: CatState) -> float:
    """<a^dag a> - |<a>|^2 of the two-component state without leaving the coherent basis."""
    p1, p2, _, z = _mixing(cat)
    if 0.5 * z < ZERO_PROBABILITY:
        raise ZeroProbabilityError("degenerate normalization 2 +/- q +/- q* for the %s branch" % cat.branch.name)
    separation = abs(cat.alpha_plus - cat.alpha_minus) ** 2
    return max(0.0, p1 * p2 * separation * -math.expm1(-separation) / (z * z))


def mean_photon_number_closed_form(cat: CatState) -> float:
    p1, p2, s, z = _mixing(cat)
    if 0.5 * z < ZERO_PROBABILITY:
        raise ZeroProbabilityError("degenerate normalization for the %s branch" % cat.branch.name)
    a, b = cat.alpha_plus, cat.alpha_minus
    value = p1 * abs(a) ** 2 + p2 * abs(b) ** 2 + 2.0 * (s * a.conjugate() * b).real
    return value / z


def parity_closed_form(cat: CatState) -> float:
    """Average parity using (-1)^{a^dag a}|alpha> = |-alpha>."""
    p1, p2, _, z = _mixing(cat)
    if 0.5 * z < ZERO_PROBABILITY:
        raise ZeroProbabilityError("degenerate normalization for the %s branch" % cat.branch.name)
    c1, c2 = cat.coefficients()
    a, b = cat.alpha_plus, cat.alpha_minus
    cross = c1.conjugate() * c2 * coherent_overlap(a, -b)
    value = p1 * math.exp(-2.0 * abs(a) ** 2) + p2 * math.exp(-2.0 * abs(b) ** 2) + 2.0 * cross.real
    return value / z


def odd_state_photon_number(alpha: complex) -> float:
    """|alpha|^2 coth |alpha|^2"""
    x = abs(alpha) ** 2
    if x == 0.0:
        return 1.0
    return x / math.tanh(x)


def even_state_photon_number(alpha: complex) -> float:
    """|alpha|^2 tanh |alpha|^2"""
    x = abs(alpha) ** 2
    return x * math.tanh(x)


def yurke_stoler_photon_number(alpha: complex) -> float:
    return abs(alpha) ** 2


def critical_radius(fraction: float = 0.1) -> float:
    """r at which the phase shift at half period reaches ``fraction`` of the phase period pi."""
    if not 0 < fraction:
        raise ContractViolationError("fraction must be positive, got %r" % fraction)
    target = fraction * math.pi
    reference = SystemParams.dimensionless(1.0, 1.0)

    def excess(r: float) -> float:
        return ordering_correction(reference.t0 / 2.0, SystemParams.dimensionless(r, 1.0)) - target

    upper = 1.0
    while excess(upper) < 0:
        upper *= 2.0
    r_c = brentq(excess, 0.0, upper, xtol=1e-15, rtol=1e-15)
    logging.debug("critical radius for fraction %s: %.12f", fraction, r_c)
    return r_c


def trajectory(params: SystemParams, n_points: int = 256) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """t/t0 samples over one period and the two amplitude circles."""
    if n_points < 2:
        raise ContractViolationError("need at least two trajectory points")
    fractions = np.linspace(0.0, 1.0, n_points)
    plus = np.array([alpha_pm(f * params.t0, params, Branch.plus) for f in fractions])
    minus = np.array([alpha_pm(f * params.t0, params, Branch.minus) for f in fractions])
    return fractions, plus, minus
