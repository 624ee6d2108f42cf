"""Locating parity extrema and Yurke-Stoler instants near half a period.

The conditional state of the plus branch is evaluated with the amplitudes held at
their t0/2 values, so every profile depends on time only through the fast phase.
Extremum instants of the with- and without-ordering profiles are paired and the
shift is converted to a phase with phi-tilde, whose rate is constant.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np
from scipy.optimize import minimize_scalar

from oneatom.core.objects import Branch, Ordering, SystemParams
from oneatom.data import OneAtomData
from oneatom.fock.space import recommended_dim
from oneatom.measures import relative_total_noise
from oneatom.model.analytic import (
    amplitudes,
    cat_to_fock,
    make_cat,
    ordering_correction,
    parity_closed_form,
    phase,
    phase_no_ordering,
)
from oneatom.util import phase_distance

SAMPLES_PER_HALF_TURN = 64
REFINE_TOLERANCE = 1e-12
CENTRE_FRACTION = 1e-3


@dataclass
class OffsetReport(OneAtomData):
    r: float = 0.0
    ratio: float = 0.0
    measure: str = "P"
    expected: float = 0.0
    offset: float = 0.0
    instants: List[float] = field(default_factory=list)
    phases_mod_pi: List[float] = field(default_factory=list)
    offsets: List[float] = field(default_factory=list)

    @property
    def error(self) -> float:
        return phase_distance(self.offset, self.expected, math.pi)


def frozen_profile(params: SystemParams, measure: str, ordering: Ordering) -> Callable[[float], float]:
    """Measure of psi_plus(t) with amplitudes fixed at t0/2."""
    alpha_plus, alpha_minus = amplitudes(0.5 * params.t0, params)
    dim = recommended_dim(max(abs(alpha_plus), abs(alpha_minus)))

    def profile(t: float) -> float:
        cat = make_cat(alpha_plus, alpha_minus, phase(t, params, ordering), Branch.plus, ordering)
        if measure == "P":
            return parity_closed_form(cat)
        if measure == "T_A":
            return relative_total_noise(cat_to_fock(cat, dim))
        raise ValueError("no frozen profile for measure %r" % measure)

    return profile


def _half_turn(params: SystemParams) -> float:
    """Time for the fast phase to advance by about pi near t0/2."""
    rate = max(params.omega12 - params.r**2 * params.delta, 0.1 * params.omega12)
    return math.pi / rate


def extremum_instants(
    profile: Callable[[float], float], t_lo: float, t_hi: float, kind: str, samples: int
) -> List[float]:
    """Refined local maxima (kind='max') or minima (kind='min') of a profile inside [t_lo, t_hi]."""
    sign = -1.0 if kind == "max" else 1.0
    grid = np.linspace(t_lo, t_hi, samples)
    values = np.array([sign * profile(t) for t in grid])
    found = []
    for i in range(1, samples - 1):
        if values[i] <= values[i - 1] and values[i] <= values[i + 1]:
            refined = minimize_scalar(
                lambda t: sign * profile(t),
                bounds=(grid[i - 1], grid[i + 1]),
                method="bounded",
                options={"xatol": REFINE_TOLERANCE},
            )
            if not found or abs(refined.x - found[-1]) > 10 * REFINE_TOLERANCE:
                found.append(float(refined.x))
    return found


def _nearest_pair(instants: List[float], centre: float, tolerance: float) -> List[float]:
    """The instant at the centre, or the closest instant on each side of it."""
    if not instants:
        return []
    closest = min(instants, key=lambda t: abs(t - centre))
    if abs(closest - centre) <= tolerance:
        return [closest]
    left = [t for t in instants if t < centre]
    right = [t for t in instants if t > centre]
    pair = []
    if left:
        pair.append(max(left))
    if right:
        pair.append(min(right))
    return pair


def measure_phase_offset(params: SystemParams, measure: str = "P") -> OffsetReport:
    """Phase by which the with-ordering curve of ``measure`` trails the naive one near t0/2.

    Parity is paired on its maxima (even-cat instants), T_A on its zeros
    (Yurke-Stoler instants).
    """
    kind = "max" if measure == "P" else "min"
    centre = 0.5 * params.t0
    half_turn = _half_turn(params)
    samples = int(3 * SAMPLES_PER_HALF_TURN)
    exact = frozen_profile(params, measure, Ordering.with_ordering)
    naive = frozen_profile(params, measure, Ordering.without_ordering)

    candidates = extremum_instants(exact, centre - 1.5 * half_turn, centre + 1.5 * half_turn, kind, samples)
    chosen = _nearest_pair(candidates, centre, CENTRE_FRACTION * half_turn)
    if not chosen:
        raise ValueError("no %s extremum found near t0/2" % measure)

    report = OffsetReport(
        r=params.r,
        ratio=params.ratio,
        measure=measure,
        expected=ordering_correction(centre, params) % math.pi,
    )
    for t_with in chosen:
        target = phase(t_with, params, Ordering.with_ordering) % math.pi
        partners = extremum_instants(naive, t_with - 1.5 * half_turn, t_with + 1.5 * half_turn, kind, samples)
        t_without = min(
            partners,
            key=lambda t: (phase_distance(phase_no_ordering(t, params) % math.pi, target, math.pi), abs(t - t_with)),
        )
        shift = (phase_no_ordering(t_with, params) - phase_no_ordering(t_without, params)) % math.pi
        report.instants.append(t_with)
        report.phases_mod_pi.append(target)
        report.offsets.append(shift)
        logging.debug("%s extremum at t=%.12f pairs with %.12f: shift %.9f", measure, t_with, t_without, shift)

    # average on the circle of period pi
    reference = report.offsets[0]
    unwrapped = [reference + math.remainder(o - reference, math.pi) for o in report.offsets]
    report.offset = float(np.mean(unwrapped)) % math.pi
    logging.info(
        "%s phase offset at r=%s ratio=%s: %.6f (expected %.6f)",
        measure,
        params.r,
        params.ratio,
        report.offset,
        report.expected,
    )
    return report


def zero_instants(
    params: SystemParams,
    ordering: Ordering,
    t_lo: float,
    t_hi: float,
    samples_per_half_turn: Optional[int] = None,
) -> List[float]:
    """Instants in [t_lo, t_hi] (absolute time) where the frozen T_A profile vanishes."""
    profile = frozen_profile(params, "T_A", ordering)
    per_half_turn = samples_per_half_turn or SAMPLES_PER_HALF_TURN
    samples = max(3, int(math.ceil(per_half_turn * (t_hi - t_lo) / _half_turn(params))))
    return extremum_instants(profile, t_lo, t_hi, "min", samples)
