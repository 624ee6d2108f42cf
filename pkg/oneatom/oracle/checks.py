"""Validation suite comparing the closed-form solution with brute-force propagation."""
import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from oneatom.core.objects import AtomBasis, SystemParams
from oneatom.data import OneAtomData
from oneatom.fock.space import recommended_dim
from oneatom.model.analytic import phase_exact, phase_no_ordering
from oneatom.oracle.propagator import (
    analytic_state,
    apply_u1,
    apply_u2,
    fidelity,
    ground_state,
    magnus_UK,
    measured_phase,
    nested_commutator_norm,
    propagate_HI,
    propagate_HJ,
    propagate_HK,
)
from oneatom.util import phase_distance

FIDELITY_FLOOR = 1.0 - 1e-6
PHASE_TOLERANCE = 1e-3
COMMUTATOR_TOLERANCE = 1e-10
POPULATION_TOLERANCE = 1e-8


@dataclass
class CheckResult(OneAtomData):
    name: str = ""
    passed: bool = False
    value: float = 0.0
    threshold: float = 0.0
    detail: dict = field(default_factory=dict)


def _dim_for(r: float, dim: Optional[int]) -> int:
    return dim if dim else recommended_dim(2.0 * r)


def magnus_exactness(
    r_values: Sequence[float] = (0.25, 0.5, 1.0, 1.8),
    fractions: Sequence[float] = (0.25, 0.5, 1.0),
    ratio: float = 50.0,
    steps_per_period: int = 2000,
    dim: Optional[int] = None,
) -> List[CheckResult]:
    """Stepped H_K against exp(Xi1 + Xi2) from |1>|vac>."""
    results = []
    for r in r_values:
        params = SystemParams.dimensionless(r, ratio)
        size = _dim_for(r, dim)
        initial = ground_state(size, AtomBasis.two_level)
        for fraction in fractions:
            t = fraction * params.t0
            steps = max(1, math.ceil(steps_per_period * fraction))
            numeric = propagate_HK(initial, t, params, size, steps).final_state
            exact = magnus_UK(t, params, initial)
            value = fidelity(numeric, exact)
            results.append(
                CheckResult(
                    name="magnus_exactness",
                    passed=value >= FIDELITY_FLOOR,
                    value=value,
                    threshold=FIDELITY_FLOOR,
                    detail={"r": r, "t_over_t0": fraction, "dim": size, "steps": steps},
                )
            )
            logging.info("magnus exactness r=%s t/t0=%s fidelity=%.12f", r, fraction, value)
    return results


def frame_equivalence(
    r: float = 0.5,
    ratio: float = 8.0,
    fraction: float = 0.25,
    steps_per_fast_period: int = 1000,
    dim: Optional[int] = None,
) -> CheckResult:
    """H_J evolution equals U1^dag applied to the H_I evolution."""
    params = SystemParams.dimensionless(r, ratio)
    size = _dim_for(r, dim)
    t = fraction * params.t0
    initial = ground_state(size)
    through_i = propagate_HI(initial, t, params, size).final_state
    steps = max(1, math.ceil(steps_per_fast_period * t * params.omega12 / (2.0 * math.pi)))
    through_j = propagate_HJ(initial, t, params, size, steps).final_state
    value = fidelity(through_j, apply_u1(t, params, through_i, adjoint=True))
    return CheckResult(
        name="frame_equivalence",
        passed=value >= FIDELITY_FLOOR,
        value=value,
        threshold=FIDELITY_FLOOR,
        detail={"r": r, "ratio": ratio, "t_over_t0": fraction, "dim": size, "steps": steps},
    )


def commutator_vanishing(draws: int = 20, seed: int = 2024, dim: int = 16) -> List[CheckResult]:
    """Third-order Magnus integrand on the interior block for random times and parameters."""
    rng = np.random.default_rng(seed)
    results = []
    for _ in range(draws):
        r = float(rng.uniform(0.1, 1.8))
        ratio = float(rng.uniform(5.0, 200.0))
        params = SystemParams.dimensionless(r, ratio)
        t1, t2, t3 = (float(x) for x in rng.uniform(0.0, params.t0, size=3))
        bound = COMMUTATOR_TOLERANCE * (r * params.delta) ** 3
        value = nested_commutator_norm(t1, t2, t3, params, dim)
        results.append(
            CheckResult(
                name="commutator_vanishing",
                passed=value <= bound,
                value=value,
                threshold=bound,
                detail={"r": r, "ratio": ratio, "times": [t1, t2, t3], "dim": dim},
            )
        )
    return results


def ratio_sweep(
    ratios: Sequence[float] = (8.0, 50.0, 200.0),
    r: float = 0.5,
    fraction: float = 0.5,
    dim: int = 32,
    steps_per_fast_period: int = 40,
) -> CheckResult:
    """Effective-Hamiltonian accuracy must improve and |3> population shrink as Omega12/delta grows."""
    fidelities, populations = [], []
    for ratio in ratios:
        params = SystemParams.dimensionless(r, ratio)
        t = fraction * params.t0
        initial = ground_state(dim)
        steps = max(1, math.ceil(steps_per_fast_period * t * params.omega12 / (2.0 * math.pi)))
        run = propagate_HJ(initial, t, params, dim, steps)
        reference = apply_u1(t, params, analytic_state(t, params, dim), adjoint=True)
        fidelities.append(fidelity(run.final_state, reference))
        populations.append(run.max_excited_population)
        logging.info(
            "ratio %s: fidelity %.9f, max |3> population %.3e", ratio, fidelities[-1], populations[-1]
        )
    improving = all(a < b for a, b in zip(fidelities, fidelities[1:]))
    shrinking = all(a > b for a, b in zip(populations, populations[1:]))
    return CheckResult(
        name="ratio_sweep",
        passed=improving and shrinking,
        value=fidelities[-1],
        threshold=fidelities[0],
        detail={"ratios": list(ratios), "fidelities": fidelities, "max_excited_population": populations},
    )


def _populations(run) -> np.ndarray:
    return np.array([record["excited_population"] for record in run.observables])


def excited_population(
    r: float = 0.5,
    ratio: float = 50.0,
    fraction: float = 0.5,
    steps_per_fast_period: int = 400,
    samples: int = 200,
    dim: Optional[int] = None,
) -> CheckResult:
    """|3> population of the H_J run equals the H_I run's at every sample.

    U1 leaves |3> alone, so the two agree exactly. The H_J run is midpoint
    stepped, so it is done at two step sizes and extrapolated before comparing.
    """
    params = SystemParams.dimensionless(r, ratio)
    size = _dim_for(r, dim)
    t = fraction * params.t0
    initial = ground_state(size)
    fast_periods = t * params.omega12 / (2.0 * math.pi)
    steps = samples * max(1, math.ceil(steps_per_fast_period * fast_periods / samples))
    exact = _populations(propagate_HI(initial, t, params, size, steps, samples=samples))
    coarse = _populations(propagate_HJ(initial, t, params, size, steps, samples=samples))
    fine = _populations(propagate_HJ(initial, t, params, size, 2 * steps, samples=samples))
    # symmetric stepping: the error is even in dt
    extrapolated = fine + (fine - coarse) / 3.0
    value = float(np.max(np.abs(extrapolated - exact)))
    logging.info("|3> population: peak %.6e, H_J deviation %.3e", float(np.max(exact)), value)
    return CheckResult(
        name="excited_population",
        passed=value <= POPULATION_TOLERANCE,
        value=value,
        threshold=POPULATION_TOLERANCE,
        detail={
            "r": r,
            "ratio": ratio,
            "t_over_t0": fraction,
            "dim": size,
            "steps": steps,
            "max_excited_population": float(np.max(exact)),
            "unextrapolated_deviation": float(np.max(np.abs(fine - exact))),
        },
    )


def time_ordering_phase(
    r: float = 0.5, ratio: float = 50.0, steps_per_period: int = 2000, dim: Optional[int] = None
) -> CheckResult:
    """Relative branch phase of the stepped H_K run at t0/2 follows phi, not phi-tilde."""
    params = SystemParams.dimensionless(r, ratio)
    size = _dim_for(r, dim)
    t = 0.5 * params.t0
    initial = ground_state(size, AtomBasis.two_level)
    run = propagate_HK(initial, t, params, size, steps_per_period // 2)
    state = apply_u1(t, params, apply_u2(t, params, run.final_state))
    measured = measured_phase(state, t, params)
    exact = phase_exact(t, params) % math.pi
    naive = phase_no_ordering(t, params) % math.pi
    miss = phase_distance(measured, exact, math.pi)
    offset = (naive - measured) % math.pi
    expected = (math.pi * r * r) % math.pi
    return CheckResult(
        name="time_ordering_phase",
        passed=miss <= PHASE_TOLERANCE and phase_distance(offset, expected, math.pi) <= PHASE_TOLERANCE,
        value=offset,
        threshold=expected,
        detail={"measured_phi_mod_pi": measured, "exact_phi_mod_pi": exact, "naive_phi_mod_pi": naive},
    )


def run_all(dim: Optional[int] = None, steps: Optional[int] = None) -> List[CheckResult]:
    """The suite behind ``oneatom validate``; ``steps`` overrides steps per period for H_K runs."""
    per_period = steps if steps else 2000
    results = []
    results.extend(magnus_exactness(dim=dim, steps_per_period=per_period))
    results.append(frame_equivalence(dim=dim))
    results.extend(commutator_vanishing(dim=max(8, dim) if dim else 16))
    results.append(ratio_sweep(dim=dim if dim else 32))
    results.append(excited_population(dim=dim))
    results.append(time_ordering_phase(dim=dim, steps_per_period=per_period))
    return results
