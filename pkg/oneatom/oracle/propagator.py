"""Brute-force propagation in truncated atom x Fock space.

The composite vector is branch-major: index k*dim + n holds atomic state k
(|+>, |->, |3>) with n photons. Every step applies exp(-i H(t_mid) dt), which is
unitary by construction, so norm drift measures round-off only.
"""
import cmath
import logging
import math
import sys
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np
from scipy.linalg import block_diag, expm

from oneatom.core.errors import (
    ContractViolationError,
    ConvergenceError,
    DimensionMismatchError,
    ZeroProbabilityError,
)
from oneatom.core.objects import (
    DEFAULT_WEIGHTS,
    AtomBasis,
    AtomFieldState,
    Branch,
    Ordering,
    Propagator,
    SystemParams,
)
from oneatom.fock.space import (
    FockVector,
    annihilation_matrix,
    apply_displacement,
    coherent_fock_vector,
    embed,
    fock_vector,
)
from oneatom.model.analytic import ZERO_PROBABILITY, amplitudes, ordering_correction, phase
from oneatom.util import reduce_phase, reduced_angle

NORM_DRIFT_LIMIT = 1e-9
EDGE_LIMIT = 1e-8
EDGE_LEVELS = 2
STEPS_PER_FAST_PERIOD = 40
STEPS_PER_PERIOD = 200
MAX_PHASE_PER_STEP = 0.05

PLUS, MINUS, EXCITED = 0, 1, 2


@dataclass
class PropagationResult:
    final_state: AtomFieldState
    times: List[float] = field(default_factory=list)
    observables: List[dict] = field(default_factory=list)
    step_count: int = 0
    max_norm_drift: float = 0.0
    max_excited_population: float = 0.0


class SteppedPropagator(Propagator):
    """Midpoint matrix-exponential stepping shared by the three pictures"""

    basis = AtomBasis.three_level
    params: Optional[SystemParams] = None
    dim: int = 0

    def setup(self, params: SystemParams, dim: int) -> bool:
        if dim < 2:
            raise ContractViolationError("propagation needs dim >= 2, got %d" % dim)
        self.params = params
        self.dim = dim
        a = annihilation_matrix(dim).entries
        self.a = a
        self.adag = a.conj().T
        self.identity = np.eye(dim, dtype=complex)
        logging.debug("%s setup dim=%d params=%s", type(self).__name__, dim, params)
        return True

    def fast_period_steps(self, t: float) -> int:
        return max(1, math.ceil(STEPS_PER_FAST_PERIOD * t * self.params.omega12 / (2.0 * math.pi)))

    def step_unitary(self, t: float, dt: float) -> np.ndarray:
        return expm(-1j * dt * self.hamiltonian(t + 0.5 * dt))

    def evolve(
        self,
        initial: AtomFieldState,
        t: float,
        steps: Optional[int] = None,
        samples: int = 1,
        start: float = 0.0,
        reference: Optional[Callable[[float], AtomFieldState]] = None,
    ) -> PropagationResult:
        """Advance ``initial``, given at time ``start``, by a duration ``t``."""
        if initial.basis is not self.basis:
            raise DimensionMismatchError(
                "%s expects a %s state, got %s" % (type(self).__name__, self.basis.name, initial.basis.name)
            )
        if initial.dim < self.dim:
            initial = AtomFieldState(initial.basis, tuple(embed(b, self.dim) for b in initial.branches))
        elif initial.dim > self.dim:
            raise DimensionMismatchError("initial dim %d exceeds propagation dim %d" % (initial.dim, self.dim))
        if not t >= 0:
            raise ContractViolationError("time must be non-negative, got %r" % (t,))
        start_norm = initial.norm_squared()
        if abs(start_norm - 1.0) > NORM_DRIFT_LIMIT:
            raise ContractViolationError("initial state is not normalized (|psi|^2 = %.12g)" % start_norm)

        steps = self.default_steps(t) if not steps else int(steps)
        dt = t / steps
        sample_every = max(1, steps // max(1, samples))
        vector = initial.as_vector()
        result = PropagationResult(final_state=initial, step_count=steps)
        result.max_excited_population = self._excited(vector)
        logging.debug("%s: %d steps of %.4g up to t=%.6g", type(self).__name__, steps, dt, t)

        for k in range(steps):
            vector = self.step_unitary(start + k * dt, dt) @ vector
            norm = float(np.vdot(vector, vector).real)
            result.max_norm_drift = max(result.max_norm_drift, abs(norm - start_norm))
            result.max_excited_population = max(result.max_excited_population, self._excited(vector))
            if (k + 1) % sample_every == 0 or k + 1 == steps:
                now = start + (k + 1) * dt
                result.times.append(now)
                result.observables.append(self._record(now, vector, reference))

        if result.max_norm_drift > NORM_DRIFT_LIMIT:
            raise ConvergenceError(
                "norm drifted by %.3e during propagation" % result.max_norm_drift,
                suggestion="increase steps beyond %d" % steps,
            )
        result.final_state = AtomFieldState.from_vector(self.basis, vector)
        self._check_edge(result.final_state)
        logging.debug(
            "%s finished: t=%.6g steps=%d drift=%.2e max|3> population=%.3e",
            type(self).__name__,
            t,
            steps,
            result.max_norm_drift,
            result.max_excited_population,
        )
        return result

    def _excited(self, vector: np.ndarray) -> float:
        if self.basis is not AtomBasis.three_level:
            return 0.0
        tail = vector[EXCITED * self.dim :]
        return float(np.vdot(tail, tail).real)

    def _record(self, now: float, vector: np.ndarray, reference) -> dict:
        state = AtomFieldState.from_vector(self.basis, vector)
        record = {
            "t": now,
            "excited_population": self._excited(vector),
            "photon_numbers": [
                float(np.dot(np.arange(self.dim), np.abs(b.coeffs) ** 2)) for b in state.branches
            ],
        }
        if reference is not None:
            record["fidelity"] = fidelity(state, reference(now))
        return record

    def _check_edge(self, state: AtomFieldState):
        for index, branch in enumerate(state.branches):
            edge = float(np.sum(np.abs(branch.coeffs[-EDGE_LEVELS:]) ** 2))
            if edge > EDGE_LIMIT:
                raise ConvergenceError(
                    "branch %d holds %.3e in its top %d Fock levels at dim %d" % (index, edge, EDGE_LEVELS, self.dim),
                    suggestion="increase dim above %d" % self.dim,
                )


class HIPropagator(SteppedPropagator):
    """Constant H_I = H1 + V1 with classical drives; one cached step unitary."""

    basis = AtomBasis.three_level

    def setup(self, params: SystemParams, dim: int) -> bool:
        super().setup(params, dim)
        self._matrix = self._build()
        self._scale = float(np.linalg.norm(self._matrix, 2))
        self._cached = None
        return True

    def _build(self) -> np.ndarray:
        p, n = self.params, self.dim
        h = np.zeros((3 * n, 3 * n), dtype=complex)

        def block(i, j):
            return slice(i * n, (i + 1) * n), slice(j * n, (j + 1) * n)

        h[block(PLUS, PLUS)] = p.omega12 * self.identity
        h[block(MINUS, MINUS)] = -p.omega12 * self.identity
        root = 1.0 / math.sqrt(2.0)
        to_plus = root * (p.g * self.a + p.omega23 * self.identity)
        to_minus = root * (p.g * self.a - p.omega23 * self.identity)
        h[block(EXCITED, PLUS)] = to_plus
        h[block(EXCITED, MINUS)] = to_minus
        h[block(PLUS, EXCITED)] = to_plus.conj().T
        h[block(MINUS, EXCITED)] = to_minus.conj().T
        return h

    def hamiltonian(self, t: float) -> np.ndarray:
        return self._matrix

    def default_steps(self, t: float) -> int:
        return max(self.fast_period_steps(t), math.ceil(self._scale * t / MAX_PHASE_PER_STEP))

    def step_unitary(self, t: float, dt: float) -> np.ndarray:
        if self._cached is None or self._cached[0] != dt:
            self._cached = (dt, expm(-1j * dt * self._matrix))
        return self._cached[1]


class HJPropagator(SteppedPropagator):
    """H_J(t) = U1^dag V1 U1, couplings rotating at Omega12."""

    basis = AtomBasis.three_level

    def hamiltonian(self, t: float) -> np.ndarray:
        p, n = self.params, self.dim
        rotation = cmath.exp(-1j * reduced_angle(p.omega12, t))
        root = 1.0 / math.sqrt(2.0)
        to_plus = root * (p.g * self.a + p.omega23 * self.identity) * rotation
        to_minus = root * (p.g * self.a - p.omega23 * self.identity) * rotation.conjugate()
        h = np.zeros((3 * n, 3 * n), dtype=complex)
        h[EXCITED * n :, PLUS * n : (PLUS + 1) * n] = to_plus
        h[EXCITED * n :, MINUS * n : (MINUS + 1) * n] = to_minus
        h[PLUS * n : (PLUS + 1) * n, EXCITED * n :] = to_plus.conj().T
        h[MINUS * n : (MINUS + 1) * n, EXCITED * n :] = to_minus.conj().T
        return h

    def default_steps(self, t: float) -> int:
        return self.fast_period_steps(t)


class HKPropagator(SteppedPropagator):
    """Two-level H_K(t); block diagonal, so each branch is stepped on its own."""

    basis = AtomBasis.two_level

    def branch_hamiltonians(self, t: float):
        p = self.params
        strength = p.r * p.delta
        rotation = cmath.exp(-1j * reduced_angle(p.delta, t))
        plus = strength * (self.a * rotation + self.adag * rotation.conjugate())
        minus = strength * (self.a * rotation.conjugate() + self.adag * rotation)
        return plus, minus

    def hamiltonian(self, t: float) -> np.ndarray:
        return block_diag(*self.branch_hamiltonians(t))

    def step_unitary(self, t: float, dt: float) -> np.ndarray:
        return block_diag(*(expm(-1j * dt * h) for h in self.branch_hamiltonians(t + 0.5 * dt)))

    def default_steps(self, t: float) -> int:
        return max(1, math.ceil(STEPS_PER_PERIOD * t / self.params.t0))


class PropagatorFactory:

    instance_class = "HKPropagator"

    @classmethod
    def get(cls, name: Optional[str] = None) -> SteppedPropagator:
        current_module = sys.modules[__name__]

        class_name = "%sPropagator" % name if name else cls.instance_class
        class_ = getattr(current_module, class_name, None)
        if class_ is None or not isinstance(class_, type) or not issubclass(class_, SteppedPropagator):
            raise ValueError("no propagator named %r" % name)

        return class_()


def _run(name: str, initial: AtomFieldState, t: float, params: SystemParams, dim: int, steps: Optional[int], **kw):
    propagator = PropagatorFactory.get(name)
    propagator.setup(params, dim)
    return propagator.evolve(initial, t, steps, **kw)


def propagate_HI(initial, t, params, dim, steps=None, **kw) -> PropagationResult:
    return _run("HI", initial, t, params, dim, steps, **kw)


def propagate_HJ(initial, t, params, dim, steps=None, **kw) -> PropagationResult:
    return _run("HJ", initial, t, params, dim, steps, **kw)


def propagate_HK(initial, t, params, dim, steps=None, **kw) -> PropagationResult:
    return _run("HK", initial, t, params, dim, steps, **kw)


def ground_state(
    dim: int, basis: AtomBasis = AtomBasis.three_level, weights: Sequence[complex] = DEFAULT_WEIGHTS
) -> AtomFieldState:
    """w_plus|+>|vac> + w_minus|->|vac>; the defaults give |1>|vac>."""
    w_plus, w_minus = (complex(w) for w in weights)
    length = math.sqrt(abs(w_plus) ** 2 + abs(w_minus) ** 2)
    vacuum = fock_vector(0, dim).coeffs
    branches = [FockVector(w_plus / length * vacuum), FockVector(w_minus / length * vacuum)]
    if basis is AtomBasis.three_level:
        branches.append(FockVector(np.zeros(dim, dtype=complex)))
    return AtomFieldState(basis, tuple(branches))


def _rotate(state: AtomFieldState, plus: np.ndarray, minus: np.ndarray) -> AtomFieldState:
    branches = [FockVector(plus * state.branches[PLUS].coeffs), FockVector(minus * state.branches[MINUS].coeffs)]
    branches.extend(state.branches[2:])
    return AtomFieldState(state.basis, tuple(branches))


def apply_u1(t: float, params: SystemParams, state: AtomFieldState, adjoint: bool = False) -> AtomFieldState:
    """exp(-i H1 t): |+> picks up e^{-i Omega12 t}, |-> the conjugate, |3> nothing."""
    sign = -1.0 if adjoint else 1.0
    rotation = cmath.exp(-1j * sign * reduce_phase((params.omega12, t)))
    ones = np.ones(state.dim)
    return _rotate(state, rotation * ones, rotation.conjugate() * ones)


def apply_u2(t: float, params: SystemParams, state: AtomFieldState, adjoint: bool = False) -> AtomFieldState:
    """exp(-i H2 t) with H2 = delta (a^dag a + r^2)(sigma_++ - sigma_--)."""
    sign = -1.0 if adjoint else 1.0
    offset = (params.r, params.r, params.delta, t)
    angles = np.array([reduce_phase((params.delta, t, n), offset) for n in range(state.dim)])
    plus = np.exp(-1j * sign * angles)
    return _rotate(state, plus, plus.conj())


def magnus_UK(
    t: float, params: SystemParams, state: AtomFieldState, ordering: Ordering = Ordering.with_ordering
) -> AtomFieldState:
    """exp(Xi1 + Xi2) branch by branch: a displacement and a phase +-Delta phi.

    Without ordering the second Magnus term is dropped and only the displacement acts.
    """
    if state.basis is not AtomBasis.two_level:
        raise DimensionMismatchError("the Magnus propagator acts on the two-level ground subspace")
    theta = reduced_angle(params.delta, t)
    beta_plus = params.r * (1.0 - cmath.exp(1j * theta))
    beta_minus = params.r * (cmath.exp(-1j * theta) - 1.0)
    shift = ordering_correction(t, params) if ordering is Ordering.with_ordering else 0.0
    plus = cmath.exp(1j * shift) * apply_displacement(beta_plus, state.branches[PLUS]).coeffs
    minus = cmath.exp(-1j * shift) * apply_displacement(beta_minus, state.branches[MINUS]).coeffs
    return AtomFieldState(state.basis, (FockVector(plus), FockVector(minus)))


def effective_evolution(
    t: float, params: SystemParams, state: AtomFieldState, ordering: Ordering = Ordering.with_ordering
) -> AtomFieldState:
    """U1 U2 U_K, the full effective evolution in the first interaction picture."""
    return apply_u1(t, params, apply_u2(t, params, magnus_UK(t, params, state, ordering)))


def analytic_state(
    t: float,
    params: SystemParams,
    dim: int,
    ordering: Ordering = Ordering.with_ordering,
    basis: AtomBasis = AtomBasis.three_level,
    weights: Sequence[complex] = DEFAULT_WEIGHTS,
) -> AtomFieldState:
    """w_plus e^{-i phi}|alpha_plus>|+> + w_minus e^{i phi}|alpha_minus>|->, |3> empty."""
    w_plus, w_minus = (complex(w) for w in weights)
    length = math.sqrt(abs(w_plus) ** 2 + abs(w_minus) ** 2)
    alpha_plus, alpha_minus = amplitudes(t, params)
    rotation = cmath.exp(-1j * phase(t, params, ordering))
    branches = [
        FockVector(w_plus / length * rotation * coherent_fock_vector(alpha_plus, dim).coeffs),
        FockVector(w_minus / length * rotation.conjugate() * coherent_fock_vector(alpha_minus, dim).coeffs),
    ]
    if basis is AtomBasis.three_level:
        branches.append(FockVector(np.zeros(dim, dtype=complex)))
    return AtomFieldState(basis, tuple(branches))


def fidelity(u: AtomFieldState, v: AtomFieldState) -> float:
    """|<u|v>|^2 over the whole atom x field space."""
    if u.basis is not v.basis or u.dim != v.dim:
        raise DimensionMismatchError(
            "cannot compare %s/dim %d with %s/dim %d" % (u.basis.name, u.dim, v.basis.name, v.dim)
        )
    overlap = np.vdot(u.as_vector(), v.as_vector())
    return float(min(1.0, abs(overlap) ** 2))


def branch_phase(state: AtomFieldState, index: int, amplitude: complex) -> float:
    """arg <amplitude| branch>, the phase of a branch relative to a coherent state."""
    reference = coherent_fock_vector(amplitude, state.dim).coeffs
    return cmath.phase(np.vdot(reference, state.branches[index].coeffs))


def measured_phase(state: AtomFieldState, t: float, params: SystemParams) -> float:
    """phi mod pi read off a first-picture state e^{-i phi}|alpha_plus>|+> + e^{i phi}|alpha_minus>|->."""
    alpha_plus, alpha_minus = amplitudes(t, params)
    difference = branch_phase(state, MINUS, alpha_minus) - branch_phase(state, PLUS, alpha_plus)
    return (0.5 * difference) % math.pi


def interior_mask(dim: int, branches: int = 2) -> np.ndarray:
    levels = np.arange(dim * branches) % dim
    return levels < dim - 2


def nested_commutator_norm(
    t1: float, t2: float, t3: float, params: SystemParams, dim: int, interior: bool = True
) -> float:
    """Spectral norm of [H_K(t1), [H_K(t2), H_K(t3)]].

    With ``interior`` the top two Fock levels of each branch are cut away, since
    [a, a^dag] = 1 fails only at the truncation edge.
    """
    if dim < 8:
        raise ContractViolationError("nested commutator check needs dim >= 8")
    propagator = HKPropagator()
    propagator.setup(params, dim)
    h1, h2, h3 = (propagator.hamiltonian(t) for t in (t1, t2, t3))
    inner = h2 @ h3 - h3 @ h2
    outer = h1 @ inner - inner @ h1
    if interior:
        keep = interior_mask(dim)
        outer = outer[np.ix_(keep, keep)]
    return float(np.linalg.norm(outer, 2))


def conditional_field(state: AtomFieldState, branch: Branch) -> FockVector:
    """Normalized field left after detecting the atom in |1> (plus) or |2> (minus)."""
    projected = (state.branches[PLUS].coeffs + branch.sign * state.branches[MINUS].coeffs) / math.sqrt(2.0)
    weight = float(np.vdot(projected, projected).real)
    if weight < ZERO_PROBABILITY:
        raise ZeroProbabilityError("detection probability %.3e for the %s branch" % (weight, branch.name))
    return FockVector(projected / math.sqrt(weight), is_normalized=True)
