""" Domain objects shared by the analytic model, the measures and the numerical oracle """
import enum
import math
from abc import ABCMeta, abstractmethod
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from oneatom.core.errors import ContractViolationError, DimensionMismatchError
from oneatom.fock.space import FockVector

STRONG_COUPLING_FACTOR = 5.0
DEFAULT_WEIGHTS = (1.0 / math.sqrt(2.0), 1.0 / math.sqrt(2.0))


class Branch(enum.Enum):
    """Detection outcome: atom found in |1> (plus) or |2> (minus)"""

    plus = 1
    minus = -1

    @property
    def sign(self) -> int:
        return self.value


class Ordering(enum.Enum):
    with_ordering = "with"
    without_ordering = "without"


class AtomBasis(enum.Enum):
    three_level = 3
    two_level = 2

    @property
    def size(self) -> int:
        return self.value


@dataclass(frozen=True)
class SystemParams:
    """Coupling g and classical Rabi half-frequencies, all in rad/s"""

    g: float
    omega12: float
    omega23: float

    def __post_init__(self):
        if not (math.isfinite(self.g) and self.g > 0):
            raise ContractViolationError("g must be positive, got %r" % self.g)
        if not (math.isfinite(self.omega12) and self.omega12 > 0):
            raise ContractViolationError("omega12 must be positive, got %r" % self.omega12)
        if not (math.isfinite(self.omega23) and self.omega23 >= 0):
            raise ContractViolationError("omega23 must be non-negative, got %r" % self.omega23)

    @classmethod
    def dimensionless(cls, r: float, ratio: float) -> "SystemParams":
        """delta = 1, Omega12 = ratio, r = Omega23/g."""
        if not ratio > 0:
            raise ContractViolationError("ratio Omega12/delta must be positive, got %r" % ratio)
        if not r >= 0:
            raise ContractViolationError("r must be non-negative, got %r" % r)
        g = math.sqrt(2.0 * ratio)
        return cls(g=g, omega12=float(ratio), omega23=r * g)

    @classmethod
    def physical(cls, g: float, omega12: float, omega23: float) -> "SystemParams":
        return cls(g=float(g), omega12=float(omega12), omega23=float(omega23))

    @property
    def delta(self) -> float:
        return self.g * self.g / (2.0 * self.omega12)

    @property
    def r(self) -> float:
        return self.omega23 / self.g

    @property
    def t0(self) -> float:
        return 2.0 * math.pi / self.delta

    @property
    def ratio(self) -> float:
        return self.omega12 / self.delta

    @property
    def strong_coupling(self) -> bool:
        return self.omega12 >= STRONG_COUPLING_FACTOR * max(self.g, self.omega23)


@dataclass(frozen=True)
class CatState:
    """Conditional field state N (c1|alpha_plus> + c2|alpha_minus>) after detecting the atom"""

    alpha_plus: complex
    alpha_minus: complex
    phi: float
    branch: Branch
    norm: float
    prob: float
    ordering: Ordering
    weights: Tuple[complex, complex] = DEFAULT_WEIGHTS

    def coefficients(self) -> Tuple[complex, complex]:
        """Unnormalized coefficients of |alpha_plus> and |alpha_minus>."""
        w_plus, w_minus = self.weights
        rotation = complex(math.cos(self.phi), -math.sin(self.phi))
        return (
            complex(w_plus) * rotation,
            self.branch.sign * complex(w_minus) * rotation.conjugate(),
        )


@dataclass(frozen=True, eq=False)
class AtomFieldState:
    """One field vector per atomic basis state, |+>, |-> and optionally |3>"""

    basis: AtomBasis
    branches: Tuple[FockVector, ...]

    def __post_init__(self):
        branches = tuple(self.branches)
        if len(branches) != self.basis.size:
            raise DimensionMismatchError(
                "%s basis needs %d branches, got %d" % (self.basis.name, self.basis.size, len(branches))
            )
        dims = {b.dim for b in branches}
        if len(dims) != 1:
            raise DimensionMismatchError("branches have different dims %s" % sorted(dims))
        object.__setattr__(self, "branches", branches)

    @property
    def dim(self) -> int:
        return self.branches[0].dim

    def as_vector(self) -> np.ndarray:
        return np.concatenate([b.coeffs for b in self.branches])

    @classmethod
    def from_vector(cls, basis: AtomBasis, vector: np.ndarray) -> "AtomFieldState":
        vector = np.asarray(vector, dtype=complex)
        if vector.size % basis.size:
            raise DimensionMismatchError(
                "vector of size %d does not split into %d branches" % (vector.size, basis.size)
            )
        return cls(basis, tuple(FockVector(part) for part in np.split(vector, basis.size)))

    def norm_squared(self) -> float:
        return float(sum(b.norm_squared() for b in self.branches))


class Propagator(metaclass=ABCMeta):
    """Numerical evolution under one of the interaction-picture Hamiltonians"""

    basis: AtomBasis

    @abstractmethod
    def setup(self, params: SystemParams, dim: int) -> bool:
        pass

    @abstractmethod
    def hamiltonian(self, t: float) -> np.ndarray:
        pass

    @abstractmethod
    def step_unitary(self, t: float, dt: float) -> np.ndarray:
        pass

    @abstractmethod
    def default_steps(self, t: float) -> int:
        pass
