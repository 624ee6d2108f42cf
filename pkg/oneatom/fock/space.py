"""Single-mode truncated Fock space.

States are dense complex vectors over |0>..|dim-1>, operators dense dim x dim
matrices. Everything here is immutable and side-effect free.
"""
import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.linalg import expm

from oneatom.core.errors import (
    ContractViolationError,
    ConvergenceError,
    DimensionMismatchError,
    InvalidDimensionError,
)

NORM_TOLERANCE = 1e-10
TAIL_WIDTH = 5


def _check_dim(dim: int) -> int:
    if int(dim) != dim or dim < 1:
        raise InvalidDimensionError("truncation dimension must be a positive integer, got %r" % (dim,))
    return int(dim)


def _frozen(values: np.ndarray) -> np.ndarray:
    values.setflags(write=False)
    return values


@dataclass(frozen=True, eq=False)
class FockVector:
    """Amplitudes c_n of a single-mode state in the number basis"""

    coeffs: np.ndarray
    is_normalized: bool = False

    def __post_init__(self):
        coeffs = np.array(self.coeffs, dtype=complex).reshape(-1)
        _check_dim(coeffs.size)
        object.__setattr__(self, "coeffs", _frozen(coeffs))
        if self.is_normalized and abs(self.norm_squared() - 1.0) > NORM_TOLERANCE:
            raise ContractViolationError(
                "state flagged normalized has squared norm %.15g" % self.norm_squared()
            )

    @property
    def dim(self) -> int:
        return self.coeffs.size

    def norm_squared(self) -> float:
        return float(np.vdot(self.coeffs, self.coeffs).real)

    def __len__(self):
        return self.dim


@dataclass(frozen=True, eq=False)
class ModeOperator:
    """Dense operator on the truncated mode"""

    entries: np.ndarray
    name: str = field(default="", compare=False)

    def __post_init__(self):
        entries = np.array(self.entries, dtype=complex)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise DimensionMismatchError("operator must be square, got shape %s" % (entries.shape,))
        _check_dim(entries.shape[0])
        object.__setattr__(self, "entries", _frozen(entries))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def dagger(self) -> "ModeOperator":
        return ModeOperator(self.entries.conj().T, name=self.name + "^dag" if self.name else "")

    def __matmul__(self, other):
        if isinstance(other, ModeOperator):
            _same_dim(self, other)
            return ModeOperator(self.entries @ other.entries)
        if isinstance(other, FockVector):
            _same_dim(self, other)
            return FockVector(self.entries @ other.coeffs)
        return NotImplemented

    def __sub__(self, other: "ModeOperator") -> "ModeOperator":
        _same_dim(self, other)
        return ModeOperator(self.entries - other.entries)


def _same_dim(u, v):
    if u.dim != v.dim:
        raise DimensionMismatchError("dimension mismatch: %d != %d" % (u.dim, v.dim))


def recommended_dim(alpha: complex) -> int:
    """Truncation that leaves a Poisson tail below 1e-12 for amplitude ``alpha``."""
    magnitude = abs(alpha)
    return max(1, int(math.ceil(magnitude**2 + 10.0 * magnitude + 20.0)))


def fock_vector(n: int, dim: int) -> FockVector:
    dim = _check_dim(dim)
    if not 0 <= n < dim:
        raise InvalidDimensionError("number state |%d> does not fit in dim %d" % (n, dim))
    coeffs = np.zeros(dim, dtype=complex)
    coeffs[n] = 1.0
    return FockVector(coeffs, is_normalized=True)


def coherent_fock_vector(alpha: complex, dim: int) -> FockVector:
    """Truncated |alpha>; the truncated vector is deliberately left unnormalized."""
    dim = _check_dim(dim)
    alpha = complex(alpha)
    ratios = alpha / np.sqrt(np.arange(1, dim, dtype=float))
    coeffs = np.empty(dim, dtype=complex)
    coeffs[0] = 1.0
    coeffs[1:] = np.cumprod(ratios)
    coeffs *= math.exp(-0.5 * abs(alpha) ** 2)
    return FockVector(coeffs)


@lru_cache(maxsize=64)
def _annihilation_entries(dim: int) -> np.ndarray:
    return _frozen(np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1).astype(complex))


def annihilation_matrix(dim: int) -> ModeOperator:
    return ModeOperator(_annihilation_entries(_check_dim(dim)), name="a")


def creation_matrix(dim: int) -> ModeOperator:
    return annihilation_matrix(dim).dagger()


def number_matrix(dim: int) -> ModeOperator:
    dim = _check_dim(dim)
    return ModeOperator(np.diag(np.arange(dim, dtype=float)), name="n")


def parity_matrix(dim: int) -> ModeOperator:
    dim = _check_dim(dim)
    return ModeOperator(np.diag((-1.0) ** np.arange(dim)), name="parity")


def modified_annihilation_matrix(dim: int) -> ModeOperator:
    """A = exp(i pi a^dag a) a, built as parity times a."""
    return ModeOperator((parity_matrix(dim) @ annihilation_matrix(dim)).entries, name="A")


def inner_product(u: FockVector, v: FockVector) -> complex:
    _same_dim(u, v)
    return complex(np.vdot(u.coeffs, v.coeffs))


def norm(state: FockVector) -> float:
    return math.sqrt(state.norm_squared())


def normalized(state: FockVector) -> FockVector:
    length = norm(state)
    if length == 0.0:
        raise ContractViolationError("cannot normalize the zero vector")
    return FockVector(state.coeffs / length, is_normalized=True)


def require_normalized(state: FockVector, tolerance: float = NORM_TOLERANCE) -> FockVector:
    deviation = abs(state.norm_squared() - 1.0)
    if deviation > tolerance:
        raise ContractViolationError(
            "expected a normalized state, squared norm deviates from 1 by %.3e" % deviation
        )
    return state


def expectation(state: FockVector, operator: ModeOperator) -> complex:
    _same_dim(state, operator)
    return complex(np.vdot(state.coeffs, operator.entries @ state.coeffs))


def parity_expectation(state: FockVector) -> float:
    require_normalized(state)
    weights = np.abs(state.coeffs) ** 2
    return float(np.dot((-1.0) ** np.arange(state.dim), weights))


def truncation_tail(state: FockVector, k: int) -> float:
    """Weight carried by the top ``k`` levels, sum_{n >= dim-k} |c_n|^2."""
    if not 1 <= k < state.dim:
        raise InvalidDimensionError("tail width %r outside [1, %d)" % (k, state.dim))
    return float(np.sum(np.abs(state.coeffs[-k:]) ** 2))


def embed(state: FockVector, dim: int) -> FockVector:
    """Zero-pad a state into a larger truncation."""
    dim = _check_dim(dim)
    if dim < state.dim:
        raise InvalidDimensionError("cannot embed dim %d into smaller dim %d" % (state.dim, dim))
    coeffs = np.zeros(dim, dtype=complex)
    coeffs[: state.dim] = state.coeffs
    return FockVector(coeffs, is_normalized=state.is_normalized)


def displacement_padding(beta: complex, dim: int) -> int:
    magnitude = abs(beta)
    return recommended_dim(beta) + int(math.ceil(4.0 * magnitude * math.sqrt(dim)))


def displacement_matrix(beta: complex, dim: int) -> ModeOperator:
    """D(beta) = exp(beta a^dag - beta* a) on the truncated space (exact only away from the edge)."""
    a = annihilation_matrix(dim).entries
    generator = complex(beta) * a.conj().T - complex(beta).conjugate() * a
    return ModeOperator(expm(generator), name="D")


def displaced_coefficients(beta: complex, state: FockVector) -> np.ndarray:
    """D(beta) applied in a padded space large enough to hold the displaced state."""
    work_dim = state.dim + displacement_padding(beta, state.dim)
    embedded = np.zeros(work_dim, dtype=complex)
    embedded[: state.dim] = state.coeffs
    return displacement_matrix(beta, work_dim).entries @ embedded


def apply_displacement(beta: complex, state: FockVector, tolerance: float = 1e-8) -> FockVector:
    coeffs = displaced_coefficients(beta, state)
    leaked = float(np.sum(np.abs(coeffs[state.dim :]) ** 2))
    logging.debug("displacement by %s leaks %.3e beyond dim %d", beta, leaked, state.dim)
    if leaked > tolerance:
        raise ConvergenceError(
            "displacement by |beta|=%.4g leaks %.3e of the norm past dim %d" % (abs(beta), leaked, state.dim),
            suggestion="use dim >= %d" % (state.dim + recommended_dim(beta)),
        )
    return FockVector(coeffs[: state.dim])
