"""Coherent-state superpositions used as reference states."""
import math
from typing import Sequence

import numpy as np

from oneatom.core.errors import ContractViolationError, ConvergenceError, InvalidDimensionError
from oneatom.fock.space import TAIL_WIDTH, FockVector, coherent_fock_vector, recommended_dim

SUPERPOSITION_TAIL_TOLERANCE = 1e-10


def superposition(weights: Sequence[complex], amplitudes: Sequence[complex], dim: int) -> FockVector:
    """Normalized sum_k w_k |alpha_k>.

    The raw truncated sum is renormalized only when its top levels carry a
    negligible share of the weight.
    """
    if len(weights) != len(amplitudes) or not weights:
        raise InvalidDimensionError("need one weight per amplitude")
    raw = np.zeros(dim, dtype=complex)
    for weight, amplitude in zip(weights, amplitudes):
        raw += complex(weight) * coherent_fock_vector(amplitude, dim).coeffs
    total = float(np.vdot(raw, raw).real)
    if total == 0.0:
        raise ContractViolationError("superposition cancels to the zero vector")
    if dim > 1:
        k = min(TAIL_WIDTH, dim - 1)
        tail = float(np.sum(np.abs(raw[-k:]) ** 2)) / total
        if tail >= SUPERPOSITION_TAIL_TOLERANCE:
            largest = max(abs(complex(a)) for a in amplitudes)
            raise ConvergenceError(
                "top %d Fock levels hold %.3e of the state at dim %d" % (k, tail, dim),
                suggestion="use dim >= %d" % recommended_dim(largest),
            )
    return FockVector(raw / math.sqrt(total), is_normalized=True)


def even_coherent_state(alpha: complex, dim: int) -> FockVector:
    return superposition((1.0, 1.0), (alpha, -complex(alpha)), dim)


def odd_coherent_state(alpha: complex, dim: int) -> FockVector:
    return superposition((1.0, -1.0), (alpha, -complex(alpha)), dim)


def yurke_stoler_state(alpha: complex, dim: int, sign: int = 1) -> FockVector:
    """(|alpha> + sign*i|-alpha>)/sqrt(2)"""
    return superposition((1.0, sign * 1j), (alpha, -complex(alpha)), dim)
