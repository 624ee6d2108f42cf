"""Nonclassicality indicators of a pure single-mode state.

All measures take a normalized FockVector and refuse anything else.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from oneatom.core.errors import ConvergenceError, InvalidDimensionError
from oneatom.fock.space import (
    FockVector,
    ModeOperator,
    annihilation_matrix,
    displaced_coefficients,
    displacement_padding,
    expectation,
    modified_annihilation_matrix,
    parity_expectation,
    require_normalized,
)

WIGNER_TOLERANCE = 1e-8
WIGNER_EDGE = 2


def variance_noise(state: FockVector, operator: ModeOperator) -> float:
    """<O^dag O> - |<O>|^2, non-negative for every state."""
    require_normalized(state)
    image = operator.entries @ state.coeffs
    second = float(np.vdot(image, image).real)
    first = expectation(state, operator)
    return max(0.0, second - abs(first) ** 2)


def total_noise(state: FockVector) -> float:
    return variance_noise(state, annihilation_matrix(state.dim))


def relative_total_noise(state: FockVector) -> float:
    """Total noise built from A = exp(i pi a^dag a) a; zero on Yurke-Stoler states."""
    return variance_noise(state, modified_annihilation_matrix(state.dim))


def average_parity(state: FockVector) -> float:
    return parity_expectation(state)


def mean_photon_number(state: FockVector) -> float:
    require_normalized(state)
    return float(np.dot(np.arange(state.dim), np.abs(state.coeffs) ** 2))


def wigner_point(state: FockVector, alpha: complex) -> float:
    """W(alpha) = 2 <psi| D(alpha) P D(-alpha) |psi>, peak value 2 for coherent states."""
    require_normalized(state)
    if state.dim > WIGNER_EDGE:
        edge = float(np.sum(np.abs(state.coeffs[-WIGNER_EDGE:]) ** 2))
        if edge > WIGNER_TOLERANCE:
            raise ConvergenceError(
                "state carries %.3e at its truncation edge" % edge,
                suggestion="rebuild the state with a larger dim",
            )
    displaced = displaced_coefficients(-complex(alpha), state)
    edge = float(np.sum(np.abs(displaced[-WIGNER_EDGE:]) ** 2))
    if edge > WIGNER_TOLERANCE:
        raise ConvergenceError(
            "displacement by %s reaches the padded edge (%.3e)" % (alpha, edge),
            suggestion="pad by more than %d levels" % displacement_padding(alpha, state.dim),
        )
    signs = (-1.0) ** np.arange(displaced.size)
    return float(2.0 * np.dot(signs, np.abs(displaced) ** 2))


@dataclass(frozen=True, eq=False)
class WignerGrid:
    re_range: Tuple[float, float]
    im_range: Tuple[float, float]
    nx: int
    ny: int
    values: np.ndarray

    @property
    def re_axis(self) -> np.ndarray:
        return np.linspace(self.re_range[0], self.re_range[1], self.nx)

    @property
    def im_axis(self) -> np.ndarray:
        return np.linspace(self.im_range[0], self.im_range[1], self.ny)

    def cell_area(self) -> float:
        dx = (self.re_range[1] - self.re_range[0]) / (self.nx - 1) if self.nx > 1 else 0.0
        dy = (self.im_range[1] - self.im_range[0]) / (self.ny - 1) if self.ny > 1 else 0.0
        return dx * dy

    def normalization(self) -> float:
        """(1/pi) sum W dA; close to 1 when the grid contains the state."""
        return float(np.sum(self.values) * self.cell_area() / math.pi)

    def peak(self) -> float:
        return float(np.max(self.values))


def wigner_grid(
    state: FockVector,
    re_range: Tuple[float, float],
    im_range: Tuple[float, float],
    nx: int,
    ny: int,
    workers: Optional[int] = None,
) -> WignerGrid:
    """W sampled on an nx x ny grid; values[i, j] sits at re_axis[i] + 1j*im_axis[j]."""
    if nx < 1 or ny < 1:
        raise InvalidDimensionError("grid needs at least one point per axis")
    require_normalized(state)
    xs = np.linspace(re_range[0], re_range[1], nx)
    ys = np.linspace(im_range[0], im_range[1], ny)
    points = [complex(x, y) for x in xs for y in ys]
    logging.debug("evaluating Wigner function on %d points", len(points))
    with ThreadPoolExecutor(max_workers=workers) as executor:
        samples = list(executor.map(lambda alpha: wigner_point(state, alpha), points))
    values = np.array(samples, dtype=float).reshape(nx, ny)
    return WignerGrid(tuple(re_range), tuple(im_range), nx, ny, values)
