import math

import numpy as np
import pytest


def test_coherent_vacuum():
    from oneatom.fock.space import coherent_fock_vector

    state = coherent_fock_vector(0, 4)

    assert np.allclose(state.coeffs, [1, 0, 0, 0])


def test_coherent_two_levels():
    from oneatom.fock.space import coherent_fock_vector

    state = coherent_fock_vector(1.0, 2)

    assert np.allclose(state.coeffs, [math.exp(-0.5), math.exp(-0.5)])
    assert not state.is_normalized


def test_coherent_photon_number_at_critical_amplitude():
    from oneatom.fock.space import coherent_fock_vector

    state = coherent_fock_vector(0.6325, 32)
    n = float(np.dot(np.arange(32), np.abs(state.coeffs) ** 2))

    assert n == pytest.approx(0.4001, abs=1e-3)


def test_zero_dimension_rejected():
    from oneatom.core.errors import InvalidDimensionError
    from oneatom.fock.space import coherent_fock_vector

    with pytest.raises(InvalidDimensionError):
        coherent_fock_vector(0.5, 0)


def test_annihilation_matrix_entries():
    from oneatom.fock.space import annihilation_matrix

    assert np.array_equal(annihilation_matrix(2).entries, [[0, 1], [0, 0]])
    a3 = annihilation_matrix(3).entries
    assert a3[1, 2] == pytest.approx(math.sqrt(2))
    assert a3[0, 1] == pytest.approx(1.0)
    assert np.count_nonzero(a3) == 2


def test_number_expectation_of_coherent_state():
    from oneatom.fock.space import annihilation_matrix, coherent_fock_vector, expectation

    a = annihilation_matrix(40)
    state = coherent_fock_vector(1.0, 40)

    assert expectation(state, a.dagger() @ a).real == pytest.approx(1.0, abs=1e-8)


def test_commutator_holds_below_edge():
    from oneatom.fock.space import annihilation_matrix, creation_matrix

    dim = 12
    a, adag = annihilation_matrix(dim), creation_matrix(dim)
    commutator = ((a @ adag) - (adag @ a)).entries

    assert np.allclose(commutator[: dim - 1, : dim - 1], np.eye(dim - 1))
    assert commutator[dim - 1, dim - 1] == pytest.approx(-(dim - 1))


def test_inner_product_of_coherent_states():
    from oneatom.fock.space import coherent_fock_vector, inner_product

    u = coherent_fock_vector(0.5, 40)
    v = coherent_fock_vector(-0.5, 40)
    vacuum = coherent_fock_vector(0, 40)
    alpha = coherent_fock_vector(0.3 + 0.4j, 40)

    assert inner_product(u, v) == pytest.approx(math.exp(-0.5), abs=1e-8)
    assert inner_product(vacuum, alpha) == pytest.approx(math.exp(-0.125), abs=1e-12)
    assert inner_product(alpha, alpha) == pytest.approx(1.0, abs=1e-10)


def test_inner_product_dimension_mismatch():
    from oneatom.core.errors import DimensionMismatchError
    from oneatom.fock.space import coherent_fock_vector, inner_product

    with pytest.raises(DimensionMismatchError):
        inner_product(coherent_fock_vector(0, 4), coherent_fock_vector(0, 5))


def test_parity_expectation():
    from oneatom.fock.space import fock_vector, parity_expectation
    from oneatom.fock.states import even_coherent_state

    assert parity_expectation(fock_vector(0, 5)) == 1.0
    assert parity_expectation(fock_vector(1, 5)) == -1.0
    for alpha in (0.1, 0.7, 1.5 + 0.5j, 2.5):
        assert parity_expectation(even_coherent_state(alpha, 50)) == pytest.approx(1.0, abs=1e-8)


def test_parity_rejects_unnormalized():
    from oneatom.core.errors import ContractViolationError
    from oneatom.fock.space import coherent_fock_vector, parity_expectation

    with pytest.raises(ContractViolationError):
        parity_expectation(coherent_fock_vector(2.0, 5))


def test_truncation_tail():
    from oneatom.fock.space import coherent_fock_vector, fock_vector, recommended_dim, truncation_tail

    assert truncation_tail(fock_vector(0, 4), 1) == 0.0
    assert truncation_tail(coherent_fock_vector(2.0, 5), 1) == pytest.approx(math.exp(-4) * 4**4 / 24, rel=1e-12)
    dim = recommended_dim(2.0)
    assert truncation_tail(coherent_fock_vector(2.0, dim), 5) <= 1e-10


def test_truncation_tail_range():
    from oneatom.core.errors import InvalidDimensionError
    from oneatom.fock.space import fock_vector, truncation_tail

    with pytest.raises(InvalidDimensionError):
        truncation_tail(fock_vector(0, 4), 4)
    with pytest.raises(InvalidDimensionError):
        truncation_tail(fock_vector(0, 4), 0)


def test_recommended_dim():
    from oneatom.fock.space import recommended_dim

    assert recommended_dim(0) == 20
    assert recommended_dim(3.6) == math.ceil(3.6**2 + 36 + 20)


def test_tail_decreases_with_dim():
    from oneatom.fock.space import coherent_fock_vector

    means = []
    for dim in (6, 10, 16, 24, 40):
        state = coherent_fock_vector(1.5, dim)
        means.append(float(np.dot(np.arange(dim), np.abs(state.coeffs) ** 2)))

    assert all(a < b for a, b in zip(means, means[1:]))
    assert means[-1] == pytest.approx(2.25, abs=1e-8)


def test_displacement_of_vacuum_is_coherent():
    from oneatom.fock.space import apply_displacement, coherent_fock_vector, fock_vector

    displaced = apply_displacement(0.8 - 0.3j, fock_vector(0, 40))

    assert np.allclose(displaced.coeffs, coherent_fock_vector(0.8 - 0.3j, 40).coeffs, atol=1e-10)


def test_displacement_leak_detected():
    from oneatom.core.errors import ConvergenceError
    from oneatom.fock.space import apply_displacement, fock_vector

    with pytest.raises(ConvergenceError):
        apply_displacement(2.0, fock_vector(0, 6))


def test_flagged_state_must_be_normalized():
    from oneatom.core.errors import ContractViolationError
    from oneatom.fock.space import FockVector

    with pytest.raises(ContractViolationError):
        FockVector([1.0, 1.0], is_normalized=True)


def test_yurke_stoler_state_is_eigenstate_of_A():
    from oneatom.fock.space import modified_annihilation_matrix
    from oneatom.fock.states import yurke_stoler_state

    alpha = 0.9
    state = yurke_stoler_state(alpha, 40)
    image = modified_annihilation_matrix(40).entries @ state.coeffs

    assert np.allclose(image, -1j * alpha * state.coeffs, atol=1e-9)
