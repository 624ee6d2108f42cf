import cmath
import math

import numpy as np
import pytest

from oneatom.core.objects import Branch, Ordering, SystemParams


def _grid(params, n=64):
    return [(k + 0.5) / n * params.t0 for k in range(n)]


def test_amplitudes_start_at_vacuum():
    from oneatom.model.analytic import amplitudes

    params = SystemParams.dimensionless(0.7, 50)

    assert amplitudes(0.0, params) == (0, 0)


def test_amplitudes_at_half_and_quarter_period():
    from oneatom.model.analytic import alpha_pm, amplitudes

    params = SystemParams.dimensionless(1.0, 50)
    plus, minus = amplitudes(params.t0 / 2, params)

    assert plus == pytest.approx(-2.0, abs=1e-12)
    assert minus == pytest.approx(2.0, abs=1e-12)
    assert alpha_pm(params.t0 / 4, params, Branch.plus) == pytest.approx(-1 - 1j, abs=1e-12)


def test_amplitudes_return_after_one_period():
    from oneatom.model.analytic import amplitudes

    params = SystemParams.dimensionless(1.3, 8)
    plus, minus = amplitudes(params.t0, params)

    assert abs(plus) < 1e-12 and abs(minus) < 1e-12


def test_negative_time_rejected():
    from oneatom.core.errors import ContractViolationError
    from oneatom.model.analytic import amplitudes

    with pytest.raises(ContractViolationError):
        amplitudes(-1.0, SystemParams.dimensionless(0.5, 50))


def test_phase_without_ordering_at_half_period():
    from oneatom.model.analytic import phase_no_ordering
    from oneatom.util import phase_distance

    params = SystemParams.dimensionless(0.5, 50)

    assert phase_distance(phase_no_ordering(params.t0 / 2, params), 0.25 * math.pi) < 1e-9


def test_phase_with_zero_r():
    from oneatom.model.analytic import phase_exact, phase_no_ordering
    from oneatom.util import phase_distance

    params = SystemParams.dimensionless(0.0, 50)

    assert phase_distance(phase_exact(params.t0, params), 0.0) < 1e-9
    assert phase_distance(phase_no_ordering(1.234, params), phase_exact(1.234, params)) < 1e-12


def test_ordering_correction_at_half_period():
    from oneatom.model.analytic import ordering_correction

    for r in (0.25, 0.5, 1.0):
        params = SystemParams.dimensionless(r, 50)
        assert ordering_correction(params.t0 / 2, params) == pytest.approx(math.pi * r * r, abs=1e-12)

    params = SystemParams.dimensionless(0.32, 50)
    assert ordering_correction(params.t0 / 2, params) == pytest.approx(0.3217, abs=1e-4)


def test_phase_exact_at_pi():
    from oneatom.model.analytic import phase_exact
    from oneatom.util import phase_distance

    params = SystemParams.dimensionless(0.5, 50)

    assert phase_distance(phase_exact(math.pi, params), 0.0) < 1e-9


def test_phase_identity_holds_over_a_period():
    from oneatom.model.analytic import ordering_correction, phase_exact, phase_no_ordering
    from oneatom.util import phase_distance

    for r, ratio in ((0.25, 8), (1.0, 50), (1.8, 200)):
        params = SystemParams.dimensionless(r, ratio)
        for t in _grid(params, 16):
            total = phase_exact(t, params) + ordering_correction(t, params)
            assert phase_distance(total, phase_no_ordering(t, params)) < 1e-12


def test_conditional_state_at_start():
    from oneatom.core.errors import ZeroProbabilityError
    from oneatom.fock.space import fock_vector
    from oneatom.model.analytic import cat_to_fock, conditional_state

    params = SystemParams.dimensionless(0.5, 50)
    cat = conditional_state(0.0, params, Branch.plus)

    assert cat.prob == pytest.approx(1.0)
    assert np.allclose(cat_to_fock(cat, 8).coeffs, fock_vector(0, 8).coeffs, atol=1e-12)
    with pytest.raises(ZeroProbabilityError):
        conditional_state(0.0, params, Branch.minus)


def test_detection_probabilities_sum_to_one():
    from oneatom.model.analytic import detection_probabilities

    params = SystemParams.dimensionless(1.0, 50)
    for ordering in Ordering:
        p_plus, p_minus = detection_probabilities(params.t0 / 2, params, ordering)
        assert p_plus + p_minus == pytest.approx(1.0, abs=1e-12)
    assert detection_probabilities(0.0, params, Ordering.with_ordering) == (1.0, 0.0)


def test_overlap_at_half_period():
    from oneatom.model.analytic import overlap_q

    params = SystemParams.dimensionless(1.0, 50)

    assert abs(overlap_q(params.t0 / 2, params)) == pytest.approx(math.exp(-8), rel=1e-9)


def test_cat_with_quarter_phase_is_odd():
    from oneatom.fock.space import parity_expectation
    from oneatom.model.analytic import cat_to_fock, make_cat

    cat = make_cat(-1.0, 1.0, math.pi / 2, Branch.plus)

    assert parity_expectation(cat_to_fock(cat, 40)) == pytest.approx(-1.0, abs=1e-10)


def test_general_weights_are_normalized():
    from oneatom.fock.space import norm
    from oneatom.model.analytic import cat_to_fock, conditional_state, detection_probabilities

    params = SystemParams.dimensionless(0.8, 50)
    weights = (0.6, 0.8j)
    t = 0.3 * params.t0
    for branch in Branch:
        cat = conditional_state(t, params, branch, weights=weights)
        assert norm(cat_to_fock(cat, 40)) == pytest.approx(1.0, abs=1e-10)
    assert sum(detection_probabilities(t, params, Ordering.with_ordering, weights)) == pytest.approx(1.0, abs=1e-12)


def test_zero_weights_rejected():
    from oneatom.core.errors import ContractViolationError
    from oneatom.model.analytic import make_cat

    with pytest.raises(ContractViolationError):
        make_cat(1.0, -1.0, 0.0, Branch.plus, weights=(0, 0))


def test_closed_forms_match_fock_representation():
    from oneatom.fock.space import recommended_dim
    from oneatom.measures import average_parity, mean_photon_number, total_noise
    from oneatom.model.analytic import (
        cat_to_fock,
        conditional_state,
        mean_photon_number_closed_form,
        parity_closed_form,
        total_noise_closed_form,
    )

    for r in (0.25, 0.5, 1.0, 1.8):
        params = SystemParams.dimensionless(r, 8)
        dim = recommended_dim(2 * r)
        for t in _grid(params):
            for branch in Branch:
                for ordering in Ordering:
                    cat = conditional_state(t, params, branch, ordering)
                    state = cat_to_fock(cat, dim)
                    assert total_noise_closed_form(cat) == pytest.approx(total_noise(state), abs=1e-6)
                    assert mean_photon_number_closed_form(cat) == pytest.approx(mean_photon_number(state), abs=1e-6)
                    assert parity_closed_form(cat) == pytest.approx(average_parity(state), abs=1e-6)


def test_noise_peaks_near_one_for_small_r():
    from oneatom.model.analytic import conditional_state, total_noise_closed_form
    from oneatom.util import phase_distance

    params = SystemParams.dimensionless(0.25, 8)
    times = np.linspace(0.0, params.t0, 4001)[1:-1]
    targets = {Branch.plus: (math.pi / 2,), Branch.minus: (0.0, math.pi)}
    for branch, phases in targets.items():
        cats = [conditional_state(t, params, branch) for t in times]
        noise = [total_noise_closed_form(cat) for cat in cats]
        best = int(np.argmax(noise))
        assert noise[best] == pytest.approx(1.0, abs=0.1)
        assert min(phase_distance(cats[best].phi % math.pi, p, math.pi) for p in phases) <= 0.05


def test_noise_plateau_for_large_r():
    from oneatom.model.analytic import amplitudes, conditional_state, total_noise_closed_form

    params = SystemParams.dimensionless(1.0, 8)
    for t in np.linspace(0.48, 0.52, 201) * params.t0:
        plus, minus = amplitudes(t, params)
        separation = abs(plus - minus) ** 2
        envelope = 0.25 * separation * -math.expm1(-separation)
        value = total_noise_closed_form(conditional_state(t, params, Branch.plus))
        assert value > 3.0
        assert abs(value - envelope) / envelope < 0.05


def test_reference_photon_numbers():
    from oneatom.model.analytic import (
        even_state_photon_number,
        odd_state_photon_number,
        yurke_stoler_photon_number,
    )

    alpha = 0.6325
    assert odd_state_photon_number(alpha) == pytest.approx(1.0528, abs=1e-3)
    assert even_state_photon_number(alpha) == pytest.approx(0.15198, abs=1e-3)
    assert yurke_stoler_photon_number(alpha) == pytest.approx(0.4, abs=1e-3)
    assert odd_state_photon_number(0) == 1.0


def test_critical_radius():
    from oneatom.model.analytic import critical_radius

    assert critical_radius() == pytest.approx(math.sqrt(0.1), abs=1e-9)
    assert critical_radius(0.2) == pytest.approx(math.sqrt(0.2), abs=1e-9)


def test_trajectory_circles():
    from oneatom.model.analytic import trajectory

    r = 1.8
    fractions, plus, minus = trajectory(SystemParams.dimensionless(r, 8), 256)

    assert fractions[0] == 0.0 and fractions[-1] == 1.0
    assert np.allclose(np.abs(plus + r), r)
    assert np.allclose(np.abs(minus - r), r)
    assert np.allclose(plus, -minus.conj())


def test_coherent_overlap_magnitude():
    from oneatom.model.analytic import coherent_overlap

    alpha, beta = 0.3 + 1.1j, -0.7 + 0.2j

    assert abs(coherent_overlap(alpha, beta)) == pytest.approx(math.exp(-0.5 * abs(alpha - beta) ** 2))
    assert coherent_overlap(alpha, alpha) == pytest.approx(1.0)
    assert coherent_overlap(0, beta) == pytest.approx(cmath.exp(-0.5 * abs(beta) ** 2))


def test_amplitude_mirror_symmetry():
    from oneatom.model.analytic import amplitudes

    rng = np.random.default_rng(7)
    for r, ratio in ((0.25, 8), (1.8, 50)):
        params = SystemParams.dimensionless(r, ratio)
        for t in rng.uniform(0.0, 10.0 * params.t0, size=500):
            plus, minus = amplitudes(t, params)
            assert abs(minus + plus.conjugate()) <= 1e-12
