import math

import numpy as np
import pytest
from scipy.stats import unitary_group

from conftest import random_density_matrix
from dressed_analysis import XState, analytic_steady_state, dressed_params, resonant_params
from entanglement import (concurrence_general, concurrence_xstate,
                          entangled_decomposition)
from sim_errors import DegenerateBlockError, NonPhysicalStateError
from validation import random_entangled_state, random_xstate


def projector(psi):
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


@pytest.mark.parametrize("psi", [
    [0, 1, 1, 0],
    [0, 1, -1, 0],
    [1, 0, 0, 1],
    [1, 0, 0, -1j],
])
def test_bell_states_are_maximally_entangled(psi):
    assert concurrence_general(projector(psi)) == pytest.approx(1.0, abs=1e-7)


@pytest.mark.parametrize("psi", [
    [1, 0, 0, 0],
    [0, 0, 0, 1],
    [1, 1, 1, 1],
    np.kron([1, 2j], [0.3, 1]),
])
def test_product_states_have_no_concurrence(psi):
    assert concurrence_general(projector(psi)) == pytest.approx(0.0, abs=1e-7)


def test_pure_state_concurrence_formula():
    a, b, c, d = 0.6, 0.2, -0.3j, 0.7
    psi = np.array([a, b, c, d]) / np.linalg.norm([a, b, c, d])
    expected = 2.0 * abs(psi[0] * psi[3] - psi[1] * psi[2])
    assert concurrence_general(projector(psi)) == pytest.approx(expected, abs=1e-7)


@pytest.mark.parametrize("p", [0.0, 0.2, 1.0 / 3.0, 0.5, 0.8, 0.95])
def test_werner_state_threshold(p):
    rho = p * projector([0, 1, -1, 0]) + (1.0 - p) * np.eye(4) / 4.0
    assert concurrence_general(rho) == pytest.approx(max(0.0, (3.0 * p - 1.0) / 2.0), abs=1e-7)


def test_maximally_mixed_state():
    assert concurrence_general(np.eye(4) / 4.0) == 0.0


def test_concurrence_stays_in_unit_interval(rng):
    for rank in (1, 2, 4):
        for _ in range(50):
            value = concurrence_general(random_density_matrix(rng, rank=rank), tol=1e-10)
            assert 0.0 <= value <= 1.0


def test_xstate_formula_agrees_with_general_form(rng):
    for _ in range(300):
        x = random_xstate(rng)
        assert concurrence_xstate(x) == pytest.approx(concurrence_general(x.to_matrix()), abs=1e-10)


def test_local_unitaries_leave_concurrence_unchanged(rng):
    for _ in range(30):
        rho = random_entangled_state(rng)
        u = np.kron(unitary_group.rvs(2, random_state=rng), unitary_group.rvs(2, random_state=rng))
        moved = u @ rho @ u.conj().T
        moved = 0.5 * (moved + moved.conj().T)
        assert concurrence_general(moved, tol=1e-10) == \
            pytest.approx(concurrence_general(rho, tol=1e-10), abs=1e-10)


def test_invalid_matrices_rejected():
    with pytest.raises(NonPhysicalStateError):
        concurrence_general(np.diag([0.5, 0.5, 0.5, 0.0]))
    with pytest.raises(NonPhysicalStateError):
        concurrence_general(np.diag([1.2, 0.0, 0.0, -0.2]))
    rho = np.eye(4, dtype=complex) / 4.0
    rho[0, 1] = 0.1
    with pytest.raises(NonPhysicalStateError):
        concurrence_general(rho)


def test_xstate_concurrence_needs_coherence_above_corner_populations():
    x = XState(rho11=0.04, rho22=0.3, rho33=0.4, rho44=0.26, rho23=0.1)
    assert concurrence_xstate(x) == 0.0
    x = XState(rho11=0.01, rho22=0.3, rho33=0.4, rho44=0.29, rho23=0.2j)
    assert concurrence_xstate(x) == pytest.approx(2.0 * (0.2 - math.sqrt(0.01 * 0.29)))


def test_decomposition_of_reference_steady_state():
    x = analytic_steady_state(dressed_params(resonant_params(1.0, 1.0, 0.5, 25.0)))
    decomposition = entangled_decomposition(x)
    assert decomposition.delta == pytest.approx(-0.5334707, abs=2e-6)
    assert decomposition.big_g == pytest.approx(0.573427, abs=2e-6)
    assert decomposition.cos2phi == pytest.approx(0.03484, abs=1e-5)
    assert sum(decomposition.weights) == pytest.approx(x.rho22 + x.rho33)
    assert decomposition.weights[0] > decomposition.weights[1] >= 0.0


def test_decomposition_reconstructs_central_block(rng):
    for _ in range(50):
        x = random_xstate(rng)
        block = x.to_matrix()[1:3, 1:3]
        decomposition = entangled_decomposition(x)
        np.testing.assert_allclose(decomposition.reconstruct_block(), block, atol=1e-12)
        vs, va = decomposition.symmetric_state, decomposition.antisymmetric_state
        assert abs(np.vdot(vs, va)) < 1e-12
        assert np.linalg.norm(vs) == pytest.approx(1.0)


def test_decomposition_of_uncorrelated_block():
    x = XState(rho11=0.1, rho22=0.5, rho33=0.2, rho44=0.2, rho23=0.0)
    decomposition = entangled_decomposition(x)
    assert decomposition.cos2phi == pytest.approx(1.0)
    assert decomposition.weights == pytest.approx((0.5, 0.2))


def test_degenerate_block_is_reported():
    x = XState(rho11=0.2, rho22=0.3, rho33=0.3, rho44=0.2, rho23=0.0)
    with pytest.raises(DegenerateBlockError):
        entangled_decomposition(x)
