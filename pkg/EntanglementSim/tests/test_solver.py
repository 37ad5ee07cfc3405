import math
from types import SimpleNamespace

import numpy as np
import pytest

import solver
from conftest import random_density_matrix
from dressed_analysis import analytic_steady_state, dressed_params, resonant_params
from entanglement import concurrence_general
from liouvillian import (build_dissipator, build_full_generator,
                         build_secular_generator, vec)
from model_core import SystemParams
from sim_errors import (DegenerateSteadyStateError, GeneratorError,
                        IntegrationError, ParameterError)
from solver import evolve, steady_state

GROUND = np.diag([0, 0, 0, 1]).astype(complex)


def test_decaying_atoms_settle_in_ground_state():
    result = steady_state(build_dissipator([[1.0, 0.3], [0.3, 2.0]]))
    np.testing.assert_allclose(result.rho, GROUND, atol=1e-12)
    assert result.residual <= 1e-10 * result.generator_norm
    assert result.min_eigenvalue >= -1e-8
    assert result.hermitization_correction <= 1e-8


def test_secular_null_space_matches_closed_form():
    params = resonant_params(1.0, 1.0, 0.5, 25.0)
    result = steady_state(build_secular_generator(params, "resonant_mutual"), basis="dressed")
    x = analytic_steady_state(dressed_params(params))
    np.testing.assert_allclose(result.rho, x.to_matrix(), atol=1e-10)
    assert result.basis == "dressed"


def test_full_model_entangles_at_sideband_resonance():
    result = steady_state(build_full_generator(SystemParams(rabi0=15.0, delta0=15.0)))
    assert concurrence_general(result.rho, tol=1e-10) > 0.04


def test_degenerate_generator_is_reported():
    params = SystemParams(rabi0=10.0, delta0=15.0)
    with pytest.raises(DegenerateSteadyStateError) as info:
        steady_state(build_secular_generator(params, "off_resonance"))
    assert info.value.condition is None or info.value.condition > 1e12


def test_non_trace_preserving_generator_is_rejected():
    generator = build_full_generator(SystemParams(rabi0=3.0))
    generator[0, 0] += 0.5
    with pytest.raises(GeneratorError):
        steady_state(generator)


def test_steady_state_is_deterministic():
    generator = build_full_generator(SystemParams(rabi0=12.0, delta0=15.0, deltaL=1.0))
    first = steady_state(generator)
    second = steady_state(generator.copy())
    assert np.array_equal(first.rho, second.rho)
    assert first.replaced_row == second.replaced_row


def test_steady_state_is_physical(rng):
    for _ in range(10):
        params = SystemParams(gamma2=float(rng.uniform(0.3, 5.0)), rabi0=float(rng.uniform(0.0, 30.0)),
                              delta0=float(rng.uniform(-20.0, 20.0)), deltaL=float(rng.uniform(-5.0, 5.0)),
                              kr12=float(rng.uniform(1.0, 4.0)), cos2eta=float(rng.uniform(0.0, 1.0)))
        rho = steady_state(build_full_generator(params)).rho
        assert abs(np.trace(rho) - 1.0) <= 1e-12
        np.testing.assert_allclose(rho, rho.conj().T, atol=1e-12)
        assert np.linalg.eigvalsh(rho).min() >= -1e-8


def test_zero_generator_returns_initial_state(rng):
    rho0 = random_density_matrix(rng)
    np.testing.assert_array_equal(evolve(np.zeros((16, 16)), rho0, 5.0), rho0)


def test_single_atom_decay_rate():
    params = SystemParams(gamma1=1.0, omega12_override=0.0, gamma12_override=0.0)
    rho0 = np.diag([0, 1, 0, 0]).astype(complex)
    rho = evolve(build_full_generator(params), rho0, 1.0)
    assert (rho[0, 0] + rho[1, 1]).real == pytest.approx(math.exp(-2.0), abs=1e-8)


def test_evolution_preserves_trace(rng):
    generator = build_full_generator(SystemParams(rabi0=15.0, delta0=15.0))
    rho = evolve(generator, random_density_matrix(rng), 50.0, dt_max=0.5)
    assert abs(np.trace(rho) - 1.0) <= 1e-9


def test_evolution_converges_to_steady_state(rng):
    for _ in range(5):
        params = SystemParams(gamma2=float(rng.uniform(0.5, 3.0)), rabi0=float(rng.uniform(2.0, 20.0)),
                              delta0=float(rng.uniform(0.0, 20.0)), kr12=float(rng.uniform(1.2, 4.0)))
        generator = build_full_generator(params)
        rates = -np.linalg.eigvals(generator).real
        gap = np.sort(rates)[1]
        t_final = max(50.0, 40.0 / gap)
        rho = evolve(generator, random_density_matrix(rng), t_final)
        target = steady_state(generator).rho
        assert np.max(np.abs(rho - target)) < 1e-6


def test_integration_failure_is_reported(monkeypatch, rng):
    def failing_solve_ivp(fun, t_span, y0, **kwargs):
        return SimpleNamespace(status=-1, message="Required step size is less than spacing between numbers.",
                               t=np.array([0.0, 0.3]), y=np.stack([y0, y0], axis=1))

    monkeypatch.setattr(solver, "solve_ivp", failing_solve_ivp)
    with pytest.raises(IntegrationError):
        evolve(build_full_generator(SystemParams(rabi0=1.0)), random_density_matrix(rng), 1.0)


def test_negative_duration_rejected(rng):
    with pytest.raises(ParameterError):
        evolve(build_full_generator(SystemParams()), random_density_matrix(rng), -1.0)


def test_trace_row_of_bordered_system():
    generator = build_full_generator(SystemParams(rabi0=5.0, delta0=2.0))
    result = steady_state(generator)
    assert result.replaced_row in (0, 5, 10, 15)
    assert abs(vec(np.eye(4)) @ vec(result.rho) - 1.0) < 1e-12
