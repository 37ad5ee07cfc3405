#!/usr/bin/env python3
"""
Steady-State Solver Module
Null-space and time-evolution solvers for 16x16 master-equation generators
"""

import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict

import numpy as np
import scipy.linalg
from scipy.integrate import solve_ivp

sys.path.insert(0, str(Path(__file__).parent.parent / 'src'))
sys.path.insert(0, str(Path(__file__).parent))

from logger import get_logger
from sim_config import DEFAULT_TOLERANCES, Tolerances
from sim_errors import (DegenerateSteadyStateError, GeneratorError,
                        IntegrationError, NonPhysicalStateError, ParameterError)
from liouvillian import (check_density_matrix, trace_annihilation_error,
                         unvec, vec)


@dataclass(frozen=True)
class SteadyStateResult:
    """Normalized steady state of a generator with its quality measures"""

    rho: np.ndarray
    residual: float
    generator_norm: float
    hermitization_correction: float
    min_eigenvalue: float
    condition: float
    replaced_row: int
    basis: str = "bare"

    @property
    def relative_residual(self) -> float:
        return self.residual / self.generator_norm if self.generator_norm > 0 else self.residual

    def summary(self) -> Dict[str, Any]:
        return {
            'basis': self.basis,
            'residual': self.residual,
            'relative_residual': self.relative_residual,
            'hermitization_correction': self.hermitization_correction,
            'min_eigenvalue': self.min_eigenvalue,
            'condition': self.condition,
            'replaced_row': self.replaced_row,
        }


def check_generator(generator: np.ndarray, tolerances: Tolerances = DEFAULT_TOLERANCES) -> float:
    """Raise GeneratorError unless vec(I)^T G vanishes (relative to ||G||)"""
    generator = np.asarray(generator)
    n = generator.shape[0]
    dim = int(round(np.sqrt(n)))
    if generator.shape != (n, n) or dim * dim != n:
        raise ParameterError(f"generator must be square with a square dimension, got {generator.shape}")
    error = trace_annihilation_error(generator)
    scale = max(float(np.linalg.norm(generator)), 1.0)
    if error > tolerances.trace_annihilation * scale:
        raise GeneratorError(f"generator does not annihilate the trace (error {error:.3e})")
    return error


def _population_row_to_replace(generator: np.ndarray, dim: int) -> int:
    """Population equation with the largest diagonal-dominance deficit"""
    rows = [k * (dim + 1) for k in range(dim)]
    magnitudes = np.abs(generator[rows, :])
    diagonal = np.abs(generator[rows, rows])
    deficits = magnitudes.sum(axis=1) - 2.0 * diagonal
    return rows[int(np.argmax(deficits))]


def steady_state(generator: np.ndarray, tolerances: Tolerances = DEFAULT_TOLERANCES,
                 basis: str = "bare") -> SteadyStateResult:
    """Solve G vec(rho) = 0 with trace(rho) = 1 through a bordered linear system"""
    logger = get_logger()
    generator = np.asarray(generator, dtype=complex)
    check_generator(generator, tolerances)

    n = generator.shape[0]
    dim = int(round(np.sqrt(n)))
    row = _population_row_to_replace(generator, dim)

    bordered = generator.copy()
    bordered[row, :] = vec(np.eye(dim))
    rhs = np.zeros(n, dtype=complex)
    rhs[row] = 1.0

    condition = float(np.linalg.cond(bordered))
    if not np.isfinite(condition) or condition > tolerances.condition:
        logger.warning(f"Bordered system ill-conditioned (cond={condition:.3e})",
                       component="Solver", operation="SteadyState")
        raise DegenerateSteadyStateError(
            f"steady-state manifold is (near-)degenerate: condition number {condition:.3e}",
            condition=condition)

    lu_piv = scipy.linalg.lu_factor(bordered)
    rho = unvec(scipy.linalg.lu_solve(lu_piv, rhs), dim)

    rho_h = 0.5 * (rho + rho.conj().T)
    correction = float(np.linalg.norm(rho - rho_h))
    if correction > tolerances.hermitization:
        raise NonPhysicalStateError(f"hermitization correction {correction:.3e} too large")

    g_norm = float(np.linalg.norm(generator))
    residual = float(np.linalg.norm(generator @ vec(rho_h)))
    if residual > tolerances.steady_residual * max(g_norm, 1.0):
        raise NonPhysicalStateError(f"steady-state residual {residual:.3e} exceeds tolerance")

    min_eig = float(np.min(np.linalg.eigvalsh(rho_h)))
    if min_eig < -tolerances.negativity:
        logger.error(f"Steady state has negative eigenvalue {min_eig:.3e}",
                     component="Solver", operation="SteadyState")
        raise NonPhysicalStateError(f"steady state has negative eigenvalue {min_eig:.3e}")

    logger.debug(f"Steady state solved (row={row}, cond={condition:.2e}, residual={residual:.2e})",
                 component="Solver", operation="SteadyState")
    return SteadyStateResult(
        rho=rho_h,
        residual=residual,
        generator_norm=g_norm,
        hermitization_correction=correction,
        min_eigenvalue=min_eig,
        condition=condition,
        replaced_row=row,
        basis=basis,
    )


def evolve(generator: np.ndarray, rho0: np.ndarray, t_final: float, dt_max: float = np.inf,
           tolerances: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Integrate d vec(rho)/dt = G vec(rho) from 0 to t_final (DOP853)"""
    generator = np.asarray(generator, dtype=complex)
    rho0 = check_density_matrix(rho0, tol=max(tolerances.density, 1e-10),
                                neg_tol=tolerances.negativity)
    if t_final < 0:
        raise ParameterError(f"t_final must be non-negative, got {t_final}")
    if t_final == 0 or not np.any(generator):
        return rho0.copy()

    solution = solve_ivp(
        lambda _t, y: generator @ y,
        (0.0, float(t_final)),
        vec(rho0),
        method="DOP853",
        rtol=tolerances.rtol,
        atol=tolerances.atol,
        max_step=dt_max,
    )
    if solution.status != 0:
        get_logger().error(f"Integration failed: {solution.message}",
                           component="Solver", operation="Evolve")
        raise IntegrationError(f"integration stopped at t={solution.t[-1]:.6g}: {solution.message}")

    rho = unvec(solution.y[:, -1], rho0.shape[0])
    return 0.5 * (rho + rho.conj().T)
