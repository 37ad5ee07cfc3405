#!/usr/bin/env python3
"""
Validation Module
Cross-module oracle suite: closed form vs secular null space, full vs secular
convergence, off-resonance decoupling and concurrence equivalences
"""

import sys
from dataclasses import replace
from pathlib import Path
from typing import Any, Dict, List

import numpy as np
from scipy.stats import unitary_group

sys.path.insert(0, str(Path(__file__).parent.parent / 'src'))
sys.path.insert(0, str(Path(__file__).parent))

from logger import get_logger
from sim_config import DEFAULT_TOLERANCES, Tolerances
from sim_errors import SimulationError
from model_core import SystemParams
from dressed_analysis import (ClosedFormVariant, DephasingConvention, XState,
                              analytic_steady_state, dressed_params,
                              resonant_params, to_dressed_basis)
from liouvillian import (SecularVariant, build_full_generator,
                         build_secular_generator, density_matrix_violations)
from solver import steady_state
from entanglement import concurrence_general, concurrence_xstate

ORACLE_TOL = 1e-10
EQUIVALENCE_TOL = 1e-10
INVARIANCE_TOL = 1e-10
CONVERGENCE_DELTAS = (25.0, 50.0, 100.0, 200.0)
CONVERGENCE_FINAL_GAP = 0.02
DECOUPLING_LIMIT = 0.01


def _check(name, passed, measured, threshold, detail="") -> Dict[str, Any]:
    return {'name': name, 'passed': bool(passed), 'measured': measured,
            'threshold': threshold, 'detail': detail}


def random_resonant_params(rng: np.random.Generator) -> SystemParams:
    return resonant_params(
        gamma1=float(rng.uniform(0.2, 5.0)),
        gamma2=float(rng.uniform(0.2, 5.0)),
        cos2theta=float(rng.uniform(0.05, 0.95)),
        delta=float(rng.uniform(10.0, 100.0)),
        kr12=float(rng.uniform(0.8, 3.0)),
        cos2eta=float(rng.uniform(0.0, 1.0)),
    )


def random_xstate(rng: np.random.Generator) -> XState:
    pops = rng.dirichlet([2.0, 2.0, 2.0, 2.0])
    magnitude = rng.uniform(0.0, 0.9) * np.sqrt(pops[1] * pops[2])
    return XState(rho11=float(pops[0]), rho22=float(pops[1]), rho33=float(pops[2]),
                  rho44=float(pops[3]),
                  rho23=complex(magnitude * np.exp(1j * rng.uniform(0.0, 2.0 * np.pi))))


def random_entangled_state(rng: np.random.Generator) -> np.ndarray:
    """Full-rank mixture of a random pure state and a random mixed state"""
    psi = rng.normal(size=4) + 1j * rng.normal(size=4)
    psi /= np.linalg.norm(psi)
    g = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    sigma = g @ g.conj().T + 0.1 * np.eye(4)
    sigma /= np.trace(sigma).real
    p = rng.uniform(0.5, 0.9)
    rho = p * np.outer(psi, psi.conj()) + (1.0 - p) * sigma
    return 0.5 * (rho + rho.conj().T)


class Validator:
    """Runs the oracle checks and collects every steady state it produces"""

    def __init__(self, seed=2024, samples=100, tolerances: Tolerances = DEFAULT_TOLERANCES,
                 mutate=False):
        self.logger = get_logger()
        self.seed = seed
        self.samples = samples
        self.tolerances = tolerances
        self.mutate = mutate
        self.states: List[np.ndarray] = []

    def _closed_form(self, params, variant, dephasing):
        dp = dressed_params(params, dephasing=dephasing)
        if self.mutate:
            dp = replace(dp, gamma_bar12=-dp.gamma_bar12)
        return analytic_steady_state(dp, variant=variant, tol=1e-9)

    def check_secular_vs_analytic(self, variant: ClosedFormVariant) -> Dict[str, Any]:
        name = f"secular_vs_analytic_{variant.value}"
        secular = (SecularVariant.RESONANT_MUTUAL if variant is ClosedFormVariant.MUTUAL
                   else SecularVariant.RESONANT_CASCADE)
        rng = np.random.default_rng(self.seed)
        worst = 0.0
        for i in range(self.samples):
            params = random_resonant_params(rng)
            dephasing = (DephasingConvention.QUARTER, DephasingConvention.FULL)[i % 2]
            result = steady_state(build_secular_generator(params, secular, dephasing, self.tolerances),
                                  self.tolerances, basis="dressed")
            self.states.append(result.rho)
            x = self._closed_form(params, variant, dephasing)
            worst = max(worst, float(np.max(np.abs(result.rho - x.to_matrix()))))
        return _check(name, worst <= ORACLE_TOL, worst, ORACLE_TOL,
                      f"{self.samples} random resonant points, max elementwise gap")

    def check_convergence(self) -> Dict[str, Any]:
        gaps = []
        for delta in CONVERGENCE_DELTAS:
            params = resonant_params(1.0, 1.0, 0.5, delta)
            result = steady_state(build_full_generator(params), self.tolerances)
            self.states.append(result.rho)
            x = self._closed_form(params, ClosedFormVariant.MUTUAL, DephasingConvention.FULL)
            rotated = to_dressed_basis(result.rho, 0.5)
            gaps.append(float(np.max(np.abs(rotated - x.to_matrix()))))
        decreasing = all(b < a for a, b in zip(gaps, gaps[1:]))
        return _check("full_vs_secular_convergence", decreasing and gaps[-1] < CONVERGENCE_FINAL_GAP,
                      gaps, CONVERGENCE_FINAL_GAP,
                      f"Delta0 in {list(CONVERGENCE_DELTAS)}, full dephasing; gaps must decrease")

    def check_off_resonance(self) -> Dict[str, Any]:
        params = SystemParams(gamma1=1.0, gamma2=1.0, rabi0=50.0, delta0=100.0, deltaL=0.0)
        result = steady_state(build_full_generator(params), self.tolerances)
        self.states.append(result.rho)
        excited = float((result.rho[0, 0] + result.rho[1, 1]).real)
        conc = concurrence_general(result.rho, tol=1e-10)
        measured = {'atom1_excited': excited, 'concurrence': conc}
        return _check("off_resonance_decoupling",
                      excited < DECOUPLING_LIMIT and conc < DECOUPLING_LIMIT,
                      measured, DECOUPLING_LIMIT, "Delta0=100, rabi0=50")

    def check_concurrence_equivalence(self, count=1000) -> Dict[str, Any]:
        rng = np.random.default_rng(self.seed + 1)
        worst = 0.0
        for _ in range(count):
            x = random_xstate(rng)
            worst = max(worst, abs(concurrence_xstate(x) - concurrence_general(x.to_matrix())))
        return _check("concurrence_equivalence", worst <= EQUIVALENCE_TOL, worst,
                      EQUIVALENCE_TOL, f"{count} random X states")

    def check_local_unitary_invariance(self, count=100) -> Dict[str, Any]:
        rng = np.random.default_rng(self.seed + 2)
        worst = 0.0
        for _ in range(count):
            rho = random_entangled_state(rng)
            u = np.kron(unitary_group.rvs(2, random_state=rng), unitary_group.rvs(2, random_state=rng))
            moved = u @ rho @ u.conj().T
            moved = 0.5 * (moved + moved.conj().T)
            worst = max(worst, abs(concurrence_general(moved, tol=1e-10)
                                   - concurrence_general(rho, tol=1e-10)))
        return _check("local_unitary_invariance", worst <= INVARIANCE_TOL, worst,
                      INVARIANCE_TOL, f"{count} random states and local unitaries")

    def check_physicality(self) -> Dict[str, Any]:
        worst = {'hermiticity': 0.0, 'trace_error': 0.0, 'min_eigenvalue': 0.0}
        for rho in self.states:
            issues = density_matrix_violations(rho)
            worst['hermiticity'] = max(worst['hermiticity'], issues['hermiticity'])
            worst['trace_error'] = max(worst['trace_error'], issues['trace_error'])
            worst['min_eigenvalue'] = min(worst['min_eigenvalue'], issues['min_eigenvalue'])
        passed = (worst['hermiticity'] <= self.tolerances.density
                  and worst['trace_error'] <= self.tolerances.density
                  and worst['min_eigenvalue'] >= -self.tolerances.negativity)
        return _check("physicality", passed, worst,
                      {'density': self.tolerances.density, 'negativity': self.tolerances.negativity},
                      f"{len(self.states)} steady states")

    def _guarded(self, name, func, *args) -> Dict[str, Any]:
        try:
            return func(*args)
        except SimulationError as e:
            self.logger.error(f"{name} raised {type(e).__name__}: {e}",
                              component="Validate", operation=name)
            return _check(name, False, None, None, f"{type(e).__name__}: {e}")

    def run(self) -> Dict[str, Any]:
        self.logger.info(f"Validation started (seed={self.seed}, samples={self.samples}, mutate={self.mutate})",
                         component="Validate", operation="Run")
        checks = [
            self._guarded("secular_vs_analytic_mutual", self.check_secular_vs_analytic,
                          ClosedFormVariant.MUTUAL),
            self._guarded("secular_vs_analytic_cascade", self.check_secular_vs_analytic,
                          ClosedFormVariant.CASCADE),
            self._guarded("full_vs_secular_convergence", self.check_convergence),
            self._guarded("off_resonance_decoupling", self.check_off_resonance),
            self._guarded("concurrence_equivalence", self.check_concurrence_equivalence),
            self._guarded("local_unitary_invariance", self.check_local_unitary_invariance),
            self._guarded("physicality", self.check_physicality),
        ]
        for check in checks:
            level = self.logger.info if check['passed'] else self.logger.warning
            level(f"{check['name']}: {'PASS' if check['passed'] else 'FAIL'} (measured {check['measured']})",
                  component="Validate", operation="Check")
        passed = all(c['passed'] for c in checks)
        failed = [c['name'] for c in checks if not c['passed']]
        self.logger.audit(f"Validation verdict: {'PASSED' if passed else 'FAILED'} "
                          f"(seed={self.seed}, samples={self.samples}, failed={failed})",
                          component="Validate", operation="Verdict")
        return {'passed': passed, 'checks': checks}


def validate(seed=2024, samples=100, tolerances: Tolerances = DEFAULT_TOLERANCES,
             mutate=False) -> Dict[str, Any]:
    """Run the oracle suite; mutate=True flips the sign of gamma_bar12 in the closed form"""
    return Validator(seed=seed, samples=samples, tolerances=tolerances, mutate=mutate).run()
