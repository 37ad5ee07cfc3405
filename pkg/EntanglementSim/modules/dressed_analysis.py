#!/usr/bin/env python3
"""
Dressed-State Analysis Module
Dressed-atom quantities, secular damping rates, the bare/dressed basis change
and the closed-form X-state steady states of the secular model
"""

import math
import sys
from dataclasses import asdict, dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

import numpy as np

sys.path.insert(0, str(Path(__file__).parent.parent / 'src'))
sys.path.insert(0, str(Path(__file__).parent))

from logger import get_logger
from sim_errors import NonPhysicalStateError, ParameterError
from model_core import (COS2ETA_AVERAGED, KR12_QUARTER_WAVE, SystemParams,
                        effective_coupling)

BARE_BASIS = ('e1e2', 'e1g2', 'g1e2', 'g1g2')
DRESSED_BASIS = ('e1+', 'e1-', 'g1+', 'g1-')


class DephasingConvention(Enum):
    """Normalization of the dressed-atom dephasing rate gamma0"""
    QUARTER = "quarter"   # (gamma2/4) sin^2(2 theta)
    FULL = "full"         # gamma2 sin^2(2 theta), the secular limit of the full model

    @classmethod
    def parse(cls, value) -> 'DephasingConvention':
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ParameterError(f"unknown dephasing convention: {value}") from None


class ClosedFormVariant(Enum):
    MUTUAL = "mutual"
    CASCADE = "cascade"

    @classmethod
    def parse(cls, value) -> 'ClosedFormVariant':
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ParameterError(f"unknown closed-form variant: {value}") from None


@dataclass(frozen=True)
class DressedParams:
    """Derived dressed-atom quantities at one parameter point"""

    omega: float
    delta: float
    cos2theta: float
    gamma0: float
    gamma_plus: float
    gamma_minus: float
    gamma_bar12: float
    gamma_total: float
    gamma1: float
    gamma2: float
    gamma12: float
    dephasing: DephasingConvention = DephasingConvention.QUARTER

    @property
    def sin2_2theta(self) -> float:
        return 4.0 * self.cos2theta * (1.0 - self.cos2theta)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data['dephasing'] = self.dephasing.value
        return data


def _dressed_rates(gamma1, gamma2, gamma12, cos2theta, dephasing):
    sin2_2theta = 4.0 * cos2theta * (1.0 - cos2theta)
    if dephasing is DephasingConvention.FULL:
        gamma0 = gamma2 * sin2_2theta
    else:
        gamma0 = 0.25 * gamma2 * sin2_2theta
    gamma_plus = gamma2 * cos2theta**2
    gamma_minus = gamma2 * (1.0 - cos2theta)**2
    gamma_bar12 = gamma12 * cos2theta
    gamma_total = gamma1 + gamma0 + gamma_plus + gamma_minus
    return gamma0, gamma_plus, gamma_minus, gamma_bar12, gamma_total


def dressed_params(params: SystemParams, gamma12: Optional[float] = None,
                   dephasing=DephasingConvention.QUARTER) -> DressedParams:
    """Dressed-atom frequencies, angle and secular rates for a parameter point"""
    dephasing = DephasingConvention.parse(dephasing)
    omega = params.omega
    if omega <= 0.0:
        raise ParameterError("dressing angle undefined: rabi0 = deltaL = 0 (atom 2 is not driven)")
    if gamma12 is None:
        gamma12 = effective_coupling(params).gamma12

    cos2theta = min(1.0, max(0.0, 0.5 + params.deltaL / (2.0 * omega)))
    gamma0, gamma_plus, gamma_minus, gamma_bar12, gamma_total = _dressed_rates(
        params.gamma1, params.gamma2, gamma12, cos2theta, dephasing)

    return DressedParams(
        omega=omega,
        delta=params.delta,
        cos2theta=cos2theta,
        gamma0=gamma0,
        gamma_plus=gamma_plus,
        gamma_minus=gamma_minus,
        gamma_bar12=gamma_bar12,
        gamma_total=gamma_total,
        gamma1=params.gamma1,
        gamma2=params.gamma2,
        gamma12=gamma12,
        dephasing=dephasing,
    )


def dressed_energies(dp: DressedParams) -> Tuple[float, float, float, float]:
    """Energies of the dressed product states |1>..|4>"""
    half_sum = 0.5 * (dp.delta + dp.omega)
    half_diff = 0.5 * (dp.delta - dp.omega)
    return half_sum, half_diff, -half_diff, -half_sum


def resonant_params(gamma1: float, gamma2: float, cos2theta: float, delta: float,
                    kr12: float = KR12_QUARTER_WAVE,
                    cos2eta: float = COS2ETA_AVERAGED) -> SystemParams:
    """SystemParams satisfying Omega = Delta at the requested dressing angle"""
    if delta <= 0.0:
        raise ParameterError(f"resonance Omega = Delta needs Delta > 0, got {delta}")
    if not 0.0 <= cos2theta <= 1.0:
        raise ParameterError(f"cos2theta must lie in [0, 1], got {cos2theta}")
    delta_l = (2.0 * cos2theta - 1.0) * delta
    return SystemParams(
        gamma1=gamma1,
        gamma2=gamma2,
        rabi0=2.0 * delta * math.sqrt(cos2theta * (1.0 - cos2theta)),
        delta0=delta - delta_l,
        deltaL=delta_l,
        kr12=kr12,
        cos2eta=cos2eta,
    )


def dressed_single_atom_rotation(cos2theta: float) -> np.ndarray:
    """Columns are |+> and |-> of the driven atom in the {|e>, |g>} basis"""
    if not 0.0 <= cos2theta <= 1.0:
        raise ParameterError(f"cos2theta must lie in [0, 1], got {cos2theta}")
    c = math.sqrt(cos2theta)
    s = math.sqrt(1.0 - cos2theta)
    return np.array([[c, s],
                     [s, -c]], dtype=complex)


def dressed_basis_rotation(cos2theta: float) -> np.ndarray:
    """4x4 unitary whose columns are the dressed product states in the bare basis"""
    return np.kron(np.eye(2, dtype=complex), dressed_single_atom_rotation(cos2theta))


def to_dressed_basis(rho: np.ndarray, cos2theta: float) -> np.ndarray:
    u = dressed_basis_rotation(cos2theta)
    return u.conj().T @ rho @ u


def to_bare_basis(rho_dressed: np.ndarray, cos2theta: float) -> np.ndarray:
    u = dressed_basis_rotation(cos2theta)
    return u @ rho_dressed @ u.conj().T


@dataclass(frozen=True)
class XState:
    """Density matrix with a diagonal plus the single |2>,|3> coherence pair"""

    rho11: float
    rho22: float
    rho33: float
    rho44: float
    rho23: complex
    basis: str = "dressed"

    @property
    def trace(self) -> float:
        return self.rho11 + self.rho22 + self.rho33 + self.rho44

    @property
    def atom1_excited(self) -> float:
        return self.rho11 + self.rho22

    def to_matrix(self) -> np.ndarray:
        rho = np.diag([self.rho11, self.rho22, self.rho33, self.rho44]).astype(complex)
        rho[1, 2] = self.rho23
        rho[2, 1] = np.conj(self.rho23)
        return rho

    def validate(self, tol: float = 1e-12) -> 'XState':
        pops = (self.rho11, self.rho22, self.rho33, self.rho44)
        if any(p < -tol or p > 1.0 + tol for p in pops):
            raise NonPhysicalStateError(f"population outside [0, 1]: {pops}")
        if abs(self.trace - 1.0) > tol:
            raise NonPhysicalStateError(f"trace {self.trace!r} differs from 1")
        bound = math.sqrt(max(self.rho22, 0.0) * max(self.rho33, 0.0))
        if abs(self.rho23) > bound + tol:
            raise NonPhysicalStateError(
                f"|rho23| = {abs(self.rho23):.3e} exceeds sqrt(rho22 rho33) = {bound:.3e}")
        return self

    def to_dict(self) -> Dict[str, Any]:
        rho23 = complex(self.rho23)
        return {
            'rho11': self.rho11, 'rho22': self.rho22,
            'rho33': self.rho33, 'rho44': self.rho44,
            'rho23_real': rho23.real, 'rho23_imag': rho23.imag,
            'basis': self.basis,
        }


def xstate_from_matrix(rho: np.ndarray, basis: str = "dressed") -> Tuple[XState, float]:
    """Project a 4x4 matrix onto the X-state family

    Returns the X state and the Frobenius norm of the discarded elements.
    """
    rho = np.asarray(rho, dtype=complex)
    x = XState(
        rho11=float(rho[0, 0].real),
        rho22=float(rho[1, 1].real),
        rho33=float(rho[2, 2].real),
        rho44=float(rho[3, 3].real),
        rho23=complex(0.5 * (rho[1, 2] + np.conj(rho[2, 1]))),
        basis=basis,
    )
    discarded = float(np.linalg.norm(rho - x.to_matrix()))
    return x, discarded


def analytic_steady_state(dp: DressedParams, gamma1: Optional[float] = None,
                          variant=ClosedFormVariant.MUTUAL, tol: float = 1e-12) -> XState:
    """Closed-form steady state of the resonant secular model (dressed basis)"""
    variant = ClosedFormVariant.parse(variant)
    g1 = dp.gamma1 if gamma1 is None else gamma1
    g0, gp, gm, gb = dp.gamma0, dp.gamma_plus, dp.gamma_minus, dp.gamma_bar12
    gamma = g1 + g0 + gp + gm
    a = gamma - g0
    gb2 = gb * gb

    if variant is ClosedFormVariant.MUTUAL:
        denom = a * a * (g1 * (gp + gm) - gb2) + (gp + gm) * (g0 * g1 * a + 4.0 * gm * gb2)
    else:
        denom = (gp + gm) * (gamma * g1 * a + 2.0 * gm * gb2)

    if not denom > 0.0:
        raise NonPhysicalStateError(f"{variant.value} denominator is not positive: {denom!r}")

    rho11 = gm * gm * gb2 / denom
    rho22 = gm * (g1 + gp) * gb2 / denom
    rho23 = g1 * gm * a * gb / denom
    if variant is ClosedFormVariant.MUTUAL:
        rho44 = 1.0 - gm * (gamma * g1 * a + 3.0 * gm * gb2) / denom
        rho33 = 1.0 - rho11 - rho22 - rho44
    else:
        rho33 = gm * (gamma * g1 * a + gm * gb2) / denom
        rho44 = 1.0 - rho11 - rho22 - rho33

    x = XState(rho11=rho11, rho22=rho22, rho33=rho33, rho44=rho44, rho23=rho23)
    try:
        return x.validate(tol)
    except NonPhysicalStateError as e:
        get_logger().error(f"Closed form ({variant.value}) left the physical region: {e}",
                           component="Dressed", operation="ClosedForm")
        raise


if __name__ == "__main__":
    dp = dressed_params(resonant_params(1.0, 1.0, 0.5, 25.0))
    for name in ("mutual", "cascade"):
        x = analytic_steady_state(dp, variant=name)
        print(name, {k: round(v, 7) if isinstance(v, float) else v for k, v in x.to_dict().items()})
