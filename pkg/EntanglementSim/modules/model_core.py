#!/usr/bin/env python3
"""
Model Core Module
Physical parameters of the two-atom system and the collective coupling U12

Units: hbar = 1 and every rate or frequency is expressed in units of gamma1
(gamma1 = 1 unless overridden).
"""

import math
import sys
from dataclasses import asdict, dataclass, replace
from pathlib import Path
from typing import Any, Dict, Optional

import numpy as np

sys.path.insert(0, str(Path(__file__).parent.parent / 'src'))

from logger import get_logger
from sim_errors import ParameterError

# Orientation-averaged dipoles
COS2ETA_AVERAGED = 1.0 / 3.0
# Quarter-wavelength separation
KR12_QUARTER_WAVE = math.pi / 2


@dataclass(frozen=True)
class SystemParams:
    """All rates and detunings defining one simulation point"""

    gamma1: float = 1.0
    gamma2: float = 1.0
    rabi0: float = 0.0
    delta0: float = 0.0
    deltaL: float = 0.0
    kr12: float = KR12_QUARTER_WAVE
    cos2eta: float = COS2ETA_AVERAGED
    # Sensitivity studies only; None means "computed from U12"
    omega12_override: Optional[float] = None
    gamma12_override: Optional[float] = None

    def __post_init__(self):
        for name, value in asdict(self).items():
            if value is not None and not math.isfinite(value):
                raise ParameterError(f"{name} must be finite, got {value}")
        if self.gamma1 <= 0 or self.gamma2 <= 0:
            raise ParameterError(
                f"decay rates must be positive (gamma1={self.gamma1}, gamma2={self.gamma2})")
        if self.kr12 <= 0:
            raise ParameterError(f"kr12 must be positive, got {self.kr12}")
        if not 0.0 <= self.cos2eta <= 1.0:
            raise ParameterError(f"cos2eta must lie in [0, 1], got {self.cos2eta}")
        if self.rabi0 < 0:
            raise ParameterError(f"rabi0 must be non-negative, got {self.rabi0}")

    @property
    def omega(self) -> float:
        """Generalized Rabi frequency (rabi0^2 + deltaL^2)^(1/2)"""
        return math.hypot(self.rabi0, self.deltaL)

    @property
    def delta(self) -> float:
        """Delta = delta0 + deltaL"""
        return self.delta0 + self.deltaL

    def with_values(self, **changes) -> 'SystemParams':
        return replace(self, **changes)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class CollectiveCoupling:
    """U12 with its coherent (real) and dissipative (-imaginary) parts"""

    u12: complex
    omega12: float
    gamma12: float

    @classmethod
    def from_u12(cls, u12: complex) -> 'CollectiveCoupling':
        u12 = complex(u12)
        return cls(u12=u12, omega12=u12.real, gamma12=-u12.imag)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'u12_real': self.u12.real,
            'u12_imag': self.u12.imag,
            'omega12': self.omega12,
            'gamma12': self.gamma12,
        }


def compute_u12(params: SystemParams) -> CollectiveCoupling:
    """Evaluate the collective coupling U12 for the given geometry

    U12 = -3/2 sqrt(g1 g2) { (1 - cos^2 eta)/kr
                             + (1 - 3 cos^2 eta)[i/kr^2 - 1/kr^3] } exp(i kr)
    """
    kr = params.kr12
    if kr <= 0:
        raise ParameterError(f"kr12 must be positive, got {kr}")
    c2 = params.cos2eta
    bracket = (1.0 - c2) / kr + (1.0 - 3.0 * c2) * (1j / kr**2 - 1.0 / kr**3)
    u12 = -1.5 * math.sqrt(params.gamma1 * params.gamma2) * bracket * np.exp(1j * kr)
    return CollectiveCoupling.from_u12(u12)


def effective_coupling(params: SystemParams) -> CollectiveCoupling:
    """compute_u12 with the sensitivity overrides applied"""
    coupling = compute_u12(params)
    if params.omega12_override is None and params.gamma12_override is None:
        return coupling

    omega12 = coupling.omega12 if params.omega12_override is None else params.omega12_override
    gamma12 = coupling.gamma12 if params.gamma12_override is None else params.gamma12_override
    get_logger().debug(f"Coupling override engaged: omega12={omega12}, gamma12={gamma12}",
                       component="ModelCore", operation="Coupling")
    return CollectiveCoupling(u12=complex(omega12, -gamma12), omega12=omega12, gamma12=gamma12)


def rate_matrix(params: SystemParams, gamma12: Optional[float] = None) -> np.ndarray:
    """2x2 matrix of damping rates gamma_ij"""
    if gamma12 is None:
        gamma12 = effective_coupling(params).gamma12
    return np.array([[params.gamma1, gamma12],
                     [gamma12, params.gamma2]], dtype=float)


def split_rates(alpha: float, total: float = 2.0):
    """(gamma1, gamma2) with gamma1 + gamma2 = total and (g1 - g2)/(g1 + g2) = alpha"""
    if not -1.0 < alpha < 1.0:
        raise ParameterError(f"alpha must lie in (-1, 1), got {alpha}")
    return 0.5 * total * (1.0 + alpha), 0.5 * total * (1.0 - alpha)


if __name__ == "__main__":
    demo = SystemParams()
    coupling = compute_u12(demo)
    print(f"kr12=pi/2, cos2eta=1/3: omega12={coupling.omega12:.3e}, gamma12={coupling.gamma12:.6f}")
