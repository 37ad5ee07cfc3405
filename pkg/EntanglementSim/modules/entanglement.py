#!/usr/bin/env python3
"""
Entanglement Module
Two-qubit concurrence and the entangled-state decomposition of X states
"""

import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Tuple

import numpy as np

sys.path.insert(0, str(Path(__file__).parent.parent / 'src'))
sys.path.insert(0, str(Path(__file__).parent))

from sim_config import DEFAULT_TOLERANCES
from sim_errors import DegenerateBlockError
from liouvillian import check_density_matrix
from dressed_analysis import XState

SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SPIN_FLIP = np.kron(SIGMA_Y, SIGMA_Y)

# Below this G the central block has no preferred basis
DEGENERATE_BLOCK_TOL = 1e-14


def _psd_sqrt(matrix: np.ndarray) -> np.ndarray:
    values, vectors = np.linalg.eigh(matrix)
    values = np.clip(values, 0.0, None)
    return (vectors * np.sqrt(values)) @ vectors.conj().T


def concurrence_general(rho: np.ndarray, tol: float = DEFAULT_TOLERANCES.density,
                        neg_tol: float = DEFAULT_TOLERANCES.negativity) -> float:
    """Spin-flip concurrence of any two-qubit density matrix

    The product basis is assumed (atom 1 left factor). Uses the Hermitian form
    sqrt(rho) (Y x Y) rho* (Y x Y) sqrt(rho) with round-off negatives clamped.
    """
    rho = check_density_matrix(rho, tol=tol, neg_tol=neg_tol)
    rho = 0.5 * (rho + rho.conj().T)
    sqrt_rho = _psd_sqrt(rho)
    flipped = SPIN_FLIP @ rho.conj() @ SPIN_FLIP
    product = sqrt_rho @ flipped @ sqrt_rho
    product = 0.5 * (product + product.conj().T)
    eigenvalues = np.clip(np.linalg.eigvalsh(product), 0.0, None)
    lambdas = np.sort(np.sqrt(eigenvalues))[::-1]
    value = lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]
    return float(min(1.0, max(0.0, value)))


def concurrence_xstate(x: XState) -> float:
    """C = 2 max(0, |rho23| - sqrt(rho11 rho44))"""
    return 2.0 * max(0.0, abs(x.rho23) - math.sqrt(max(x.rho11 * x.rho44, 0.0)))


@dataclass(frozen=True)
class EntangledDecomposition:
    """Eigen-decomposition of the central {|2>, |3>} block of an X state

    |s> = cos(phi)|2> + sin(phi) e^{-i chi}|3>,  |a> = sin(phi)|2> - cos(phi) e^{-i chi}|3>
    with chi the phase of rho23 (zero for the real closed-form solution).
    """

    cos2phi: float
    weights: Tuple[float, float]
    delta: float
    big_g: float
    phase: float = 0.0

    @property
    def symmetric_state(self) -> np.ndarray:
        c, s = math.sqrt(self.cos2phi), math.sqrt(1.0 - self.cos2phi)
        return np.array([c, s * np.exp(-1j * self.phase)], dtype=complex)

    @property
    def antisymmetric_state(self) -> np.ndarray:
        c, s = math.sqrt(self.cos2phi), math.sqrt(1.0 - self.cos2phi)
        return np.array([s, -c * np.exp(-1j * self.phase)], dtype=complex)

    def reconstruct_block(self) -> np.ndarray:
        vs, va = self.symmetric_state, self.antisymmetric_state
        return self.weights[0] * np.outer(vs, vs.conj()) + self.weights[1] * np.outer(va, va.conj())

    def to_dict(self) -> Dict[str, Any]:
        return {
            'cos2phi': self.cos2phi,
            'weight_s': self.weights[0],
            'weight_a': self.weights[1],
            'delta': self.delta,
            'G': self.big_g,
            'phase': self.phase,
        }


def entangled_decomposition(x: XState) -> EntangledDecomposition:
    delta = x.rho22 - x.rho33
    abs23 = abs(x.rho23)
    big_g = math.sqrt(delta * delta + 4.0 * abs23 * abs23)
    if big_g <= DEGENERATE_BLOCK_TOL:
        raise DegenerateBlockError("central block is proportional to the identity (G = 0)")

    cos2phi = min(1.0, max(0.0, 0.5 + delta / (2.0 * big_g)))
    total = x.rho22 + x.rho33
    phase = float(np.angle(x.rho23)) if abs23 > 0.0 else 0.0
    return EntangledDecomposition(
        cos2phi=cos2phi,
        weights=(0.5 * (total + big_g), 0.5 * (total - big_g)),
        delta=delta,
        big_g=big_g,
        phase=phase,
    )
