#!/usr/bin/env python3
"""
Liouvillian Module
Operators and 16x16 superoperator generators of the two-atom master equation

Vectorization is column stacking: vec(A rho B) = kron(B.T, A) @ vec(rho),
so vec(rho) == rho.reshape(-1, order="F").
Bare basis order: |e1e2>, |e1g2>, |g1e2>, |g1g2> (atom 1 is the left factor).
"""

import sys
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Optional

import numpy as np

sys.path.insert(0, str(Path(__file__).parent.parent / 'src'))
sys.path.insert(0, str(Path(__file__).parent))

from logger import get_logger
from sim_config import DEFAULT_TOLERANCES
from sim_errors import (NonPhysicalStateError, ParameterError, ResonanceError,
                        UnphysicalRatesError)
from model_core import SystemParams, effective_coupling, rate_matrix
from dressed_analysis import (DephasingConvention, dressed_basis_rotation,
                              dressed_params)

HILBERT_DIM = 4

# Single-atom operators in the {|e>, |g>} basis
SIGMA_MINUS = np.array([[0, 0], [1, 0]], dtype=complex)
SIGMA_PLUS = SIGMA_MINUS.T.copy()
SIGMA_Z = np.diag([0.5, -0.5]).astype(complex)
ID2 = np.eye(2, dtype=complex)
ID4 = np.eye(HILBERT_DIM, dtype=complex)


def vec(rho: np.ndarray) -> np.ndarray:
    return np.asarray(rho, dtype=complex).reshape(-1, order="F")


def unvec(v: np.ndarray, dim: Optional[int] = None) -> np.ndarray:
    v = np.asarray(v)
    if dim is None:
        dim = int(round(np.sqrt(v.size)))
    return v.reshape((dim, dim), order="F")


def sprepost(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Superoperator of rho -> a rho b"""
    return np.kron(b.T, a)


def spre(a: np.ndarray) -> np.ndarray:
    return sprepost(a, np.eye(a.shape[0], dtype=complex))


def spost(b: np.ndarray) -> np.ndarray:
    return sprepost(np.eye(b.shape[0], dtype=complex), b)


def hamiltonian_superop(h: np.ndarray) -> np.ndarray:
    """rho -> -i [h, rho]"""
    return -1j * (spre(h) - spost(h))


def lindblad_superop(a: np.ndarray, b: Optional[np.ndarray] = None) -> np.ndarray:
    """rho -> 2 a rho b^dag - b^dag a rho - rho b^dag a  (b defaults to a)"""
    if b is None:
        b = a
    bd = b.conj().T
    return 2.0 * sprepost(a, bd) - spre(bd @ a) - spost(bd @ a)


# Commutator building blocks, named after the printed term shapes
def comm_a_rho_b(a, b):
    """[a, rho b]"""
    return sprepost(a, b) - spost(b @ a)


def comm_a_rho_b_left(a, b):
    """[a rho, b]"""
    return sprepost(a, b) - spre(b @ a)


def comm_rho_a_b(a, b):
    """[rho a, b]"""
    return spost(a @ b) - sprepost(b, a)


def comm_a_b_rho(a, b):
    """[a, b rho]"""
    return spre(a @ b) - sprepost(b, a)


def apply_superop(superop: np.ndarray, rho: np.ndarray) -> np.ndarray:
    return unvec(superop @ vec(rho))


def density_matrix_violations(rho: np.ndarray) -> dict:
    """Hermiticity, trace and negativity measures of a 4x4 matrix"""
    rho = np.asarray(rho, dtype=complex)
    herm = 0.5 * (rho + rho.conj().T)
    return {
        'hermiticity': float(np.max(np.abs(rho - rho.conj().T))),
        'trace_error': float(abs(np.trace(rho) - 1.0)),
        'min_eigenvalue': float(np.min(np.linalg.eigvalsh(herm))),
    }


def check_density_matrix(rho: np.ndarray, tol: float = DEFAULT_TOLERANCES.density,
                         neg_tol: float = DEFAULT_TOLERANCES.negativity) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (HILBERT_DIM, HILBERT_DIM):
        raise ParameterError(f"expected a 4x4 density matrix, got shape {rho.shape}")
    if not np.all(np.isfinite(rho)):
        raise NonPhysicalStateError("density matrix has non-finite entries")
    issues = density_matrix_violations(rho)
    if issues['hermiticity'] > tol:
        raise NonPhysicalStateError(f"not Hermitian (max deviation {issues['hermiticity']:.3e})")
    if issues['trace_error'] > tol:
        raise NonPhysicalStateError(f"trace differs from 1 by {issues['trace_error']:.3e}")
    if issues['min_eigenvalue'] < -neg_tol:
        raise NonPhysicalStateError(f"negative eigenvalue {issues['min_eigenvalue']:.3e}")
    return rho


@dataclass(frozen=True)
class OperatorSet:
    """One-atom operators embedded in the two-atom space

    The dressed operators r_plus, r_minus, r_z are expressed in the dressed
    product basis |1>..|4>, where they share the matrices of the atom-2
    operators.
    """

    s1_plus: np.ndarray
    s1_minus: np.ndarray
    s1_z: np.ndarray
    s2_plus: np.ndarray
    s2_minus: np.ndarray
    s2_z: np.ndarray
    identity: np.ndarray
    cos2theta: Optional[float] = None
    r_plus: Optional[np.ndarray] = None
    r_minus: Optional[np.ndarray] = None
    r_z: Optional[np.ndarray] = None

    @classmethod
    def build(cls, cos2theta: Optional[float] = None) -> 'OperatorSet':
        s2_plus = np.kron(ID2, SIGMA_PLUS)
        s2_minus = np.kron(ID2, SIGMA_MINUS)
        s2_z = np.kron(ID2, SIGMA_Z)
        dressed = {}
        if cos2theta is not None:
            dressed = {'r_plus': s2_plus.copy(), 'r_minus': s2_minus.copy(),
                       'r_z': s2_z.copy()}
        return cls(
            s1_plus=np.kron(SIGMA_PLUS, ID2),
            s1_minus=np.kron(SIGMA_MINUS, ID2),
            s1_z=np.kron(SIGMA_Z, ID2),
            s2_plus=s2_plus,
            s2_minus=s2_minus,
            s2_z=s2_z,
            identity=ID4.copy(),
            cos2theta=cos2theta,
            **dressed,
        )

    def dressed_in_bare_basis(self):
        """(R+, R-, Rz) rewritten in the bare basis"""
        if self.cos2theta is None:
            raise ParameterError("operator set was built without a dressing angle")
        u = dressed_basis_rotation(self.cos2theta)
        ud = u.conj().T
        return tuple(u @ op @ ud for op in (self.r_plus, self.r_minus, self.r_z))


OPERATORS = OperatorSet.build()


def build_h0(params: SystemParams) -> np.ndarray:
    """Atomic energies plus the laser drive on atom 2 (rotating frame)"""
    ops = OPERATORS
    return ((params.delta0 + params.deltaL) * ops.s1_z
            + params.deltaL * ops.s2_z
            + 0.5 * params.rabi0 * (ops.s2_plus + ops.s2_minus))


def build_hd(omega12: float) -> np.ndarray:
    """Coherent dipole-dipole exchange between the atoms"""
    ops = OPERATORS
    return omega12 * (ops.s1_plus @ ops.s2_minus + ops.s1_minus @ ops.s2_plus)


def build_dissipator(gammas) -> np.ndarray:
    """Collective damping superoperator for a 2x2 rate matrix gamma_ij"""
    gammas = np.asarray(gammas)
    if gammas.shape != (2, 2):
        raise ParameterError(f"rate matrix must be 2x2, got {gammas.shape}")
    if np.iscomplexobj(gammas):
        if np.max(np.abs(gammas.imag)) > 0.0:
            raise UnphysicalRatesError("rate matrix must be real")
        gammas = gammas.real
    gammas = gammas.astype(float)
    if gammas[0, 0] <= 0 or gammas[1, 1] <= 0:
        raise UnphysicalRatesError(f"diagonal rates must be positive: {np.diag(gammas)}")
    if gammas[0, 1] != gammas[1, 0]:
        raise UnphysicalRatesError(f"rate matrix must be symmetric: {gammas[0, 1]} != {gammas[1, 0]}")
    min_eig = float(np.min(np.linalg.eigvalsh(gammas)))
    if min_eig < -1e-12 * float(np.max(np.abs(gammas))):
        get_logger().warning(f"Rejected rate matrix with eigenvalue {min_eig:.3e}",
                             component="Liouvillian", operation="Dissipator")
        raise UnphysicalRatesError(f"rate matrix is not positive semidefinite (min eigenvalue {min_eig:.3e})")

    lowering = (OPERATORS.s1_minus, OPERATORS.s2_minus)
    superop = np.zeros((HILBERT_DIM**2, HILBERT_DIM**2), dtype=complex)
    for i in range(2):
        for j in range(2):
            if gammas[i, j] != 0.0:
                superop += gammas[i, j] * lindblad_superop(lowering[j], lowering[i])
    return superop


def build_full_generator(params: SystemParams) -> np.ndarray:
    """Complete generator: -i[H0 + Hd, rho] + collective damping (bare basis)"""
    coupling = effective_coupling(params)
    hamiltonian = build_h0(params) + build_hd(coupling.omega12)
    generator = hamiltonian_superop(hamiltonian) + build_dissipator(rate_matrix(params, coupling.gamma12))
    get_logger().debug(
        f"Full generator built (rabi0={params.rabi0}, delta0={params.delta0}, deltaL={params.deltaL}, "
        f"omega12={coupling.omega12:.3e}, gamma12={coupling.gamma12:.6f})",
        component="Liouvillian", operation="FullGenerator")
    return generator


class SecularVariant(Enum):
    OFF_RESONANCE = "off_resonance"
    RESONANT_MUTUAL = "resonant_mutual"
    RESONANT_CASCADE = "resonant_cascade"

    @classmethod
    def parse(cls, value) -> 'SecularVariant':
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ParameterError(f"unknown secular variant: {value}") from None


def atom1_damping(gamma1: float) -> np.ndarray:
    """gamma1 (2 S1- rho S1+ - S1+ S1- rho - rho S1+ S1-)"""
    return gamma1 * lindblad_superop(OPERATORS.s1_minus)


def dressed_damping(gamma0: float, gamma_plus: float, gamma_minus: float,
                    ops: OperatorSet) -> np.ndarray:
    """Dephasing and dressed-transition damping of the driven atom"""
    rz, rp, rm = ops.r_z, ops.r_plus, ops.r_minus
    return (gamma0 * (comm_a_rho_b(rz, rz) + comm_a_rho_b_left(rz, rz))
            + gamma_plus * (comm_a_rho_b(rm, rp) + comm_a_rho_b_left(rm, rp))
            + gamma_minus * (comm_a_rho_b(rp, rm) + comm_a_rho_b_left(rp, rm)))


def dissipative_coupling(gamma_bar12: float, ops: OperatorSet, cascade: bool = False) -> np.ndarray:
    """Cross-damping between atom 1 and the dressed atom"""
    s1p, s1m, rp, rm = ops.s1_plus, ops.s1_minus, ops.r_plus, ops.r_minus
    forward = comm_a_b_rho(s1p, rm) + comm_rho_a_b(rp, s1m)
    if cascade:
        return gamma_bar12 * forward
    backward = comm_rho_a_b(s1p, rm) + comm_a_b_rho(rp, s1m)
    return gamma_bar12 * (forward + backward)


def build_secular_generator(params: SystemParams, variant, dephasing=DephasingConvention.QUARTER,
                            tolerances=DEFAULT_TOLERANCES) -> np.ndarray:
    """Secular-approximation generator in the dressed product basis"""
    variant = SecularVariant.parse(variant)
    logger = get_logger()

    if variant is SecularVariant.OFF_RESONANCE:
        logger.debug("Off-resonance secular generator (atom-1 damping only)",
                     component="Liouvillian", operation="Secular")
        return atom1_damping(params.gamma1)

    dp = dressed_params(params, dephasing=dephasing)
    scale = max(abs(dp.omega), abs(dp.delta))
    if abs(dp.omega - dp.delta) > tolerances.resonance * scale:
        logger.warning(f"Resonant variant requested with Omega={dp.omega} != Delta={dp.delta}",
                       component="Liouvillian", operation="Secular")
        raise ResonanceError(
            f"{variant.value} requires Omega = Delta (Omega={dp.omega}, Delta={dp.delta}, "
            f"relative tolerance {tolerances.resonance})")

    ops = OperatorSet.build(dp.cos2theta)
    generator = (atom1_damping(dp.gamma1)
                 + dressed_damping(dp.gamma0, dp.gamma_plus, dp.gamma_minus, ops)
                 + dissipative_coupling(dp.gamma_bar12, ops,
                                        cascade=variant is SecularVariant.RESONANT_CASCADE))
    logger.debug(f"{variant.value} generator built (cos2theta={dp.cos2theta:.6f}, "
                 f"gamma_bar12={dp.gamma_bar12:.6f}, dephasing={dp.dephasing.value})",
                 component="Liouvillian", operation="Secular")
    return generator


def trace_annihilation_error(generator: np.ndarray) -> float:
    """max |vec(I)^T G|, zero for a trace-preserving generator"""
    dim = int(round(np.sqrt(generator.shape[0])))
    return float(np.max(np.abs(vec(np.eye(dim)) @ generator)))
