#!/usr/bin/env python3
"""
Parameter Sweep Module
Rabi-frequency scans of the full model, the closed-form concurrence surface
and CSV emission of the results
"""

import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields
from enum import Enum
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

sys.path.insert(0, str(Path(__file__).parent.parent / 'src'))
sys.path.insert(0, str(Path(__file__).parent))

from logger import get_logger
from platform_detector import platform_detector
from sim_config import DEFAULT_TOLERANCES, Tolerances
from sim_errors import (NonPhysicalStateError, ParameterError, SimulationError,
                        SweepRowError)
from model_core import SystemParams, split_rates
from dressed_analysis import (BARE_BASIS, DRESSED_BASIS, ClosedFormVariant, DephasingConvention,
                              analytic_steady_state, dressed_params,
                              resonant_params, to_bare_basis)
from liouvillian import build_full_generator, build_secular_generator
from solver import SteadyStateResult, steady_state
from entanglement import concurrence_general, concurrence_xstate

FIG1_COLUMNS = ['rabi0', 'concurrence', 'rho11', 'rho22', 'rho33', 'rho44',
                'abs_rho23', 'atom1_excited', 'residual']
FIG2_COLUMNS = ['alpha', 'cos2theta', 'gamma1', 'gamma2', 'concurrence', 'rho11',
                'rho22', 'rho33', 'rho44', 'abs_rho23', 'valid']

# The concurrence surface holds gamma1 + gamma2 fixed; Delta only sets the energy scale
FIG2_RATE_SUM = 2.0
FIG2_DELTA = 50.0

DERIVED_AXES = ('alpha', 'cos2theta')


class ModelKind(Enum):
    FULL = "full"
    SECULAR_MUTUAL = "secular_mutual"
    SECULAR_CASCADE = "secular_cascade"

    @classmethod
    def parse(cls, value) -> 'ModelKind':
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ParameterError(f"unknown model: {value}") from None


@dataclass(frozen=True)
class SweepAxis:
    name: str
    start: float
    stop: float
    points: int

    def __post_init__(self):
        if self.points < 2:
            raise ParameterError(f"axis {self.name} needs at least 2 points, got {self.points}")
        param_names = {f.name for f in fields(SystemParams)}
        if self.name not in param_names and self.name not in DERIVED_AXES:
            raise ParameterError(f"unknown sweep axis: {self.name}")

    @property
    def step(self) -> float:
        return (self.stop - self.start) / (self.points - 1)

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.points)

    def describe(self) -> str:
        return f"{self.name}=[{self.start:g}, {self.stop:g}] x {self.points}"


@dataclass(frozen=True)
class SweepSpec:
    """Base parameters, swept axes and model selection for one sweep"""

    base: SystemParams
    axes: Tuple[SweepAxis, ...]
    model: ModelKind = ModelKind.FULL
    variant: ClosedFormVariant = ClosedFormVariant.MUTUAL
    dephasing: DephasingConvention = DephasingConvention.QUARTER
    threads: int = 0
    tolerances: Tolerances = DEFAULT_TOLERANCES

    def __post_init__(self):
        if not self.axes:
            raise ParameterError("a sweep needs at least one axis")
        object.__setattr__(self, 'model', ModelKind.parse(self.model))
        object.__setattr__(self, 'variant', ClosedFormVariant.parse(self.variant))
        object.__setattr__(self, 'dephasing', DephasingConvention.parse(self.dephasing))

    def axis(self, name: str) -> SweepAxis:
        for axis in self.axes:
            if axis.name == name:
                return axis
        raise ParameterError(f"sweep has no axis named {name}")

    @property
    def grid_size(self) -> int:
        return int(np.prod([a.points for a in self.axes]))

    def worker_count(self) -> int:
        return self.threads if self.threads > 0 else platform_detector.default_worker_count()


@dataclass
class SweepResult:
    """Ordered sweep rows plus the summary and reproducibility metadata"""

    kind: str
    table: pd.DataFrame
    summary: Dict[str, Any] = field(default_factory=dict)
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        numeric = self.table.select_dtypes(include=[np.number])
        if not np.all(np.isfinite(numeric.to_numpy(dtype=float))):
            raise NonPhysicalStateError(f"{self.kind} sweep produced NaN or Inf values")

    def __len__(self):
        return len(self.table)


@dataclass(frozen=True)
class PointEvaluation:
    """Steady state of one parameter point, bare basis"""

    params: SystemParams
    model: ModelKind
    rho: np.ndarray
    concurrence: float
    result: SteadyStateResult
    cos2theta: Optional[float] = None

    @property
    def atom1_excited(self) -> float:
        return float((self.rho[0, 0] + self.rho[1, 1]).real)


def evaluate_point(params: SystemParams, model=ModelKind.FULL,
                   dephasing=DephasingConvention.QUARTER,
                   tolerances: Tolerances = DEFAULT_TOLERANCES) -> PointEvaluation:
    """Steady state and concurrence of one point for the selected model"""
    model = ModelKind.parse(model)
    if model is ModelKind.FULL:
        result = steady_state(build_full_generator(params), tolerances, basis="bare")
        rho, cos2theta = result.rho, None
    else:
        variant = "resonant_mutual" if model is ModelKind.SECULAR_MUTUAL else "resonant_cascade"
        generator = build_secular_generator(params, variant, dephasing, tolerances)
        result = steady_state(generator, tolerances, basis="dressed")
        cos2theta = dressed_params(params, dephasing=dephasing).cos2theta
        rho = to_bare_basis(result.rho, cos2theta)
    return PointEvaluation(params=params, model=model, rho=rho,
                           concurrence=concurrence_general(rho, tol=1e-10),
                           result=result, cos2theta=cos2theta)


def _map_rows(func: Callable[[int, Any], Dict[str, Any]], items: Sequence[Any],
              threads: int) -> List[Dict[str, Any]]:
    """Evaluate rows on a worker pool, results in input order"""
    indexed = list(enumerate(items))
    if threads <= 1 or len(indexed) <= 1:
        return [func(i, item) for i, item in indexed]
    with ThreadPoolExecutor(max_workers=threads) as executor:
        return list(executor.map(lambda pair: func(*pair), indexed))


def find_peak(x: np.ndarray, y: np.ndarray) -> Dict[str, Any]:
    """Grid argmax plus a three-point parabolic refinement (clamped to one step)"""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    idx = int(np.argmax(y))
    refined = float(x[idx])
    if 0 < idx < len(x) - 1:
        y0, y1, y2 = y[idx - 1], y[idx], y[idx + 1]
        curvature = y0 - 2.0 * y1 + y2
        if curvature < 0.0:
            step = x[idx + 1] - x[idx]
            offset = 0.5 * (y0 - y2) / curvature
            refined = float(x[idx] + np.clip(offset, -1.0, 1.0) * step)
    return {'peak_index': idx, 'peak_x': float(x[idx]), 'peak_value': float(y[idx]),
            'peak_x_refined': refined}


def plateau_stats(x: np.ndarray, y: np.ndarray, low: float, high: float) -> Dict[str, Any]:
    mask = (np.asarray(x) >= low) & (np.asarray(x) <= high)
    if not np.any(mask):
        return {'plateau_mean': None, 'plateau_std': None, 'plateau_points': 0}
    values = np.asarray(y)[mask]
    return {'plateau_mean': float(values.mean()), 'plateau_std': float(values.std()),
            'plateau_points': int(mask.sum())}


def _rabi_scan(spec: SweepSpec, operation: str) -> pd.DataFrame:
    logger = get_logger()
    if spec.model is not ModelKind.FULL:
        raise ParameterError(f"{operation} scans use the full model, got {spec.model.value}")
    axis = spec.axis('rabi0')
    values = axis.values()
    threads = spec.worker_count()
    logger.info(f"{operation}: {axis.describe()} on {threads} worker(s)",
                component="Sweep", operation=operation)

    def row(index, rabi0):
        params = spec.base.with_values(rabi0=float(rabi0))
        try:
            point = evaluate_point(params, ModelKind.FULL, spec.dephasing, spec.tolerances)
        except SimulationError as e:
            logger.error(f"Row {index} failed: {e}", component="Sweep", operation=operation)
            raise SweepRowError(str(e), index, params.to_dict()) from e
        rho = point.rho
        return {
            'rabi0': float(rabi0),
            'concurrence': point.concurrence,
            'rho11': float(rho[0, 0].real),
            'rho22': float(rho[1, 1].real),
            'rho33': float(rho[2, 2].real),
            'rho44': float(rho[3, 3].real),
            'abs_rho23': float(abs(rho[1, 2])),
            'atom1_excited': point.atom1_excited,
            'residual': point.result.residual,
        }

    return pd.DataFrame(_map_rows(row, values, threads), columns=FIG1_COLUMNS)


def _base_metadata(spec: SweepSpec, basis: str) -> Dict[str, Any]:
    meta = {f"param_{k}": v for k, v in spec.base.to_dict().items()}
    meta.update({
        'model': spec.model.value,
        'basis': basis,
        'basis_states': ', '.join(BARE_BASIS if basis == 'bare' else DRESSED_BASIS),
        'dephasing': spec.dephasing.value,
        'grid': '; '.join(a.describe() for a in spec.axes),
        'grid_points': spec.grid_size,
    })
    meta.update(platform_detector.version_info())
    return meta


def run_fig1_sweep(spec: SweepSpec) -> SweepResult:
    """Full-model concurrence versus rabi0 with peak and plateau detection"""
    table = _rabi_scan(spec, "Fig1")
    x, y = table['rabi0'].to_numpy(), table['concurrence'].to_numpy()
    summary = find_peak(x, y)
    summary.update(plateau_stats(x, y, 2.0, 0.8 * spec.base.delta0))
    summary['grid_step'] = spec.axis('rabi0').step

    get_logger().info(
        f"Fig1 peak C={summary['peak_value']:.5f} at rabi0={summary['peak_x_refined']:.4f}, "
        f"plateau mean={summary['plateau_mean']}",
        component="Sweep", operation="Fig1")
    return SweepResult(kind="fig1", table=table, summary=summary,
                       metadata=_base_metadata(spec, "bare"))


def resonant_rabi(params: SystemParams) -> Optional[float]:
    """rabi0 at which Omega = Delta, or None when no such drive exists"""
    delta = params.delta
    if delta <= abs(params.deltaL):
        return None
    return math.sqrt(delta * delta - params.deltaL**2)


def run_detuned_peak_scan(spec: SweepSpec) -> SweepResult:
    """Full-model rabi0 scan checking the peak sits where Omega = Delta"""
    logger = get_logger()
    expected = resonant_rabi(spec.base)
    table = _rabi_scan(spec, "Detuned")
    x, y = table['rabi0'].to_numpy(), table['concurrence'].to_numpy()
    step = spec.axis('rabi0').step

    summary = find_peak(x, y)
    summary['grid_step'] = step
    summary['resonance_reachable'] = expected is not None
    summary['expected_peak'] = expected
    if expected is None:
        logger.warning(f"No resonance reachable: Delta={spec.base.delta} <= |deltaL|={abs(spec.base.deltaL)}",
                       component="Sweep", operation="Detuned")
        summary['peak_offset'] = None
        summary['peak_at_resonance'] = False
    else:
        offset = summary['peak_x_refined'] - expected
        summary['peak_offset'] = offset
        summary['peak_at_resonance'] = abs(offset) <= step
        logger.info(f"Detuned peak at {summary['peak_x_refined']:.4f}, expected {expected:.4f}",
                    component="Sweep", operation="Detuned")
    return SweepResult(kind="detuned", table=table, summary=summary,
                       metadata=_base_metadata(spec, "bare"))


def _fig2_point(alpha: float, cos2theta: float, base: SystemParams, variant: ClosedFormVariant,
                dephasing: DephasingConvention, tol: float) -> Dict[str, Any]:
    gamma1, gamma2 = split_rates(alpha, FIG2_RATE_SUM)
    row = {'alpha': float(alpha), 'cos2theta': float(cos2theta),
           'gamma1': gamma1, 'gamma2': gamma2}
    try:
        params = resonant_params(gamma1, gamma2, float(cos2theta), FIG2_DELTA,
                                 base.kr12, base.cos2eta)
        x = analytic_steady_state(dressed_params(params, dephasing=dephasing),
                                  variant=variant, tol=tol)
    except NonPhysicalStateError:
        row.update({'concurrence': 0.0, 'rho11': 0.0, 'rho22': 0.0, 'rho33': 0.0,
                    'rho44': 0.0, 'abs_rho23': 0.0, 'valid': False})
        return row
    row.update({
        'concurrence': concurrence_xstate(x),
        'rho11': x.rho11, 'rho22': x.rho22, 'rho33': x.rho33, 'rho44': x.rho44,
        'abs_rho23': float(abs(x.rho23)),
        'valid': True,
    })
    return row


def _surface(spec: SweepSpec, variant: ClosedFormVariant) -> pd.DataFrame:
    grid = [(a, c) for a in spec.axis('alpha').values() for c in spec.axis('cos2theta').values()]
    tol = max(spec.tolerances.density, 1e-10)

    def row(_index, point):
        return _fig2_point(point[0], point[1], spec.base, variant, spec.dephasing, tol)

    return pd.DataFrame(_map_rows(row, grid, spec.worker_count()), columns=FIG2_COLUMNS)


def _surface_max(table: pd.DataFrame) -> Dict[str, Any]:
    valid = table[table['valid']]
    if valid.empty:
        return {'max_concurrence': 0.0, 'max_alpha': None, 'max_cos2theta': None}
    best = valid.loc[valid['concurrence'].idxmax()]
    return {'max_concurrence': float(best['concurrence']),
            'max_alpha': float(best['alpha']),
            'max_cos2theta': float(best['cos2theta'])}


def run_fig2_sweep(spec: SweepSpec) -> SweepResult:
    """Closed-form concurrence surface over (alpha, cos2theta) at Omega = Delta"""
    logger = get_logger()
    spec.axis('alpha')
    spec.axis('cos2theta')
    counterpart = (ClosedFormVariant.CASCADE if spec.variant is ClosedFormVariant.MUTUAL
                   else ClosedFormVariant.MUTUAL)
    logger.info(f"Fig2: {spec.variant.value} surface, "
                f"{'; '.join(a.describe() for a in spec.axes)}",
                component="Sweep", operation="Fig2")

    table = _surface(spec, spec.variant)
    other = _surface(spec, counterpart)

    both_valid = table['valid'].to_numpy() & other['valid'].to_numpy()
    deviation = np.abs(table['concurrence'].to_numpy() - other['concurrence'].to_numpy())
    summary = _surface_max(table)
    other_max = _surface_max(other)
    summary.update({
        'variant': spec.variant.value,
        'invalid_rows': int((~table['valid']).sum()),
        'counterpart_variant': counterpart.value,
        'counterpart_max_concurrence': other_max['max_concurrence'],
        'counterpart_max_alpha': other_max['max_alpha'],
        'counterpart_max_cos2theta': other_max['max_cos2theta'],
        'counterpart_max_deviation': float(deviation[both_valid].max()) if both_valid.any() else 0.0,
    })
    if summary['invalid_rows']:
        logger.warning(f"{summary['invalid_rows']} grid points left the physical region",
                       component="Sweep", operation="Fig2")
    logger.info(f"Fig2 max C={summary['max_concurrence']:.5f} at alpha={summary['max_alpha']}, "
                f"cos2theta={summary['max_cos2theta']}; counterpart deviation "
                f"{summary['counterpart_max_deviation']:.4f}",
                component="Sweep", operation="Fig2")

    metadata = _base_metadata(spec, "dressed")
    metadata.update({'variant': spec.variant.value, 'rate_sum': FIG2_RATE_SUM,
                     'delta': FIG2_DELTA})
    return SweepResult(kind="fig2", table=table, summary=summary, metadata=metadata)


def _format_value(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_sweep_csv(result: SweepResult, stream) -> None:
    """CSV with '# key: value' metadata lines; no timestamps, so reruns are identical"""
    stream.write(f"# kind: {result.kind}\n")
    for key, value in result.metadata.items():
        stream.write(f"# {key}: {_format_value(value)}\n")
    for key, value in result.summary.items():
        stream.write(f"# summary_{key}: {_format_value(value)}\n")
    result.table.to_csv(stream, index=False, float_format='%.12g', lineterminator='\n')


def save_sweep_csv(result: SweepResult, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='') as f:
        write_sweep_csv(result, f)
    get_logger().info(f"Wrote {len(result)} rows to {path}", component="Sweep", operation="WriteCSV")
    return path


def write_gnuplot_stub(result: SweepResult, csv_path) -> Path:
    """Minimal gnuplot script plotting the concurrence column of a sweep CSV"""
    csv_path = Path(csv_path)
    script = csv_path.with_suffix('.gp')
    lines = ["set datafile separator ','", "set datafile commentschars '#'",
             "set key autotitle columnhead"]
    if result.kind == "fig2":
        lines += ["set xlabel 'alpha'", "set ylabel 'cos^2 theta'", "set zlabel 'C'",
                  f"splot '{csv_path.name}' using 1:2:5 with points pt 7 ps 0.5"]
    else:
        lines += ["set xlabel 'Omega_0 / gamma_1'", "set ylabel 'C'",
                  f"plot '{csv_path.name}' using 1:2 with lines"]
    script.write_text('\n'.join(lines) + '\n', encoding='utf-8')
    return script
