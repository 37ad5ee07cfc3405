#!/usr/bin/env python3
"""
Dissipative Entanglement Simulator
Main orchestrator for steady-state points, figure sweeps and the validation suite
of two collectively damped two-level atoms, one of them laser driven
"""

import argparse
import json
import math
import sys
from dataclasses import fields
from pathlib import Path

import numpy as np

# Add src directory to path
sys.path.insert(0, str(Path(__file__).parent / 'src'))

from logger import get_logger
from platform_detector import CODE_VERSION, platform_detector
from sim_config import Tolerances, load_config, tolerances_from_config
from sim_errors import DegenerateBlockError, SimulationError

# Add modules directory to path
sys.path.insert(0, str(Path(__file__).parent / 'modules'))

PARAM_KEYS = ('gamma1', 'gamma2', 'rabi0', 'delta0', 'deltaL', 'kr12', 'cos2eta')


def _jsonable(value):
    """Convert numpy and complex values for json.dumps"""
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, complex):
        return {'real': value.real, 'imag': value.imag}
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    return value


class EntanglementSimulator:
    """Command orchestrator"""

    def __init__(self, config_file=None, overrides=None):
        self.platform = platform_detector
        self.logger = get_logger()
        self.config = load_config(config_file)
        for key, value in (overrides or {}).items():
            if value is not None:
                self.config[key] = value
        self.logger.set_level(self.config.get('log_level', 'INFO'))
        self.tolerances = tolerances_from_config(self.config)

        self.logger.info(f"Entanglement simulator {CODE_VERSION} on {self.platform}",
                         component="Orchestrator", operation="Start")

    def base_params(self):
        from model_core import SystemParams
        return SystemParams(**{key: float(self.config[key]) for key in PARAM_KEYS})

    def _threads(self):
        return int(self.config.get('threads') or 0)

    def _points(self, default):
        return int(self.config.get('points') or default)

    def run_point(self, args):
        """Steady state, concurrence and dressed analysis of one parameter point"""
        from model_core import effective_coupling
        from dressed_analysis import (BARE_BASIS, DRESSED_BASIS, analytic_steady_state,
                                      dressed_params, to_dressed_basis, xstate_from_matrix)
        from entanglement import concurrence_xstate, entangled_decomposition
        from sweeps import evaluate_point

        params = self.base_params()
        dephasing = self.config['dephasing']
        point = evaluate_point(params, self.config['model'], dephasing, self.tolerances)
        rho = point.rho
        report = {
            'params': params.to_dict(),
            'coupling': effective_coupling(params).to_dict(),
            'model': point.model.value,
            'concurrence': point.concurrence,
            'bare_populations': [float(v) for v in np.diag(rho).real],
            'atom1_excited': point.atom1_excited,
            'solver': point.result.summary(),
            'basis_states': {'bare': list(BARE_BASIS), 'dressed': list(DRESSED_BASIS)},
            'runtime': self.platform.get_info(),
        }

        if params.omega > 0:
            dp = dressed_params(params, dephasing=dephasing)
            rho_dressed = to_dressed_basis(rho, dp.cos2theta)
            x, discarded = xstate_from_matrix(rho_dressed)
            report['dressed'] = dp.to_dict()
            report['dressed_populations'] = [float(v) for v in np.diag(rho_dressed).real]
            report['xstate_projection'] = x.to_dict()
            report['xstate_discarded_weight'] = discarded
            try:
                report['decomposition'] = entangled_decomposition(x).to_dict()
            except DegenerateBlockError as e:
                report['decomposition'] = None
                self.logger.info(f"No entangled decomposition: {e}",
                                 component="Orchestrator", operation="Point")
            if abs(dp.omega - dp.delta) <= self.tolerances.resonance * max(dp.omega, abs(dp.delta)):
                closed = {}
                for variant in ('mutual', 'cascade'):
                    cf = analytic_steady_state(dp, variant=variant)
                    closed[variant] = dict(cf.to_dict(), concurrence=concurrence_xstate(cf))
                report['closed_form'] = closed
        return report

    def _rabi_spec(self, args):
        from sweeps import SweepAxis, SweepSpec
        axis = SweepAxis('rabi0', args.rabi_min, args.rabi_max, self._points(351))
        return SweepSpec(base=self.base_params(), axes=(axis,), model=self.config['model'],
                         dephasing=self.config['dephasing'], threads=self._threads(),
                         tolerances=self.tolerances)

    def run_fig1(self, args):
        from sweeps import run_fig1_sweep
        return run_fig1_sweep(self._rabi_spec(args))

    def run_detuned(self, args):
        from sweeps import run_detuned_peak_scan
        return run_detuned_peak_scan(self._rabi_spec(args))

    def run_fig2(self, args):
        from sweeps import SweepAxis, SweepSpec, run_fig2_sweep
        points = self._points(81)
        axes = (SweepAxis('alpha', args.alpha_min, args.alpha_max, points),
                SweepAxis('cos2theta', args.cos2theta_min, args.cos2theta_max, points))
        spec = SweepSpec(base=self.base_params(), axes=axes, model=self.config['model'],
                         variant=self.config['variant'], dephasing=self.config['dephasing'],
                         threads=self._threads(), tolerances=self.tolerances)
        return run_fig2_sweep(spec)

    def run_validate(self, args):
        from validation import validate
        return validate(seed=args.seed, samples=args.samples, tolerances=self.tolerances,
                        mutate=args.mutate)

    def emit_sweep(self, result, args):
        from sweeps import save_sweep_csv, write_gnuplot_stub, write_sweep_csv
        if args.out and args.out != '-':
            path = save_sweep_csv(result, args.out)
            if args.gnuplot:
                script = write_gnuplot_stub(result, path)
                self.logger.info(f"Gnuplot stub written to {script}",
                                 component="Orchestrator", operation="Emit")
        else:
            write_sweep_csv(result, sys.stdout)

    def run_command(self, name, args):
        """Run one subcommand; returns a status dict in the orchestrator's format"""
        self.logger.info(f"Processing command: {name}", component="Orchestrator", operation=name)
        result = {'command': name, 'status': 'NOT_RUN', 'output': None}
        try:
            if name == 'point':
                report = self.run_point(args)
                print(json.dumps(_jsonable(report), indent=2))
                result['output'] = report
                result['status'] = 'SUCCESS'
            elif name in ('fig1', 'fig2', 'detuned'):
                sweep = getattr(self, f"run_{name}")(args)
                self.emit_sweep(sweep, args)
                result['output'] = sweep.summary
                result['status'] = 'SUCCESS'
            elif name == 'validate':
                report = self.run_validate(args)
                print(json.dumps(_jsonable(report), indent=2))
                result['output'] = report
                result['status'] = 'SUCCESS' if report['passed'] else 'FAILED'
            else:
                self.logger.warning(f"Command {name} not implemented",
                                    component="Orchestrator", operation=name)
                result['status'] = 'NOT_IMPLEMENTED'
        except SimulationError as e:
            self.logger.error(f"{type(e).__name__} in {name}: {e}",
                              component=e.component, operation=e.operation)
            result['status'] = 'ERROR'
            result['error'] = str(e)

        self.logger.info(f"{name}: {result['status']}", component="Orchestrator", operation="Complete")
        return result


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    params = common.add_argument_group('physical parameters (units of gamma1)')
    params.add_argument('--gamma1', type=float, help='Decay rate of atom 1')
    params.add_argument('--gamma2', type=float, help='Decay rate of the driven atom 2')
    params.add_argument('--rabi0', type=float, help='Resonant Rabi frequency at atom 2')
    params.add_argument('--delta0', type=float, help='Atomic frequency difference omega1 - omega2')
    params.add_argument('--deltaL', type=float, help='Laser detuning omega2 - omegaL')
    params.add_argument('--kr12', type=float, help='Interatomic distance k*r12 (pi/2 = quarter wavelength)')
    params.add_argument('--cos2eta', type=float, help='cos^2 of the dipole orientation (1/3 = averaged)')

    run = common.add_argument_group('run control')
    run.add_argument('--model', choices=['full', 'secular_mutual', 'secular_cascade'],
                     help='Steady-state model (sweeps of rabi0 use full)')
    run.add_argument('--variant', choices=['mutual', 'cascade'], help='Closed-form variant for fig2')
    run.add_argument('--dephasing', choices=['quarter', 'full'],
                     help='Dressed dephasing rate: gamma2/4 sin^2 2theta (quarter) or gamma2 sin^2 2theta (full)')
    run.add_argument('--out', type=str, help="Output CSV path for sweeps ('-' or omitted: stdout)")
    run.add_argument('--points', type=int, help='Grid points per swept axis')
    run.add_argument('--threads', type=int, help='Worker threads (0 = physical cores)')
    run.add_argument('--gnuplot', action='store_true', help='Write a gnuplot script stub next to the CSV')
    run.add_argument('--config', type=str, help='Path to JSON configuration file')
    run.add_argument('--verbose', action='store_true', help='Enable debug logging')

    tol = common.add_argument_group('tolerance overrides')
    for f in fields(Tolerances):
        tol.add_argument(f"--tol-{f.name.replace('_', '-')}", dest=f"tol_{f.name}", type=float,
                         help=f"default {f.default:g}")

    parser = argparse.ArgumentParser(
        description='Dissipative two-atom entanglement simulator',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog='''
Examples:
  python3 simulate.py point --rabi0 15 --delta0 15          # One steady state (JSON)
  python3 simulate.py fig1 --delta0 25 --out fig1_d25.csv   # Concurrence vs rabi0
  python3 simulate.py detuned --delta0 15 --deltaL 5        # Peak at Omega = Delta
  python3 simulate.py fig2 --variant cascade --gnuplot --out fig2.csv
  python3 simulate.py validate                              # Oracle suite (exit 2 on failure)

CSV columns:
  fig1, detuned: rabi0,concurrence,rho11,rho22,rho33,rho44,abs_rho23,atom1_excited,residual (bare basis)
  fig2:          alpha,cos2theta,gamma1,gamma2,concurrence,rho11,rho22,rho33,rho44,abs_rho23,valid (dressed basis)
        '''
    )
    parser.add_argument('--version', action='version', version=f'Entanglement Simulator {CODE_VERSION}')
    sub = parser.add_subparsers(dest='command', required=True)

    sub.add_parser('point', parents=[common], help='Single-point report')
    for name in ('fig1', 'detuned'):
        p = sub.add_parser(name, parents=[common], help=f'{name} rabi0 scan (full model)')
        p.add_argument('--rabi-min', type=float, default=0.0)
        p.add_argument('--rabi-max', type=float, default=35.0)
    p = sub.add_parser('fig2', parents=[common], help='Closed-form concurrence surface')
    p.add_argument('--alpha-min', type=float, default=-0.95)
    p.add_argument('--alpha-max', type=float, default=0.95)
    p.add_argument('--cos2theta-min', type=float, default=0.02)
    p.add_argument('--cos2theta-max', type=float, default=0.98)
    p = sub.add_parser('validate', parents=[common], help='Run the oracle suite')
    p.add_argument('--seed', type=int, default=2024)
    p.add_argument('--samples', type=int, default=100)
    p.add_argument('--mutate', action='store_true', help='Flip the sign of gamma_bar12 in the closed form')
    return parser


def config_overrides(args):
    overrides = {key: getattr(args, key, None) for key in PARAM_KEYS}
    for key in ('model', 'variant', 'dephasing', 'points', 'threads'):
        overrides[key] = getattr(args, key, None)
    for f in fields(Tolerances):
        overrides[f"tol_{f.name}"] = getattr(args, f"tol_{f.name}", None)
    if getattr(args, 'verbose', False):
        overrides['log_level'] = 'DEBUG'
    return overrides


def main(argv=None):
    """Main entry point"""
    args = build_parser().parse_args(argv)
    simulator = EntanglementSimulator(config_file=args.config, overrides=config_overrides(args))
    result = simulator.run_command(args.command, args)

    if result['status'] == 'ERROR':
        return 1
    if result['status'] == 'FAILED':
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
