import io
import math

import numpy as np
import pandas as pd
import pytest

import sweeps
from dressed_analysis import analytic_steady_state, dressed_params, resonant_params, to_bare_basis
from model_core import SystemParams
from sim_errors import NonPhysicalStateError, ParameterError, SweepRowError
from sweeps import (FIG1_COLUMNS, FIG2_COLUMNS, ModelKind, SweepAxis, SweepResult,
                    SweepSpec, evaluate_point, find_peak, plateau_stats,
                    resonant_rabi, run_detuned_peak_scan, run_fig1_sweep,
                    run_fig2_sweep, save_sweep_csv, write_gnuplot_stub,
                    write_sweep_csv)


def rabi_spec(delta0, start, stop, points, threads=1, **base):
    return SweepSpec(base=SystemParams(delta0=delta0, **base),
                     axes=(SweepAxis('rabi0', start, stop, points),), threads=threads)


def fig2_spec(variant="mutual"):
    return SweepSpec(base=SystemParams(),
                     axes=(SweepAxis('alpha', -0.5, 0.5, 3), SweepAxis('cos2theta', 0.4, 0.5, 2)),
                     variant=variant, threads=1)


def test_axis_validation():
    assert SweepAxis('rabi0', 0.0, 10.0, 11).step == pytest.approx(1.0)
    with pytest.raises(ParameterError):
        SweepAxis('rabi0', 0.0, 1.0, 1)
    with pytest.raises(ParameterError):
        SweepAxis('frequency', 0.0, 1.0, 5)
    with pytest.raises(ParameterError):
        rabi_spec(15.0, 0.0, 1.0, 3).axis('alpha')
    with pytest.raises(ParameterError):
        SweepSpec(base=SystemParams(), axes=())


def test_parabolic_peak_refinement():
    x = np.linspace(0.0, 1.0, 11)
    refined = find_peak(x, -(x - 0.43) ** 2)
    assert refined['peak_x'] == pytest.approx(0.4)
    assert refined['peak_x_refined'] == pytest.approx(0.43)
    edge = find_peak(x, x)
    assert edge['peak_index'] == 10 and edge['peak_x_refined'] == 1.0


def test_plateau_stats():
    stats = plateau_stats(np.arange(10.0), np.full(10, 0.25), 2.0, 6.0)
    assert stats == {'plateau_mean': 0.25, 'plateau_std': 0.0, 'plateau_points': 5}
    assert plateau_stats(np.arange(3.0), np.zeros(3), 5.0, 6.0)['plateau_points'] == 0


def test_fig1_peak_near_sideband_resonance():
    result = run_fig1_sweep(rabi_spec(15.0, 5.0, 25.0, 201))
    assert list(result.table.columns) == FIG1_COLUMNS
    assert len(result) == 201
    # The maximum sits a fraction of gamma1 below rabi0 = delta0
    assert 14.6 <= result.summary['peak_x'] <= 15.0
    assert 14.6 <= result.summary['peak_x_refined'] <= 15.0
    assert result.summary['peak_value'] > 0.04
    assert result.summary['plateau_points'] > 0
    assert result.metadata['model'] == 'full' and result.metadata['basis'] == 'bare'
    assert result.metadata['basis_states'] == 'e1e2, e1g2, g1e2, g1g2'
    assert result.metadata['grid_points'] == 201


def test_fig1_peak_height_insensitive_to_frequency_offset():
    low = run_fig1_sweep(rabi_spec(15.0, 10.0, 20.0, 101))
    high = run_fig1_sweep(rabi_spec(25.0, 20.0, 30.0, 101))
    assert high.summary['peak_value'] == pytest.approx(low.summary['peak_value'], rel=0.10)
    assert 24.7 <= high.summary['peak_x'] <= 25.0
    assert abs(high.summary['peak_x'] - 25.0) < abs(low.summary['peak_x'] - 15.0)


def test_fig1_plateau_is_flat_and_drops_with_frequency_offset():
    low = run_fig1_sweep(rabi_spec(15.0, 2.0, 12.0, 101)).summary
    high = run_fig1_sweep(rabi_spec(25.0, 2.0, 20.0, 181)).summary
    assert low['plateau_points'] > 90 and high['plateau_points'] > 170
    assert high['plateau_mean'] < low['plateau_mean']
    assert low['plateau_std'] < 0.1 * low['plateau_mean']
    assert high['plateau_std'] < 0.1 * high['plateau_mean']


def test_fig1_rows_are_physical():
    table = run_fig1_sweep(rabi_spec(15.0, 0.0, 30.0, 16)).table
    populations = table[['rho11', 'rho22', 'rho33', 'rho44']].sum(axis=1)
    np.testing.assert_allclose(populations, 1.0, atol=1e-10)
    assert (table['concurrence'].between(0.0, 1.0)).all()
    np.testing.assert_allclose(table['atom1_excited'], table['rho11'] + table['rho22'])


def test_threaded_sweep_matches_serial():
    serial = run_fig1_sweep(rabi_spec(15.0, 10.0, 20.0, 12, threads=1))
    threaded = run_fig1_sweep(rabi_spec(15.0, 10.0, 20.0, 12, threads=4))
    pd.testing.assert_frame_equal(serial.table, threaded.table, check_exact=True)


def test_rabi_scans_require_full_model():
    spec = SweepSpec(base=SystemParams(delta0=15.0), axes=(SweepAxis('rabi0', 1.0, 2.0, 3),),
                     model='secular_mutual')
    with pytest.raises(ParameterError):
        run_fig1_sweep(spec)


def test_failing_row_reports_parameters(monkeypatch):
    original = sweeps.evaluate_point

    def flaky(params, *args, **kwargs):
        if params.rabi0 > 5.0:
            raise NonPhysicalStateError("negative eigenvalue -1e-3")
        return original(params, *args, **kwargs)

    monkeypatch.setattr(sweeps, 'evaluate_point', flaky)
    with pytest.raises(SweepRowError) as info:
        run_fig1_sweep(rabi_spec(15.0, 0.0, 10.0, 3))
    assert info.value.row_index == 2
    assert info.value.params['rabi0'] == 10.0


def test_resonant_rabi():
    assert resonant_rabi(SystemParams(delta0=15.0, deltaL=5.0)) == pytest.approx(math.sqrt(375.0))
    assert resonant_rabi(SystemParams(delta0=15.0)) == pytest.approx(15.0)
    assert resonant_rabi(SystemParams(delta0=2.0, deltaL=-3.0)) is None


def test_detuned_peak_follows_generalized_rabi_frequency():
    result = run_detuned_peak_scan(rabi_spec(15.0, 14.0, 24.0, 101, deltaL=5.0))
    summary = result.summary
    assert summary['resonance_reachable']
    assert summary['expected_peak'] == pytest.approx(19.3649, abs=1e-4)
    assert abs(summary['peak_offset']) <= 2 * summary['grid_step']


def test_detuned_scan_without_reachable_resonance():
    result = run_detuned_peak_scan(rabi_spec(1.0, 0.0, 5.0, 6, deltaL=-2.0))
    assert result.summary['resonance_reachable'] is False
    assert result.summary['peak_offset'] is None
    assert result.summary['peak_at_resonance'] is False


def test_fig2_surface_maximum():
    result = run_fig2_sweep(fig2_spec())
    assert list(result.table.columns) == FIG2_COLUMNS
    assert len(result) == 6
    assert result.summary['max_concurrence'] == pytest.approx(0.1478258, abs=1e-6)
    assert result.summary['max_alpha'] == pytest.approx(0.5)
    assert result.summary['max_cos2theta'] == pytest.approx(0.4)
    assert result.summary['invalid_rows'] == 0
    np.testing.assert_allclose(result.table['gamma1'] + result.table['gamma2'], 2.0)
    assert result.metadata['rate_sum'] == 2.0 and result.metadata['basis'] == 'dressed'


def test_fig2_reports_counterpart_variant():
    mutual = run_fig2_sweep(fig2_spec("mutual"))
    cascade = run_fig2_sweep(fig2_spec("cascade"))
    assert mutual.summary['counterpart_variant'] == 'cascade'
    assert mutual.summary['counterpart_max_concurrence'] == \
        pytest.approx(cascade.summary['max_concurrence'])
    assert mutual.summary['counterpart_max_deviation'] == \
        pytest.approx(cascade.summary['counterpart_max_deviation'])
    assert mutual.summary['counterpart_max_deviation'] > 0.0


def test_fig2_variant_maxima_agree_on_default_grid():
    spec = SweepSpec(base=SystemParams(),
                     axes=(SweepAxis('alpha', -0.95, 0.95, 81),
                           SweepAxis('cos2theta', 0.02, 0.98, 81)))
    summary = run_fig2_sweep(spec).summary
    gap = abs(summary['max_concurrence'] - summary['counterpart_max_concurrence'])
    assert gap / summary['max_concurrence'] < 0.15



def test_secular_point_is_closed_form_in_bare_basis():
    params = resonant_params(1.5, 0.5, 0.4, 50.0)
    point = evaluate_point(params, ModelKind.SECULAR_MUTUAL)
    x = analytic_steady_state(dressed_params(params))
    np.testing.assert_allclose(point.rho, to_bare_basis(x.to_matrix(), 0.4), atol=1e-10)
    assert point.cos2theta == pytest.approx(0.4)


def test_result_rejects_non_finite_values():
    with pytest.raises(NonPhysicalStateError):
        SweepResult(kind='fig1', table=pd.DataFrame({'rabi0': [1.0], 'concurrence': [np.nan]}))


def test_csv_has_metadata_and_reads_back():
    result = run_fig2_sweep(fig2_spec())
    stream = io.StringIO()
    write_sweep_csv(result, stream)
    text = stream.getvalue()
    assert text.startswith('# kind: fig2\n')
    assert '# variant: mutual\n' in text
    assert '# code_version: ' in text
    table = pd.read_csv(io.StringIO(text), comment='#')
    assert list(table.columns) == FIG2_COLUMNS
    np.testing.assert_allclose(table['concurrence'], result.table['concurrence'], rtol=1e-11)


def test_csv_output_is_reproducible(tmp_path):
    first = save_sweep_csv(run_fig2_sweep(fig2_spec()), tmp_path / 'a' / 'fig2.csv')
    second = save_sweep_csv(run_fig2_sweep(fig2_spec()), tmp_path / 'b' / 'fig2.csv')
    assert first.read_bytes() == second.read_bytes()


def test_gnuplot_stub(tmp_path):
    result = run_fig1_sweep(rabi_spec(15.0, 0.0, 30.0, 4))
    csv_path = save_sweep_csv(result, tmp_path / 'fig1.csv')
    script = write_gnuplot_stub(result, csv_path)
    assert script.name == 'fig1.gp'
    assert "plot 'fig1.csv' using 1:2" in script.read_text(encoding='utf-8')
