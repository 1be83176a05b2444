import json
from dataclasses import replace

import numpy as np
import pandas as pd
import pytest

from viscowri.attenuation import AttenuationPair, FrequencySpec, kf_forward, sls_forward
from viscowri.errors import ConfigError, ExtractionError, InvalidArgumentError
from viscowri.fields import ComplexField, Grid2D, RealField, read_field, write_field
from viscowri.irwri import build_batches
from viscowri.scenarios import (CONFIGURATIONS, CsExperiment, CustomWorkflow, ExperimentConfig, MetricsReport,
                                OutputWriter, band_of_each, cs_operator, cs_signal, extract_physical,
                                inclusion_experiment, inclusion_models, mechanism_comparison, model_error,
                                piecewise_wavefield_experiment, relative_discrepancy)
from viscowri.scenarios.common import check_regularizers, load_pair, make_grid


def shrink(config, **sections):
    """Copy of a configuration with some fields of some sections replaced."""
    return replace(config, **{name: replace(getattr(config, name), **values) for name, values in sections.items()})


@pytest.mark.parametrize('kind', ['cs1d', 'inclusion', 'piecewise', 'north_sea'])
def test_shipped_configurations_load(kind):
    config = ExperimentConfig.default(kind)
    assert config.source.endswith(f'{kind}.toml')
    assert ExperimentConfig.from_dict(config.to_dict(), config.source) == config


def test_inclusion_configuration_values():
    config = ExperimentConfig.default('inclusion')
    assert (config.grid.nz, config.grid.nx, config.grid.h) == (81, 81, 25.0)
    assert (config.frequencies.f_min, config.frequencies.f_max) == (5.0, 7.0)
    assert config.regularization.regs == ['none', 'alg1', 'alg2', 'alg3']
    assert config.irwri.relative_stop


@pytest.mark.parametrize('values', [
    {'grid': {'bogus': 1}},
    {'nope': {}},
    {'grid': {'nz': 'many'}},
    {'grid': {'nz': 8.5}},
    {'output': {'write_fields': 1}},
    {'pml': {'n_layers': True}},
    {'attenuation': {'extraction_kinds': 'kf'}},
    {'scenario': {'kind': 'marine'}},
    {'scenario': {'threads': 0}},
    {'grid': 3},
])
def test_invalid_configurations(values):
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict(values)


def test_integers_are_accepted_for_numbers():
    config = ExperimentConfig.from_dict({'grid': {'h': 10}, 'regularization': {'gamma': 5}})
    assert config.grid.h == 10.0
    assert isinstance(config.grid.h, float)
    assert config.regularization.gamma == 5.0


def test_loading_reports_unreadable_files(tmp_path):
    with pytest.raises(ConfigError):
        ExperimentConfig.load(tmp_path / 'missing.toml')
    broken = tmp_path / 'broken.toml'
    broken.write_text('[grid\nnz = 3\n')
    with pytest.raises(ConfigError):
        ExperimentConfig.load(broken)
    good = tmp_path / 'good.toml'
    good.write_text('[scenario]\nkind = "cs1d"\nseed = 7\n')
    assert ExperimentConfig.load(good).scenario.seed == 7


def test_overrides_take_precedence():
    config = ExperimentConfig.default('inclusion').with_overrides(seed=3, out='elsewhere', reg='alg2', tau=0.25,
                                                                   threads=2)
    assert config.scenario.seed == 3
    assert config.scenario.output == 'elsewhere'
    assert config.scenario.threads == 2
    assert config.regularization.reg == 'alg2'
    assert config.regularization.regs == ['alg2']
    assert config.regularization.tau == 0.25
    untouched = ExperimentConfig.default('inclusion').with_overrides()
    assert untouched == ExperimentConfig.default('inclusion')


def test_builders_turn_errors_into_config_errors():
    with pytest.raises(ConfigError):
        make_grid(ExperimentConfig.from_dict({'grid': {'nz': 1}}))
    with pytest.raises(ConfigError):
        check_regularizers(['none', 'tikhonov'])
    with pytest.raises(ConfigError):
        load_pair(ExperimentConfig())


def test_model_error():
    truth = np.array([1.0 + 1.0j, 2.0 - 1.0j])
    estimate = np.array([1.0 + 2.0j, 2.0 - 1.0j])
    assert model_error(estimate, truth, 'real') == 0.0
    assert model_error(estimate, truth, 'imag') == pytest.approx(1 / np.sqrt(2))
    assert model_error(truth, truth, 'magnitude') == 0.0
    # wrapped phase difference across the branch cut
    near_pi = np.exp(1j * np.array([3.1, -3.1]))
    assert model_error(near_pi[::-1], near_pi, 'phase') == pytest.approx(
        np.linalg.norm([2 * np.pi - 6.2] * 2) / np.linalg.norm([3.1, 3.1]))
    assert model_error(np.array([0.5, 0.0]), np.zeros(2), 'v') == 0.5
    assert model_error(estimate, truth, 'real', mask=np.array([False, True])) == 0.0
    with pytest.raises(InvalidArgumentError):
        model_error(estimate, truth, 'velocity')


def test_relative_discrepancy():
    linf, l2 = relative_discrepancy([1.0, 2.1], [1.0, 2.0])
    assert linf == pytest.approx(0.05)
    assert l2 == pytest.approx(0.1 / np.sqrt(5))


def test_metrics_report_is_json(tmp_path):
    report = MetricsReport('cs1d', 4)
    report.add_error('alg1', 'real', np.float64(0.25))
    report.misfit_history['alg1'] = [1.0, 0.5]
    path = report.write(tmp_path / 'sub' / 'metrics.json')
    content = json.loads(path.read_text())
    assert content['errors'] == {'alg1': {'real': 0.25}}
    assert content['seed'] == 4
    with pytest.raises(InvalidArgumentError):
        report.add_error('alg1', 'imag', -1.0)


def test_cs_signal():
    signal = cs_signal(500, np.random.default_rng(0))
    assert signal.size == 500
    assert set(np.round(np.abs(signal), 12)) == {0.5, 1.0, 1.5, 2.0}
    assert np.max(np.abs(np.angle(signal))) == pytest.approx(2.5)
    np.testing.assert_array_equal(signal, cs_signal(500, np.random.default_rng(0)))
    G = cs_operator(50, 500, np.random.default_rng(1))
    assert G.shape == (50, 500)
    assert np.mean(np.sum(np.abs(G) ** 2, axis=0)) == pytest.approx(1.0, rel=0.1)


def test_small_compressed_sensing_run(tmp_path):
    config = shrink(ExperimentConfig.default('cs1d'),
                    scenario={'output': str(tmp_path)},
                    model={'length': 60, 'measurements': 40},
                    regularization={'max_iters': 30, 'gamma': None})
    report = CsExperiment(config).run()
    assert sorted(report.errors) == sorted(name for name, _, _ in CONFIGURATIONS)
    for errors in report.errors.values():
        assert set(errors) == {'real', 'imag', 'magnitude', 'phase', 'complex'}
        assert np.isfinite(errors['complex'])
    for name in ('metrics.json', 'manifest.json', 'signals.csv', 'log_alg1.csv', 'log_alg3_tau0.5.csv'):
        assert (tmp_path / name).exists()
    assert len(pd.read_csv(tmp_path / 'log_alg2_tau0.5.csv')) == 30
    manifest = json.loads((tmp_path / 'manifest.json').read_text())
    assert manifest['seed'] == 0
    assert 'metrics.json' in manifest['files']


def test_same_seed_gives_identical_results(tmp_path):
    def run(seed, folder):
        config = shrink(ExperimentConfig.default('cs1d'),
                        scenario={'output': str(tmp_path / folder), 'seed': seed},
                        model={'length': 40, 'measurements': 25},
                        regularization={'max_iters': 10})
        report = CsExperiment(config).run()
        return report.errors, pd.read_csv(tmp_path / folder / 'signals.csv')

    errors, signals = run(7, 'first')
    again, signals_again = run(7, 'second')
    assert errors == again
    pd.testing.assert_frame_equal(signals, signals_again, check_exact=True)
    other, _ = run(8, 'third')
    assert other != errors


@pytest.mark.slow
def test_polar_solver_wins_compressed_sensing(tmp_path):
    config = ExperimentConfig.default('cs1d').with_overrides(out=str(tmp_path))
    errors = CsExperiment(config).run().errors
    best = errors['alg3_tau0.5']['complex']
    assert all(best < errors[name]['complex'] for name in errors if name != 'alg3_tau0.5')
    assert errors['alg3_tau0.5']['magnitude'] <= 0.05


def test_inclusion_geometry():
    config = ExperimentConfig.default('inclusion')
    grid = make_grid(config)
    pair, masks = inclusion_models(grid, config.model)
    z, x = grid.coordinates()
    assert pair.v.values[grid.index(40, 64)] == 1800.0
    assert pair.alpha.values[grid.index(40, 16)] == 0.1
    assert pair.v.values[grid.index(40, 40)] == 1300.0
    assert pair.v.values[grid.index(5, 5)] == 1500.0
    # the rectangle is tall: 800 m along z, 200 m along x
    assert np.ptp(z[masks['rectangle']]) > np.ptp(x[masks['rectangle']])


@pytest.fixture
def tiny_inclusion(tmp_path):
    return shrink(ExperimentConfig.default('inclusion'),
                  scenario={'output': str(tmp_path)},
                  grid={'nz': 20, 'nx': 24},
                  pml={'n_layers': 6},
                  acquisition={'n_sources': 4, 'n_receivers': 16, 'margin': 1},
                  frequencies={'f_min': 5.0, 'f_max': 6.0},
                  model={'radius': 60.0, 'rect_width': 50.0, 'rect_height': 150.0},
                  regularization={'regs': ['none', 'alg1']},
                  irwri={'max_iters': 2, 'eps_b': 1e-30, 'eps_d': 1e-30, 'relative_stop': False})


def test_tiny_inclusion_run(tiny_inclusion, tmp_path):
    report = inclusion_experiment(tiny_inclusion)
    for run in ('none', 'alg1', 'none_kf', 'none_sls', 'alg1_kf', 'alg1_sls'):
        assert run in report.errors
    assert set(report.errors['none']) == {'real', 'imag', 'magnitude', 'phase'}
    assert len(report.misfit_history['alg1']) == 2
    assert 'alg1_sls_circle_v_mean' in report.extra
    assert 'none_v_relative_l2' in report.extra
    for name in ('m_none.vwf', 'v_alg1_sls.vwf', 'log_none.csv', 'mechanisms_alg1.csv', 'profile_horizontal.csv',
                 'v_true.vwf', 'metrics.json', 'manifest.json'):
        assert (tmp_path / name).exists()
    assert read_field(tmp_path / 'm_none.vwf').grid == Grid2D(20, 24, 25.0)
    profile = pd.read_csv(tmp_path / 'profile_horizontal.csv')
    assert len(profile) == 24
    assert 'v_alg1_kf' in profile.columns


def test_inclusion_without_field_output(tiny_inclusion, tmp_path):
    config = shrink(tiny_inclusion, output={'write_fields': False}, regularization={'regs': ['none']},
                    irwri={'max_iters': 1})
    inclusion_experiment(config)
    assert not list(tmp_path.glob('*.vwf'))
    assert (tmp_path / 'metrics.json').exists()


@pytest.mark.slow
def test_polar_inversion_recovers_the_inclusions(tmp_path):
    config = shrink(ExperimentConfig.default('inclusion'),
                    scenario={'output': str(tmp_path)},
                    regularization={'regs': ['alg1', 'alg2', 'alg3']},
                    output={'write_fields': False})
    report = inclusion_experiment(config)
    extra = report.extra
    assert abs(extra['alg3_sls_circle_v_mean'] - 1800.0) <= 0.05 * 1800.0
    assert extra['alg3_sls_alpha_inclusion_mean'] > 3 * extra['alg3_sls_alpha_background_mean']
    alpha_errors = {reg: report.errors[f'{reg}_sls']['alpha'] for reg in ('alg1', 'alg2', 'alg3')}
    assert alpha_errors['alg3'] <= min(alpha_errors['alg1'], alpha_errors['alg2'])
    assert extra['alg3_v_relative_l2'] <= 0.02


def test_band_of_each():
    batches = build_batches(1.0, 3.0, 0.5, 3, 1)
    owner = band_of_each(np.array([1.0, 1.5, 2.0, 2.5, 3.0]), batches)
    np.testing.assert_array_equal(owner, [0, 0, 0, 1, 1])


def test_small_piecewise_run(tmp_path):
    config = shrink(ExperimentConfig.default('piecewise'),
                    scenario={'output': str(tmp_path)},
                    grid={'nz': 41, 'nx': 41},
                    pml={'n_layers': 8},
                    acquisition={'source_offset': 250.0},
                    frequencies={'f_min': 1.0, 'f_max': 4.0, 'df': 0.5, 'batch_size': 3, 'overlap': 1},
                    output={'trace_samples': 51})
    report = piecewise_wavefield_experiment(config)
    for kind in ('kf', 'sls'):
        assert np.isfinite(report.extra[f'{kind}_linf'])
        assert report.extra[f'{kind}_l2'] >= 0
        assert (tmp_path / f'staircase_{kind}.csv').exists()
        assert (tmp_path / f'snapshot_exact_{kind}.vwf').exists()
    traces = pd.read_csv(tmp_path / 'traces.csv')
    assert list(traces.columns) == ['time', 'exact_kf', 'piecewise_kf', 'exact_sls', 'piecewise_sls']
    assert len(traces) == 51


@pytest.mark.slow
def test_band_wise_models_are_negligible_in_the_time_domain(tmp_path):
    config = ExperimentConfig.default('piecewise').with_overrides(out=str(tmp_path))
    report = piecewise_wavefield_experiment(config)
    assert report.extra['sls_linf'] <= 0.05
    assert report.extra['kf_linf'] <= 0.05


def test_piecewise_receiver_must_fit(tmp_path):
    config = shrink(ExperimentConfig.default('piecewise'),
                    scenario={'output': str(tmp_path)}, grid={'nz': 21, 'nx': 21},
                    frequencies={'f_min': 1.0, 'f_max': 2.0, 'df': 0.5})
    with pytest.raises(InvalidArgumentError):
        piecewise_wavefield_experiment(config)


def test_lenient_extraction_marks_bad_cells():
    grid = Grid2D(2, 2, 1.0)
    freq = FrequencySpec.from_hz(6.0, 10.0)
    pair = AttenuationPair(RealField.constant(grid, 2000.0), RealField.constant(grid, 0.05))
    values = sls_forward(pair, freq).values.copy()
    values[2] = -values[2]
    m = ComplexField(grid, values)
    with pytest.raises(ExtractionError):
        extract_physical(m, 'sls', freq)
    lenient = extract_physical(m, 'sls', freq, strict=False)
    assert np.isnan(lenient.v.values[2])
    np.testing.assert_allclose(lenient.v.values[[0, 1, 3]], 2000.0, rtol=1e-10)


def test_mechanism_comparison_of_a_lossless_model():
    grid = Grid2D(3, 3, 10.0)
    m = ComplexField.constant(grid, 1 / 1800.0 ** 2)
    cells, summary = mechanism_comparison(m, FrequencySpec.from_hz(6.0, 10.0))
    assert len(cells) == 9
    assert summary['v_relative_l2'] == pytest.approx(0.0, abs=1e-12)
    assert summary['invalid_cells'] == 0


def test_mechanisms_read_attenuation_differently():
    grid = Grid2D(3, 3, 10.0)
    freq = FrequencySpec.from_hz(6.0, 10.0)
    pair = AttenuationPair(RealField.constant(grid, 1800.0), RealField.constant(grid, 0.1))
    _, summary = mechanism_comparison(kf_forward(pair, freq), freq)
    assert 0 < summary['v_relative_l2'] < 0.02
    assert summary['alpha_mean_abs_diff'] > 0


@pytest.fixture
def custom_config(tmp_path):
    grid = Grid2D(16, 20, 25.0)
    cz, cx = grid.cell(np.arange(grid.n))
    v = np.where((cz >= 8) & (abs(cx - 10) <= 3), 1700.0, 1500.0)
    write_field(tmp_path / 'v.vwf', RealField(grid, v))
    write_field(tmp_path / 'alpha.vwf', RealField.constant(grid, 0.02))
    return shrink(ExperimentConfig.default('north_sea'),
                  scenario={'output': str(tmp_path / 'out'), 'threads': 2},
                  grid={'nz': 16, 'nx': 20},
                  pml={'n_layers': 6},
                  frequencies={'f_min': 3.0, 'f_max': 4.0, 'df': 0.5, 'batch_size': 2, 'overlap': 1},
                  model={'velocity_file': str(tmp_path / 'v.vwf'), 'alpha_file': str(tmp_path / 'alpha.vwf')},
                  irwri={'max_iters': 2, 'eps_b': 1e-30, 'eps_d': 1e-30, 'relative_stop': False},
                  output={'trace_samples': 41})


def test_custom_forward(custom_config, tmp_path):
    workflow = CustomWorkflow(custom_config)
    assert len(workflow.batches) == 2
    data = workflow.forward()
    assert sorted(data) == [3.0, 3.5, 4.0]
    assert data[3.0].shape == (workflow.survey.n_sources, workflow.survey.n_receivers)
    table = pd.read_csv(tmp_path / 'out' / 'data.csv')
    assert len(table) == 3 * workflow.survey.n_sources * workflow.survey.n_receivers
    seismograms = pd.read_csv(tmp_path / 'out' / 'seismograms_true_s0.csv')
    assert len(seismograms) == 41


def test_custom_inversion(custom_config, tmp_path):
    m, report = CustomWorkflow(custom_config).invert()
    assert m.grid == Grid2D(16, 20, 25.0)
    assert set(report.errors) == {'kf', 'sls'}
    out = tmp_path / 'out'
    for name in ('m_batch01.vwf', 'm_batch02.vwf', 'm_final.vwf', 'v_sls.vwf', 'batches.csv', 'log.csv',
                 'mechanisms.csv', 'seismograms_recovered_s0.csv', 'manifest.json'):
        assert (out / name).exists()
    assert len(pd.read_csv(out / 'log.csv')) == 4


def test_custom_model_grid_must_match(custom_config):
    with pytest.raises(ConfigError):
        CustomWorkflow(shrink(custom_config, grid={'nz': 17}))


def test_output_writer_can_skip_fields(tmp_path):
    writer = OutputWriter(tmp_path / 'w', enabled=False)
    assert writer.field('x.vwf', RealField.constant(Grid2D(2, 2, 1.0), 1.0)) is None
    writer.table('t.csv', pd.DataFrame({'a': [1]}))
    assert writer.written == ['t.csv']
