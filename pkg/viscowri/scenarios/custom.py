"""User-supplied models: forward modeling, seismograms and multi-batch inversion with frequency continuation."""
import logging

import numpy as np
import pandas as pd

from ..attenuation import FrequencySpec
from ..helmholtz import synthesize_traces
from ..irwri import IrwriService, batch_table, build_batches, frequency_plan, model_data
from .common import (check_regularizers, checked, initial_model, load_pair, make_grid, model_at, reference_omega,
                     reg_hyperparams, stopping_criteria, survey)
from .extract import extract_physical, mechanism_comparison
from .metrics import MetricsReport, model_error
from .writers import OutputWriter


def seismograms(srv, model_of, frequencies, times, threads=1):
    """Time traces per (source, receiver) from frequency-domain modeling over a uniform plan."""
    data = model_data(srv, model_of, frequencies, threads)
    spectra = np.stack([data[float(f)] for f in frequencies])
    traces = synthesize_traces(2 * np.pi * np.asarray(frequencies), spectra, times)
    return np.moveaxis(traces, 0, -1)


def data_table(data):
    rows = []
    for f, block in sorted(data.items()):
        for s, r in np.ndindex(block.shape):
            rows.append(dict(frequency=f, source=s, receiver=r, real=block[s, r].real, imag=block[s, r].imag))
    return pd.DataFrame(rows, columns=['frequency', 'source', 'receiver', 'real', 'imag'])


class CustomWorkflow:
    def __init__(self, config):
        self.logger = logging.getLogger('Custom')
        self.logger.setLevel(logging.DEBUG)
        self.config = config
        self.grid = make_grid(config)
        self.pair = load_pair(config, self.grid)
        self.omega_r = reference_omega(config)
        self.survey = survey(config, self.grid, float(self.pair.v.values.max()))
        f = config.frequencies
        self.frequencies = checked(lambda: frequency_plan(f.f_min, f.f_max, f.df), '[frequencies]')
        self.batches = checked(lambda: build_batches(f.f_min, f.f_max, f.df, f.batch_size, f.overlap),
                               '[frequencies]')
        self.writer = OutputWriter(config.scenario.output, config.output.write_fields)
        self.logger.info('Ready')

    @property
    def true_model(self):
        return model_at(self.pair, self.config.attenuation.data_kind, self.omega_r)

    def _times(self):
        out = self.config.output
        return np.linspace(0.0, out.trace_duration, out.trace_samples)

    def _write_seismograms(self, name, model_of):
        traces = seismograms(self.survey, model_of, self.frequencies, self._times(), self.config.scenario.threads)
        for s in range(traces.shape[0]):
            columns = {'time': self._times()}
            columns.update({f'r{r}': traces[s, r] for r in range(traces.shape[1])})
            self.writer.table(f'seismograms_{name}_s{s}.csv', pd.DataFrame(columns))
        return traces

    def forward(self):
        """Frequency-domain data of the true model, plus seismograms when enabled."""
        config = self.config
        data = model_data(self.survey, self.true_model, self.frequencies, config.scenario.threads)
        self.writer.table('data.csv', data_table(data))
        if config.output.seismograms:
            self._write_seismograms('true', self.true_model)
        self.writer.manifest(config, {'frequencies': self.frequencies.tolist()})
        self.logger.info(f'Forward :: {len(self.frequencies)} frequencies :: {self.survey.n_sources} sources')
        return data

    def invert(self):
        """Synthetic data from the true model, then IR-WRI over the batch plan low to high."""
        config = self.config
        reg = check_regularizers([config.regularization.reg])[0]
        data = model_data(self.survey, self.true_model, self.frequencies, config.scenario.threads)
        m_init = initial_model(config, self.grid, float(np.mean(self.batches[0].omegas)))
        service = IrwriService(self.survey, reg, reg_hyperparams(config), config.irwri.lam, config.irwri.gamma,
                               stopping_criteria(config), config.scenario.threads)
        m_final, models = service.run_continuation(m_init, self.batches, data)

        report = MetricsReport('custom', config.scenario.seed)
        self.writer.table('batches.csv', batch_table(self.batches))
        self.writer.table('log.csv', service.log)
        for k, m in enumerate(models, 1):
            self.writer.field(f'm_batch{k:02d}.vwf', m)
        self.writer.field('m_final.vwf', m_final)

        freq = FrequencySpec(2 * np.pi * config.attenuation.f_extraction, self.omega_r)
        for kind in config.attenuation.extraction_kinds:
            est = extract_physical(m_final, kind, freq, strict=False)
            self.writer.field(f'v_{kind}.vwf', est.v)
            self.writer.field(f'alpha_{kind}.vwf', est.alpha)
            valid = np.isfinite(est.v.values)
            report.add_error(kind, 'v', model_error(est.v, self.pair.v, 'v', valid))
            report.add_error(kind, 'alpha', model_error(est.alpha, self.pair.alpha, 'alpha', valid))
        cells, summary = mechanism_comparison(m_final, freq)
        self.writer.table('mechanisms.csv', cells)
        report.extra.update(summary)
        report.misfit_history[reg] = service.log['data_residual'].tolist()
        report.wall_times[reg] = float(service.log['wall_time'].sum())

        if config.output.seismograms:
            self._write_seismograms('true', self.true_model)
            self._write_seismograms('recovered', lambda omega: m_final)
        self.writer.report('metrics.json', report)
        self.writer.manifest(config, {'batches': len(self.batches)})
        return m_final, report


def custom_experiment(config):
    return CustomWorkflow(config).invert()
