"""Validity of band-wise frequency-independent models: time-domain wavefields from exact and piecewise mappings."""
import logging

import numpy as np
import pandas as pd

from ..attenuation import AttenuationPair, band_staircase, piecewise_band_models
from ..errors import InvalidArgumentError
from ..fields import RealField
from ..helmholtz import SourceTerm, assemble, extended_index, solve_forward, synthesize_traces
from ..irwri import build_batches, frequency_plan
from .common import checked, make_grid, model_at, pml_profile, reference_omega, wavelet
from .metrics import MetricsReport, relative_discrepancy
from .writers import OutputWriter


def band_of_each(frequencies, batches):
    """Index of the first batch holding each frequency."""
    owner = np.full(len(frequencies), -1)
    for k, batch in enumerate(batches):
        for f in batch:
            match = np.flatnonzero(np.isclose(frequencies, f) & (owner < 0))
            owner[match] = k
    if np.any(owner < 0):
        raise InvalidArgumentError('Some frequencies belong to no batch')
    return owner


class PiecewiseExperiment:
    def __init__(self, config):
        self.logger = logging.getLogger('Piecewise')
        self.logger.setLevel(logging.DEBUG)
        self.config = config
        self.logger.info('Ready')

    def spectra(self, models, frequencies, pml, source, receiver, physical):
        """Receiver spectrum and physical-grid wavefield spectra for one model per frequency."""
        config = self.config
        grid = models[0].grid
        signature = wavelet(config)
        trace = np.zeros(len(frequencies), dtype=complex)
        fields = np.zeros((len(frequencies), grid.n), dtype=complex)
        for k, (f, m) in enumerate(zip(frequencies, models)):
            omega = 2 * np.pi * f
            system = assemble(grid, m, omega, pml, config.irwri.stencil)
            u = solve_forward(system, SourceTerm(source, signature.amplitude(omega))).values
            trace[k] = u[receiver]
            fields[k] = u[physical]
        return trace, fields

    def run(self):
        config = self.config
        grid = make_grid(config)
        m = config.model
        pair = checked(lambda: AttenuationPair(RealField.constant(grid, m.velocity),
                                               RealField.constant(grid, m.alpha)).check_physical(), '[model]')
        omega_r = reference_omega(config)
        f = config.frequencies
        frequencies = checked(lambda: frequency_plan(f.f_min, f.f_max, f.df), '[frequencies]')
        batches = checked(lambda: build_batches(f.f_min, f.f_max, f.df, f.batch_size, f.overlap), '[frequencies]')
        owner = band_of_each(frequencies, batches)

        pml = pml_profile(config, m.velocity)
        n_layers = pml.n_layers
        iz, ix = grid.nz // 2, grid.nx // 2
        offset = int(round(config.acquisition.source_offset / grid.h))
        if ix + offset >= grid.nx:
            raise InvalidArgumentError(f'Receiver offset {config.acquisition.source_offset} m leaves the grid')
        source = int(extended_index(grid, n_layers, iz, ix))
        receiver = int(extended_index(grid, n_layers, iz, ix + offset))
        cz, cx = grid.cell(np.arange(grid.n))
        physical = extended_index(grid, n_layers, cz, cx)

        out = config.output
        times = np.linspace(0.0, out.trace_duration, out.trace_samples)
        omegas = 2 * np.pi * frequencies
        writer = OutputWriter(config.scenario.output, out.write_fields)
        report = MetricsReport('piecewise', config.scenario.seed)
        traces = {'time': times}

        for kind in config.attenuation.extraction_kinds:
            exact_models = [model_at(pair, kind, omega_r)(omega) for omega in omegas]
            band_models = piecewise_band_models(pair, batches, kind, omega_r)
            piecewise_models = [band_models[k] for k in owner]

            exact_trace, exact_fields = self.spectra(exact_models, frequencies, pml, source, receiver, physical)
            band_trace, band_fields = self.spectra(piecewise_models, frequencies, pml, source, receiver, physical)
            traces[f'exact_{kind}'] = synthesize_traces(omegas, exact_trace, times)
            traces[f'piecewise_{kind}'] = synthesize_traces(omegas, band_trace, times)
            linf, l2 = relative_discrepancy(traces[f'piecewise_{kind}'], traces[f'exact_{kind}'])
            report.extra[f'{kind}_linf'] = linf
            report.extra[f'{kind}_l2'] = l2

            staircase = band_staircase(m.velocity, m.alpha, omega_r, batches, kind)
            writer.table(f'staircase_{kind}.csv', staircase)
            for label, target in (('low', frequencies[0] + 1.0), ('high', frequencies[-1])):
                row = staircase.iloc[int(np.argmin(np.abs(staircase['frequency'] - target)))]
                report.extra[f'{kind}_velocity_deviation_{label}'] = float(
                    abs(row['velocity_band'] - row['velocity_exact']) / row['velocity_exact'])
                q_gap = abs(row['inverse_q_band'] - row['inverse_q_exact'])
                report.extra[f'{kind}_inverse_q_deviation_{label}'] = float(
                    q_gap / row['inverse_q_exact'] if row['inverse_q_exact'] != 0 else q_gap)

            snapshot = [out.snapshot_time]
            writer.field(f'snapshot_exact_{kind}.vwf',
                         RealField(grid, synthesize_traces(omegas, exact_fields, snapshot)[0]))
            writer.field(f'snapshot_piecewise_{kind}.vwf',
                         RealField(grid, synthesize_traces(omegas, band_fields, snapshot)[0]))
            self.logger.info(f'{kind} :: linf {linf:.4e} :: l2 {l2:.4e}')

        writer.table('traces.csv', pd.DataFrame(traces))
        writer.report('metrics.json', report)
        writer.manifest(config, {'bands': len(batches)})
        return report


def piecewise_wavefield_experiment(config):
    return PiecewiseExperiment(config).run()
