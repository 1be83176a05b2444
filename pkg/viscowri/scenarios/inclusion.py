import logging
import time

import numpy as np

from ..attenuation import AttenuationPair, FrequencySpec
from ..fields import RealField
from ..irwri import FrequencyBatch, IrwriService, frequency_plan, model_data
from .common import (checked, check_regularizers, initial_model, make_grid, model_at, reference_omega, reg_hyperparams,
                     stopping_criteria, survey)
from .extract import extract_physical, mechanism_comparison
from .metrics import MetricsReport, model_error
from .writers import OutputWriter


def inclusion_models(grid, section):
    """True (v, alpha): a fast circle on the right, an attenuating circle on the left, a slow attenuating
    rectangle in the middle, over a homogeneous background.

    Returns the pair and the masks of the three inclusions.
    """
    z, x = grid.coordinates()
    width, depth = (grid.nx - 1) * grid.h, (grid.nz - 1) * grid.h
    circle_v = (x - 0.8 * width) ** 2 + (z - 0.5 * depth) ** 2 <= section.radius ** 2
    circle_alpha = (x - 0.2 * width) ** 2 + (z - 0.5 * depth) ** 2 <= section.radius ** 2
    rectangle = (np.abs(x - 0.5 * width) <= section.rect_width / 2) & (np.abs(z - 0.5 * depth) <= section.rect_height / 2)

    v = np.full(grid.n, section.velocity)
    alpha = np.full(grid.n, section.alpha)
    v[circle_v] = section.circle_velocity
    alpha[circle_alpha] = section.circle_alpha
    v[rectangle] = section.rect_velocity
    alpha[rectangle] = section.rect_alpha
    pair = AttenuationPair(RealField(grid, v), RealField(grid, alpha))
    return pair, {'circle_v': circle_v, 'circle_alpha': circle_alpha, 'rectangle': rectangle}


class InclusionExperiment:
    def __init__(self, config):
        self.logger = logging.getLogger('Inclusion')
        self.logger.setLevel(logging.DEBUG)
        self.config = config
        self.logger.info('Ready')

    def run(self, pair: AttenuationPair = None, initial=None):
        config = self.config
        grid = make_grid(config)
        masks = {}
        if pair is None:
            pair, masks = inclusion_models(grid, config.model)
        omega_r = reference_omega(config)
        f = config.frequencies
        batch = checked(lambda: FrequencyBatch(tuple(frequency_plan(f.f_min, f.f_max, f.df))), '[frequencies]')
        srv = survey(config, grid, float(pair.v.values.max()))
        writer = OutputWriter(config.scenario.output, config.output.write_fields)
        report = MetricsReport('inclusion', config.scenario.seed)

        self.logger.info(f'Data :: {config.attenuation.data_kind} :: {batch.label} :: '
                         f'{srv.n_sources} sources :: {srv.n_receivers} receivers')
        data = model_data(srv, model_at(pair, config.attenuation.data_kind, omega_r), batch.frequencies,
                          config.scenario.threads)

        freq = FrequencySpec(2 * np.pi * config.attenuation.f_extraction, omega_r)
        m_true = model_at(pair, config.attenuation.data_kind, omega_r)(freq.omega)
        m_init = initial if initial is not None else initial_model(config, grid, float(np.mean(batch.omegas)))
        writer.field('v_true.vwf', pair.v)
        writer.field('alpha_true.vwf', pair.alpha)
        writer.field('m_true.vwf', m_true)

        results = {}
        for reg in check_regularizers(config.regularization.regs):
            service = IrwriService(srv, reg, reg_hyperparams(config), config.irwri.lam, config.irwri.gamma,
                                   stopping_criteria(config), config.scenario.threads)
            start = time.perf_counter()
            m_est, log = service.run_batch(m_init, batch, data)
            report.wall_times[reg] = time.perf_counter() - start
            report.misfit_history[reg] = log['data_residual'].tolist()
            writer.table(f'log_{reg}.csv', log)
            writer.field(f'm_{reg}.vwf', m_est)
            for attribute in ('real', 'imag', 'magnitude', 'phase'):
                report.add_error(reg, attribute, model_error(m_est, m_true, attribute))

            for kind in config.attenuation.extraction_kinds:
                est = extract_physical(m_est, kind, freq, strict=False)
                writer.field(f'v_{reg}_{kind}.vwf', est.v)
                writer.field(f'alpha_{reg}_{kind}.vwf', est.alpha)
                valid = np.isfinite(est.v.values)
                report.add_error(f'{reg}_{kind}', 'v', model_error(est.v, pair.v, 'v', valid))
                report.add_error(f'{reg}_{kind}', 'alpha', model_error(est.alpha, pair.alpha, 'alpha', valid))
                results[(reg, kind)] = est

            cells, summary = mechanism_comparison(m_est, freq)
            writer.table(f'mechanisms_{reg}.csv', cells)
            for key, value in summary.items():
                report.extra[f'{reg}_{key}'] = value
            if masks:
                self._inclusion_summary(report, reg, results, masks)

        self._profiles(writer, grid, pair, results)
        writer.report('metrics.json', report)
        writer.manifest(config, {'frequencies': list(batch.frequencies)})
        return report

    def _inclusion_summary(self, report, reg, results, masks):
        background = ~(masks['circle_v'] | masks['circle_alpha'] | masks['rectangle'])
        for (name, kind), est in results.items():
            if name != reg:
                continue
            report.extra[f'{reg}_{kind}_circle_v_mean'] = float(np.nanmean(est.v.values[masks['circle_v']]))
            attenuating = masks['circle_alpha'] | masks['rectangle']
            report.extra[f'{reg}_{kind}_alpha_inclusion_mean'] = float(np.nanmean(est.alpha.values[attenuating]))
            report.extra[f'{reg}_{kind}_alpha_background_mean'] = float(np.nanmean(est.alpha.values[background]))

    def _profiles(self, writer, grid, pair, results):
        # horizontal cut through the inclusion centres
        iz = grid.nz // 2
        cut = grid.index(iz, np.arange(grid.nx))
        columns = {'x': np.arange(grid.nx) * grid.h,
                   'v_true': pair.v.values[cut], 'alpha_true': pair.alpha.values[cut]}
        for (reg, kind), est in results.items():
            columns[f'v_{reg}_{kind}'] = est.v.values[cut]
            columns[f'alpha_{reg}_{kind}'] = est.alpha.values[cut]
        writer.profile('profile_horizontal.csv', columns)


def inclusion_experiment(config, pair=None, initial=None):
    return InclusionExperiment(config).run(pair, initial)
