"""Compressed sensing of a 1-D complex signal with piecewise-constant magnitude and smooth phase."""
import logging
import time

import numpy as np

from ..errors import InvalidArgumentError
from ..regularizers import SOLVERS, LinearMeasurement, TvGeometry
from .common import reg_hyperparams
from .metrics import MetricsReport, model_error
from .writers import OutputWriter

# (run name, solver, tau); None keeps the configured tau
CONFIGURATIONS = [
    ('alg1', 'alg1', None),
    ('alg2_tau0.5', 'alg2', 0.5),
    ('alg3_tau1', 'alg3', 1.0),
    ('alg3_tau0.5', 'alg3', 0.5),
]

MAGNITUDE_LEVELS = (0.5, 1.0, 1.5, 2.0)
SEGMENT_EDGES = (0.0, 0.2, 0.45, 0.7, 1.0)
MAX_PHASE = 2.5


def cs_signal(n, rng: np.random.Generator):
    """Four constant magnitude segments (levels shuffled by the seed) times a cubic phase, |phase| <= 2.5."""
    if n < 4:
        raise InvalidArgumentError(f'Signal needs at least 4 samples, got {n}')
    t = np.linspace(-1.0, 1.0, n)
    levels = rng.permutation(MAGNITUDE_LEVELS)
    segment = np.searchsorted(np.array(SEGMENT_EDGES[1:-1]) * n, np.arange(n), side='right')
    magnitude = levels[segment]
    coefficients = rng.uniform(-1.0, 1.0, 4)
    phase = np.polynomial.polynomial.polyval(t, coefficients)
    phase *= MAX_PHASE / max(np.max(np.abs(phase)), 1e-12)
    return magnitude * np.exp(1j * phase)


def cs_operator(m, n, rng: np.random.Generator):
    """Complex Gaussian matrix with unit expected column norm."""
    return (rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))) / np.sqrt(2 * m)


class CsExperiment:
    def __init__(self, config):
        self.logger = logging.getLogger('CS1D')
        self.logger.setLevel(logging.DEBUG)
        self.config = config
        self.rng = np.random.default_rng(config.scenario.seed)
        self.logger.info('Ready')

    def run(self, signal=None, configurations=CONFIGURATIONS):
        config = self.config
        n, count = config.model.length, config.model.measurements
        truth = cs_signal(n, self.rng) if signal is None else np.asarray(signal, dtype=complex)
        G = cs_operator(count, truth.size, self.rng)
        meas = LinearMeasurement(G, G @ truth)
        geometry = TvGeometry.signal(truth.size)
        writer = OutputWriter(config.scenario.output)
        report = MetricsReport('cs1d', config.scenario.seed)
        estimates = {'truth': truth}

        for name, solver_name, tau in configurations:
            overrides = {} if tau is None else {'tau': tau}
            hyper = reg_hyperparams(config, **overrides)
            solver = SOLVERS[solver_name](geometry, hyper)
            start = time.perf_counter()
            x = solver.run(meas, refine=config.regularization.refine)
            report.wall_times[name] = time.perf_counter() - start
            estimates[name] = x
            for attribute in ('real', 'imag', 'magnitude', 'phase'):
                report.add_error(name, attribute, model_error(x, truth, attribute))
            report.add_error(name, 'complex', float(np.linalg.norm(x - truth) / max(np.linalg.norm(truth), 1e-300)))
            report.misfit_history[name] = solver.log['constraint_violation'].tolist()
            writer.table(f'log_{name}.csv', solver.log)
            self.logger.info(f'{name} :: error {report.errors[name]["complex"]:.4e} '
                             f':: {report.wall_times[name]:.1f}s')

        columns = {'sample': np.arange(truth.size)}
        for name, x in estimates.items():
            columns[f'{name}_magnitude'] = np.abs(x)
            columns[f'{name}_phase'] = np.angle(x)
        writer.profile('signals.csv', columns)
        writer.report('metrics.json', report)
        writer.manifest(config)
        return report


def cs1d_experiment(config, signal=None):
    return CsExperiment(config).run(signal)
