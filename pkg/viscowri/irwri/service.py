import logging
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pandas as pd

from ..errors import InvalidArgumentError, SolverError
from ..fields import ComplexField
from ..helmholtz import assemble, solve_forward
from ..regularizers import RegHyperparams, TvGeometry
from .state import IrwriState, StopStatus, StoppingCriteria, Survey
from .steps import (REGULARIZERS, RegularizedModelStep, assemble_systems, assemble_virtual_sources, check_stop,
                    dual_update, model_step, source_vectors, wavefield_gamma, wavefield_step)

LOG_COLUMNS = ['batch', 'iter', 'source_residual', 'data_residual', 'model_change', 'wall_time']

# lower bound on Re(m) during inversion, relative to the initial mean
REAL_FLOOR = 1e-2


def batch_data(data, batch):
    """Stack per-frequency data (a mapping Hz -> array[source, receiver]) for the frequencies of a batch."""
    keys = np.array(sorted(data))
    blocks = []
    for f in batch:
        match = np.flatnonzero(np.isclose(keys, f, rtol=1e-9, atol=1e-12))
        if match.size == 0:
            raise InvalidArgumentError(f'No data at {f:g} Hz')
        blocks.append(np.asarray(data[keys[match[0]]], dtype=complex))
    return np.stack(blocks)


def model_data(survey: Survey, model_at, frequencies, threads=1, wavefields=False):
    """Synthetic data d = P A(m(omega))^{-1} b for every frequency and source.

    Args:
      model_at: Callable omega -> ComplexField, the (possibly frequency dependent) model.
      frequencies: Frequencies in Hz.

    Returns:
      Mapping Hz -> array[source, receiver], plus Hz -> array[source, state] when `wavefields` is set.
    """
    P = survey.observation
    data, fields = {}, {}
    with ThreadPoolExecutor(max_workers=max(int(threads), 1)) as executor:
        for f in frequencies:
            omega = 2 * np.pi * f
            system = assemble(survey.grid, model_at(omega), omega, survey.pml, survey.stencil)
            b = source_vectors(survey, system)
            u = np.zeros((survey.n_sources, system.n), dtype=complex)

            def solve(s):
                u[s] = solve_forward(system, b[s]).values

            list(executor.map(solve, range(survey.n_sources)))
            data[float(f)] = u[:, P.indices].copy()
            if wavefields:
                fields[float(f)] = u
    return (data, fields) if wavefields else data


class IrwriService:
    """Iteratively refined wavefield reconstruction inversion over frequency batches."""

    def __init__(self, survey: Survey, reg='none', hyper: RegHyperparams = None, lam=1.0, gamma=None,
                 criteria: StoppingCriteria = None, threads=1):
        self.logger = logging.getLogger('IRWRI')
        self.logger.setLevel(logging.DEBUG)
        if reg not in REGULARIZERS:
            raise InvalidArgumentError(f'Unknown regularizer {reg!r}, expected one of {REGULARIZERS}')
        if not lam > 0 or (gamma is not None and gamma < 0):
            raise InvalidArgumentError(f'Need lam > 0 and gamma >= 0, got {lam}, {gamma}')
        self.survey = survey
        self.reg = reg
        self.hyper = hyper or RegHyperparams()
        self.lam = float(lam)
        self.gamma = gamma
        self.criteria = criteria or StoppingCriteria()
        self.threads = max(int(threads), 1)
        self.rows = []
        self.logger.info('Ready')

    def _floor(self, values, floor):
        low = values.real < floor
        if np.any(low):
            self.logger.warning(f'{np.count_nonzero(low)} cells with Re(m) below {floor:.3e} raised to the floor')
            values = np.where(low, floor + 1j * values.imag, values)
        return values

    def run_batch(self, m_init: ComplexField, batch, data, label=''):
        """Invert one batch starting from `m_init`. Returns the final model and the iteration log."""
        survey = self.survey
        if m_init.grid != survey.grid:
            raise InvalidArgumentError('Initial model grid does not match the survey grid')
        data = batch_data(data, batch) if isinstance(data, dict) else np.asarray(data, dtype=complex)
        state = IrwriState.start(m_init, batch, survey, data)
        systems = assemble_systems(survey, state.m, batch)
        state.b_energy = float(sum(np.sum(np.abs(source_vectors(survey, s)) ** 2) for s in systems))
        gamma = self.gamma if self.gamma is not None else wavefield_gamma(systems, survey, data, self.lam)
        floor = REAL_FLOOR * float(np.mean(m_init.values.real))

        regularized = None
        if self.reg != 'none':
            regularized = RegularizedModelStep(self.reg, self.hyper, TvGeometry.of(survey.grid, per_cell=True),
                                               m_init.values)
        self.logger.info(f'Batch {label or batch.label} :: {len(batch)} frequencies :: reg {self.reg} '
                         f':: lam {self.lam:g} :: gamma {gamma:.4e}')

        rows = []
        status = StopStatus.CONTINUE
        with ThreadPoolExecutor(max_workers=self.threads) as executor:
            while status is StopStatus.CONTINUE:
                start = time.perf_counter()
                wavefield_step(state, systems, survey, data, self.lam, gamma,
                               executor if self.threads > 1 else None)
                vs = assemble_virtual_sources(state, systems, survey)
                values = model_step(vs, self.reg, state.m.values, regularized)
                if not np.all(np.isfinite(values)):
                    raise SolverError('Model update is not finite',
                                      f'iteration {state.iteration + 1} :: {np.count_nonzero(~np.isfinite(values))} cells')
                values = self._floor(values, floor)

                change = np.linalg.norm(values - state.m.values) / max(np.linalg.norm(state.m.values), 1e-300)
                state.m = ComplexField(survey.grid, values)
                systems = assemble_systems(survey, state.m, batch)
                dual_update(state, systems, survey, data)
                state.iteration += 1
                status = check_stop(state, self.criteria)

                rows.append(dict(batch=label or batch.label, iter=state.iteration,
                                 source_residual=state.source_residual, data_residual=state.data_residual,
                                 model_change=change, wall_time=time.perf_counter() - start))
                self.logger.debug(f'iter {state.iteration} :: source {state.source_residual:.4e} '
                                  f':: data {state.data_residual:.4e} :: change {change:.3e}')

        self.logger.info(f'Batch {label or batch.label} :: {status.value} after {state.iteration} iterations')
        self.rows.extend(rows)
        return state.m, pd.DataFrame(rows, columns=LOG_COLUMNS)

    def run_continuation(self, m_init: ComplexField, batches, data):
        """Run the batches low to high, each warm-started from the previous result with fresh duals."""
        if not batches:
            raise InvalidArgumentError('No frequency batches to invert')
        m = m_init
        models = []
        for k, batch in enumerate(batches, 1):
            m, _ = self.run_batch(m, batch, data, label=f'{k}/{len(batches)}')
            models.append(m)
        return m, models

    @property
    def log(self):
        return pd.DataFrame(self.rows, columns=LOG_COLUMNS)
