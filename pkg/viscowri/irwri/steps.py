"""The alternating steps of one IR-WRI iteration."""
import logging

import numpy as np
import scipy.sparse as sp

from ..errors import InvalidArgumentError
from ..fields import ComplexField
from ..helmholtz import assemble, augmented_wavefield_solve
from ..regularizers import SOLVERS, LinearMeasurement, RegHyperparams, TvGeometry
from .state import IrwriState, StopStatus, StoppingCriteria, Survey, VirtualSourceSystem

logger = logging.getLogger('IrwriSteps')
logger.setLevel(logging.DEBUG)

REGULARIZERS = ('none', 'alg1', 'alg2', 'alg3')


def _each(executor, work, jobs):
    if executor is None:
        for job in jobs:
            work(job)
    else:
        list(executor.map(work, jobs))


def assemble_systems(survey: Survey, m: ComplexField, batch):
    return [assemble(survey.grid, m, omega, survey.pml, survey.stencil) for omega in batch.omegas]


def source_vectors(survey: Survey, system):
    """Right-hand sides b, one row per source."""
    return np.stack([system.source_vector(term) for term in survey.sources(system.omega)])


def wavefield_gamma(systems, survey: Survey, data, lam):
    """lam |A^H b|_inf / |P^T d|_inf over the batch."""
    top_b = max(np.max(np.abs(system.A.conj().T @ source_vectors(survey, system).T)) for system in systems)
    top_d = float(np.max(np.abs(data))) if data.size else 0.0
    return lam * top_b / top_d if top_d > 0 else lam


def wavefield_step(state: IrwriState, systems, survey: Survey, data, lam, gamma, executor=None):
    """Reconstruct every (frequency, source) wavefield from source and data terms plus their duals."""
    P = survey.observation
    sources = [source_vectors(survey, system) for system in systems]

    def solve(job):
        l, s = job
        u = augmented_wavefield_solve(systems[l], P, sources[l][s] + state.b_dual[l, s],
                                      data[l, s] + state.d_dual[l, s], lam, gamma)
        state.u[l, s] = u.values

    _each(executor, solve, [(l, s) for l in range(len(systems)) for s in range(survey.n_sources)])
    return state.u


def assemble_virtual_sources(state: IrwriState, systems, survey: Survey) -> VirtualSourceSystem:
    """L = omega^2 C diag(B u) E and y = b_dual + b - Delta u, stacked over frequencies and sources."""
    blocks, rhs = [], []
    for l, system in enumerate(systems):
        b = source_vectors(survey, system)
        for s in range(survey.n_sources):
            u = state.u[l, s]
            blocks.append(system.virtual_source(u))
            rhs.append(state.b_dual[l, s] + b[s] - system.laplacian @ u)
    return VirtualSourceSystem(sp.vstack(blocks, format='csr'), np.concatenate(rhs))


def least_squares_model(vs: VirtualSourceSystem, previous):
    """Per-cell minimizer of |y - L m|^2; cells no virtual source reaches keep their previous value."""
    energy = vs.energy
    numerator = vs.L.conj().T @ vs.y
    m = np.array(previous, dtype=complex)
    reached = energy > 0
    m[reached] = numerator[reached] / energy[reached]
    if not np.all(reached):
        logger.warning(f'{np.count_nonzero(~reached)} cells without virtual-source energy kept their value')
    return m


class RegularizedModelStep:
    """One split-Bregman iteration per call, on a model normalized by the batch's initial mean magnitude.

    Solver states live for a whole batch.
    """

    def __init__(self, reg, hyper: RegHyperparams, geometry: TvGeometry, m_init):
        if reg not in SOLVERS:
            raise InvalidArgumentError(f'Unknown regularizer {reg!r}')
        m_init = np.asarray(m_init, dtype=complex)
        self.scale = float(np.mean(np.abs(m_init))) or 1.0
        self.solver = SOLVERS[reg](geometry, hyper)

    def __call__(self, vs: VirtualSourceSystem):
        G = vs.L * self.scale
        norm = np.sqrt(np.median(np.asarray(abs(G).power(2).sum(axis=0)).ravel()))
        if not norm > 0:
            norm = 1.0
        meas = LinearMeasurement(G / norm, vs.y / norm)
        return self.solver.step(meas, meas.data) * self.scale


def model_step(vs: VirtualSourceSystem, reg, previous, regularized: RegularizedModelStep = None):
    """Model update from the virtual-source system: closed form for 'none', else one regularized iteration."""
    if vs.L.shape[0] == 0:
        raise InvalidArgumentError('Empty virtual-source system')
    if reg == 'none':
        return least_squares_model(vs, previous)
    if regularized is None:
        raise InvalidArgumentError(f'Regularizer {reg!r} needs its per-batch state')
    return regularized(vs)


def dual_update(state: IrwriState, systems, survey: Survey, data):
    """Add the constraint violations at (m^{k+1}, u^{k+1}) to the scaled duals and record their energies."""
    P = survey.observation
    source_total, data_total = 0.0, 0.0
    for l, system in enumerate(systems):
        b = source_vectors(survey, system)
        for s in range(survey.n_sources):
            u = state.u[l, s]
            r_b = b[s] - system.A @ u
            r_d = data[l, s] - u[P.indices]
            state.b_dual[l, s] += r_b
            state.d_dual[l, s] += r_d
            source_total += float(np.vdot(r_b, r_b).real)
            data_total += float(np.vdot(r_d, r_d).real)
    state.source_residual, state.data_residual = source_total, data_total
    return state


def check_stop(state: IrwriState, criteria: StoppingCriteria) -> StopStatus:
    eps_b, eps_d = criteria.eps_b, criteria.eps_d
    if criteria.relative:
        eps_b, eps_d = eps_b * state.b_energy, eps_d * state.d_energy
    if state.source_residual <= eps_b and state.data_residual <= eps_d:
        return StopStatus.CONVERGED
    if state.iteration >= criteria.max_iters:
        return StopStatus.MAX_ITERS
    return StopStatus.CONTINUE
