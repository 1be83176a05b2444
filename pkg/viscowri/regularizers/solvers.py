import logging

import numpy as np
import pandas as pd

from ..errors import InvalidArgumentError
from .measurement import LinearMeasurement, NormalEquations, TvGeometry, default_gamma, tv_model_solve
from .phase import (armijo_search, composite_gradient_step, phase_curvature, phase_misfit,
                    phase_misfit_gradient, phase_penalty)
from .prox import joint_prox_update, separate_ri_prox_update, shrink_pair
from .state import PolarState, RegHyperparams, TvAuxState

LOG_COLUMNS = ['iter', 'data_misfit', 'tv_a', 'phase_reg', 'constraint_violation', 'beta', 'c']


def refine_data(y_running, y0, G, x):
    """Bregman data refinement y <- y + (y0 - G x)."""
    applied = G.apply(x) if isinstance(G, LinearMeasurement) else G @ x
    return y_running + (y0 - applied)


def _tv(x, geometry):
    dx, dz = geometry.operators
    return float(np.sum(np.sqrt(np.abs(dx @ x) ** 2 + np.abs(dz @ x) ** 2)))


class TvSolver:
    """Split-Bregman TV recovery of a complex vector from G x = y, jointly on real and imaginary parts.

    Each call to `step` is one outer iteration: model solve, shrinkage, Bregman update.
    State persists between calls so a caller can interleave steps with other work.
    """
    name = 'TvJoint'

    def __init__(self, geometry: TvGeometry, hyper: RegHyperparams, dtype=complex):
        self.logger = logging.getLogger(self.name)
        self.logger.setLevel(logging.DEBUG)
        self.geometry = geometry
        self.hyper = hyper
        self.state = TvAuxState.zeros(geometry.n, dtype)
        self.normal = NormalEquations()
        self.iteration = 0
        self.rows = []
        self._gammas = (None, None)

    def gammas(self, meas: LinearMeasurement):
        if self._gammas[0] is not meas.operator:
            gx, gz = self.hyper.gamma_x, self.hyper.gamma_z
            if gx is None or gz is None:
                default = default_gamma(meas, self.hyper.lam, self.hyper.gamma_ratio)
                gx = default if gx is None else gx
                gz = default if gz is None else gz
            self._gammas = (meas.operator, (gx, gz))
        return self._gammas[1]

    def _bregman(self, x, prox):
        dx, dz = self.geometry.operators
        gx, gz = dx @ x, dz @ x
        s = self.state
        s.p_x, s.p_z = prox(gx - s.q_x, gz - s.q_z)
        s.q_x += s.p_x - gx
        s.q_z += s.p_z - gz

    def _prox(self, gx, gz):
        return lambda zx, zz: joint_prox_update(zx, zz, gx, gz)

    def _record(self, meas, y_eff, x, **extra):
        residual = meas.apply(x) - y_eff
        row = dict(
            iter=self.iteration,
            data_misfit=0.5 * float(np.vdot(residual, residual).real),
            tv_a=_tv(x, self.geometry),
            phase_reg=np.nan,
            constraint_violation=float(np.linalg.norm(meas.apply(x) - meas.data)),
            beta=np.nan,
            c=np.nan,
        )
        row.update(extra)
        self.rows.append(row)
        if self.iteration % 50 == 0:
            self.logger.debug(f'iter {self.iteration} :: misfit {row["data_misfit"]:.4e} '
                              f':: violation {row["constraint_violation"]:.4e}')

    def step(self, meas: LinearMeasurement, y_eff):
        if meas.shape[1] != self.geometry.n:
            raise InvalidArgumentError(f'Operator has {meas.shape[1]} columns, model has {self.geometry.n} cells')
        self.iteration += 1
        gx, gz = self.gammas(meas)
        x = tv_model_solve(meas, y_eff, self.state, self.hyper.lam, gx, gz, self.geometry, normal=self.normal)
        self._bregman(x, self._prox(gx, gz))
        self._record(meas, y_eff, x)
        return x

    def run(self, meas: LinearMeasurement, refine=True):
        y0 = meas.data
        y = y0.copy()
        x = None
        for _ in range(self.hyper.max_iters):
            x = self.step(meas, y)
            if refine:
                y = refine_data(y, y0, meas, x)
        self.logger.info(f'{self.iteration} iterations :: violation {self.rows[-1]["constraint_violation"]:.4e}')
        return x

    @property
    def log(self):
        return pd.DataFrame(self.rows, columns=LOG_COLUMNS)


class SeparateTvSolver(TvSolver):
    """TV on real and imaginary parts separately, weighted tau and 1 - tau."""
    name = 'TvSeparate'

    def _prox(self, gx, gz):
        return lambda zx, zz: separate_ri_prox_update(zx, zz, gx, gz, self.hyper.tau)


class PolarTvSolver(TvSolver):
    """Alternates a TV-regularized magnitude solve with a regularized phase step.

    The phase starts at zero. The magnitude is solved in the real normal equations of G diag(e^{i theta})
    and clamped at zero. The phase takes one composite gradient step with Armijo backtracking.
    The curvature is estimated on the first iteration and only doubled when the search stagnates.
    """
    name = 'TvPolar'

    def __init__(self, geometry: TvGeometry, hyper: RegHyperparams):
        super().__init__(geometry, hyper, dtype=float)
        self.polar = PolarState.zeros(geometry.n)
        self.curvature = None

    def objective(self, theta, a, meas, y_eff):
        hyper = self.hyper
        return ((1 - hyper.tau) * phase_penalty(theta, self.geometry, hyper.phase_reg)
                + hyper.lam * phase_misfit(theta, a, meas, y_eff))

    def step(self, meas: LinearMeasurement, y_eff):
        if meas.shape[1] != self.geometry.n:
            raise InvalidArgumentError(f'Operator has {meas.shape[1]} columns, model has {self.geometry.n} cells')
        self.iteration += 1
        hyper = self.hyper
        gx, gz = self.gammas(meas)

        rotated = meas.with_phase(self.polar.theta)
        a = tv_model_solve(rotated, y_eff, self.state, hyper.lam, gx, gz, self.geometry,
                           real=True, normal=self.normal)
        a = np.maximum(a.real, 0.0)
        self._bregman(a, lambda zx, zz: shrink_pair(zx, zz, hyper.tau / gx, hyper.tau / gz))

        theta = self.polar.theta
        if self.curvature is None:
            self.curvature = phase_curvature(a, meas, hyper.curvature)
        c = self.curvature
        grad = phase_misfit_gradient(theta, a, meas, y_eff)
        delta = composite_gradient_step(theta, grad, c, hyper, self.geometry)
        search = armijo_search(theta, delta, hyper, lambda t: self.objective(t, a, meas, y_eff))
        if search.stagnated:
            self.curvature = 2 * c
            self.logger.warning(f'iter {self.iteration} :: phase step stagnated '
                                f':: curvature {np.max(self.curvature):.4e}')
        self.polar = PolarState(a, theta - search.beta * delta)

        x = self.polar.x
        self._record(meas, y_eff, x,
                     tv_a=_tv(a, self.geometry),
                     phase_reg=phase_penalty(self.polar.theta, self.geometry, hyper.phase_reg),
                     beta=search.beta, c=float(np.max(c)))
        return x


def _measurement(G, y):
    return G if isinstance(G, LinearMeasurement) else LinearMeasurement(G, y)


def _geometry(meas, geometry):
    return geometry or TvGeometry.signal(meas.shape[1])


def alg1_solve(G, y, hyper: RegHyperparams, refine=True, geometry: TvGeometry = None):
    """Joint real/imaginary TV recovery. Returns the solution vector."""
    meas = _measurement(G, y)
    return TvSolver(_geometry(meas, geometry), hyper).run(meas, refine)


def alg2_solve(G, y, hyper: RegHyperparams, refine=True, geometry: TvGeometry = None):
    """Separate real/imaginary TV recovery."""
    meas = _measurement(G, y)
    return SeparateTvSolver(_geometry(meas, geometry), hyper).run(meas, refine)


def alg3_solve(G, y, hyper: RegHyperparams, refine=True, geometry: TvGeometry = None) -> PolarState:
    """Magnitude TV plus phase regularization. Returns the final magnitude and phase."""
    meas = _measurement(G, y)
    solver = PolarTvSolver(_geometry(meas, geometry), hyper)
    solver.run(meas, refine)
    return solver.polar


SOLVERS = {
    'alg1': TvSolver,
    'alg2': SeparateTvSolver,
    'alg3': PolarTvSolver,
}
