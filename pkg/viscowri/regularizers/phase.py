"""Phase sub-step of the polar solver: composite gradient step, prox operators and Armijo backtracking."""
from typing import NamedTuple

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from ..errors import SolverError
from .measurement import LinearMeasurement, TvGeometry
from .prox import shrink_pair
from .state import Curvature, PhaseRegularizer, RegHyperparams

POWER_ITERATIONS = 10


class ArmijoResult(NamedTuple):
    beta: float
    """Accepted step length, 0 when the search stagnated."""

    stagnated: bool

    value: float
    """Objective at the accepted point."""


def phase_misfit(theta, a, meas: LinearMeasurement, y):
    residual = meas.apply(a * np.exp(1j * theta)) - y
    return 0.5 * float(np.vdot(residual, residual).real)


def phase_misfit_gradient(theta, a, meas: LinearMeasurement, y):
    """Gradient in theta of 1/2 |G(a e^{i theta}) - y|^2, Im(conj(x) * G^H r)."""
    x = a * np.exp(1j * theta)
    return np.imag(np.conj(x) * meas.adjoint(meas.apply(x) - y))


def phase_penalty(theta, geometry: TvGeometry, kind):
    dx, dz = geometry.operators
    gx, gz = dx @ theta, dz @ theta
    if PhaseRegularizer(kind) is PhaseRegularizer.SMOOTH:
        return 0.5 * float(gx @ gx + gz @ gz)
    return float(np.sum(np.sqrt(gx ** 2 + gz ** 2)))


def phase_prox(v, weight, geometry: TvGeometry, kind, inner_iters=20):
    """argmin phi(theta) + 1/2 sum_i weight_i (theta_i - v_i)^2, weight scalar or per cell."""
    weight = np.broadcast_to(np.asarray(weight, dtype=float), v.shape)
    lx, lz = geometry.laplacians
    lap = lx + lz
    if PhaseRegularizer(kind) is PhaseRegularizer.SMOOTH:
        try:
            return splu((lap + sp.diags(weight)).tocsc()).solve(weight * v)
        except RuntimeError as e:
            raise SolverError('Smooth phase prox is singular', str(e))

    dx, dz = geometry.operators
    mu = float(np.median(weight)) / geometry.laplacian_scale
    try:
        lu = splu((sp.diags(weight) + mu * lap).tocsc())
    except RuntimeError as e:
        raise SolverError('TV phase prox is singular', str(e))
    theta = v.copy()
    p_x, p_z = dx @ theta, dz @ theta
    q_x, q_z = np.zeros_like(p_x), np.zeros_like(p_z)
    for _ in range(inner_iters):
        theta = lu.solve(weight * v + mu * (dx.T @ (p_x + q_x) + dz.T @ (p_z + q_z)))
        gx, gz = dx @ theta, dz @ theta
        p_x, p_z = shrink_pair(gx - q_x, gz - q_z, 1.0 / mu, 1.0 / mu)
        q_x += p_x - gx
        q_z += p_z - gz
    return theta


def composite_gradient_step(theta, grad, c, hyper: RegHyperparams, geometry: TvGeometry):
    """Step direction theta - prox((1 - tau)/(c lam) phi)(theta - grad/c)."""
    v = theta - grad / c
    if hyper.tau >= 1:
        return theta - v
    weight = hyper.lam * np.asarray(c, dtype=float) / (1 - hyper.tau)
    return theta - phase_prox(v, weight, geometry, hyper.phase_reg, hyper.tv_phase_iters)


def armijo_search(theta, delta, hyper: RegHyperparams, objective, value=None) -> ArmijoResult:
    """Largest beta = shrink^j with objective(theta - beta delta) <= objective(theta) - alpha beta |delta|^2."""
    value = objective(theta) if value is None else value
    decrease = hyper.armijo_alpha * float(delta @ delta)
    beta = 1.0
    for _ in range(hyper.armijo_max_backtracks + 1):
        trial = objective(theta - beta * delta)
        if trial <= value - beta * decrease:
            return ArmijoResult(beta, False, trial)
        beta *= hyper.armijo_shrink
    return ArmijoResult(0.0, True, value)


def phase_curvature(a, meas: LinearMeasurement, kind=Curvature.SCALAR):
    """Curvature of the misfit in theta, from diag(a) G^H G diag(a)."""
    diagonal = a ** 2 * meas.gram_diagonal()
    top = float(np.max(diagonal)) if diagonal.size else 0.0
    if Curvature(kind) is Curvature.DIAGONAL:
        if top <= 0:
            return np.ones_like(diagonal)
        return np.maximum(diagonal, 1e-6 * top)

    v = np.full(a.size, 1.0 / np.sqrt(a.size), dtype=complex)
    estimate = 0.0
    for _ in range(POWER_ITERATIONS):
        w = a * meas.adjoint(meas.apply(a * v))
        norm = np.linalg.norm(w)
        if norm == 0:
            break
        estimate = float(np.vdot(v, w).real)
        v = w / norm
    c = max(estimate, top)
    return c if c > 0 else 1.0
