from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.sparse.linalg import LinearOperator, cg, splu

from ..errors import InvalidArgumentError, SolverError
from ..fields import Grid2D, gradient_operators

NORMAL_RESIDUAL = 1e-9


@dataclass(frozen=True)
class TvGeometry:
    """Layout of the model vector seen by the TV operators (column-major nz x nx)."""
    nz: int
    nx: int
    h: float = 1.0

    @classmethod
    def of(cls, grid: Grid2D, per_cell=False):
        return cls(grid.nz, grid.nx, 1.0 if per_cell else float(grid.h))

    @classmethod
    def signal(cls, n):
        return cls(1, int(n), 1.0)

    @property
    def n(self):
        return self.nz * self.nx

    @property
    def operators(self):
        return gradient_operators(self.nz, self.nx, self.h)

    @cached_property
    def laplacians(self):
        dx, dz = self.operators
        return (dx.T @ dx).tocsr(), (dz.T @ dz).tocsr()

    @cached_property
    def laplacian_scale(self):
        """Median diagonal of Dx^T Dx + Dz^T Dz."""
        lx, lz = self.laplacians
        return float(np.median((lx + lz).diagonal()))


class LinearMeasurement:
    """Linear operator G (dense, sparse or abstract) together with its data y."""

    def __init__(self, operator, data):
        if isinstance(operator, LinearOperator):
            self.kind = 'abstract'
        elif sp.issparse(operator):
            self.kind = 'sparse'
            operator = operator.tocsr()
        else:
            self.kind = 'dense'
            operator = np.atleast_2d(np.asarray(operator))
        self.operator = operator
        self.data = np.asarray(data, dtype=complex).ravel()
        if self.data.size != operator.shape[0]:
            raise InvalidArgumentError(f'Data length {self.data.size} does not match operator rows {operator.shape[0]}')
        self._gram = None

    @property
    def shape(self):
        return self.operator.shape

    def apply(self, x):
        if self.kind == 'abstract':
            return self.operator.matvec(np.asarray(x, dtype=complex))
        return self.operator @ x

    def adjoint(self, r):
        if self.kind == 'abstract':
            return self.operator.rmatvec(np.asarray(r, dtype=complex))
        return self.operator.conj().T @ r

    def gram(self):
        """G^H G as an explicit matrix, or None for abstract operators."""
        if self._gram is None and self.kind != 'abstract':
            gram = self.operator.conj().T @ self.operator
            self._gram = gram.tocsr() if self.kind == 'sparse' else np.asarray(gram)
        return self._gram

    def gram_diagonal(self):
        if self.kind == 'dense':
            return np.sum(np.abs(self.operator) ** 2, axis=0)
        if self.kind == 'sparse':
            return np.asarray(abs(self.operator).power(2).sum(axis=0)).ravel()
        # unit-vector columns, only for small abstract operators
        n = self.shape[1]
        return np.array([np.linalg.norm(self.apply(np.eye(1, n, k).ravel())) ** 2 for k in range(n)])

    def with_data(self, data):
        return LinearMeasurement(self.operator, data)

    def with_phase(self, theta):
        """Measurement of G diag(e^{i theta})."""
        phase = np.exp(1j * np.asarray(theta, dtype=float))
        if self.kind == 'dense':
            return LinearMeasurement(self.operator * phase[None, :], self.data)
        if self.kind == 'sparse':
            return LinearMeasurement(self.operator @ sp.diags(phase), self.data)
        op = self.operator
        rotated = LinearOperator(
            op.shape, matvec=lambda x: op.matvec(phase * x),
            rmatvec=lambda r: phase.conj() * op.rmatvec(r), dtype=complex
        )
        return LinearMeasurement(rotated, self.data)


def default_gamma(meas: LinearMeasurement, lam, ratio=0.01):
    """TV penalty balanced against the data term: ratio * lam * median|diag G^H G|."""
    scale = float(np.median(np.abs(meas.gram_diagonal())))
    if scale == 0:
        scale = 1.0
    return ratio * lam * scale


def _cg(matvec, rhs, n):
    operator = LinearOperator((n, n), matvec=matvec, dtype=rhs.dtype)
    try:
        x, info = cg(operator, rhs, rtol=1e-13, atol=0.0, maxiter=20 * n)
    except TypeError:  # scipy < 1.12
        x, info = cg(operator, rhs, tol=1e-13, atol=0.0, maxiter=20 * n)
    if info != 0:
        raise SolverError('Conjugate gradients did not converge on the normal equations', f'info={info}')
    return x


class NormalEquations:
    """Solves (lam G^H G + gx Dx^T Dx + gz Dz^T Dz) x = rhs, reusing the last factorization."""

    def __init__(self):
        self._key = None
        self._meas = None
        self._factor = None

    def _build(self, meas, lam, gx, gz, geometry, real):
        lx, lz = geometry.laplacians
        gram = meas.gram()
        regular = gx * lx + gz * lz
        if meas.kind == 'dense':
            matrix = lam * gram + regular.toarray()
            if real:
                matrix = matrix.real
            try:
                return matrix, scipy.linalg.lu_factor(matrix, check_finite=True)
            except (ValueError, scipy.linalg.LinAlgError) as e:
                raise SolverError('Normal matrix could not be factorized', str(e))
        matrix = (lam * gram + regular).tocsc()
        if real:
            matrix = matrix.real.tocsc(copy=True)
        try:
            return matrix, splu(matrix)
        except RuntimeError as e:
            raise SolverError('Normal matrix is singular', str(e))

    def solve(self, meas, lam, gx, gz, geometry, rhs, real=False):
        if meas.kind == 'abstract':
            lx, lz = geometry.laplacians

            def matvec(x):
                out = lam * meas.adjoint(meas.apply(x)) + gx * (lx @ x) + gz * (lz @ x)
                return out.real if real else out
            return _cg(matvec, rhs, geometry.n)

        key = (lam, gx, gz, real)
        if meas is not self._meas or key != self._key:
            self._factor = self._build(meas, lam, gx, gz, geometry, real)
            self._meas, self._key = meas, key
        matrix, factor = self._factor
        if meas.kind == 'dense':
            x = scipy.linalg.lu_solve(factor, rhs)
        else:
            x = factor.solve(rhs)
        norm = np.linalg.norm(rhs)
        if norm > 0:
            residual = np.linalg.norm(matrix @ x - rhs) / norm
            if residual > NORMAL_RESIDUAL:
                x = x + (scipy.linalg.lu_solve(factor, rhs - matrix @ x) if meas.kind == 'dense'
                         else factor.solve(rhs - matrix @ x))
        return x


def tv_model_solve(meas: LinearMeasurement, y_eff, state, lam, gamma_x, gamma_z, geometry: TvGeometry,
                   real=False, normal: NormalEquations = None):
    """Least-squares solution of the stacked system [sqrt(lam) G; sqrt(gx) Dx; sqrt(gz) Dz] x = [...].

    With `real` set the unknown is restricted to real vectors (real part of the normal equations).
    """
    if meas.shape[1] != geometry.n:
        raise InvalidArgumentError(f'Operator has {meas.shape[1]} columns, model has {geometry.n} cells')
    dx, dz = geometry.operators
    rhs = (lam * meas.adjoint(np.asarray(y_eff, dtype=complex))
           + gamma_x * (dx.T @ (state.p_x + state.q_x))
           + gamma_z * (dz.T @ (state.p_z + state.q_z)))
    if real:
        rhs = rhs.real
    normal = normal or NormalEquations()
    return normal.solve(meas, lam, gamma_x, gamma_z, geometry, rhs, real=real)
