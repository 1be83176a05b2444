from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from ..errors import InvalidArgumentError
from .grid import ComplexField, Grid2D, RealField


def _forward_difference(n, h):
    if n == 1:
        return sp.csr_matrix((1, 1))
    # last row stays zero: the sample past the edge repeats the edge value
    main = -np.ones(n)
    main[-1] = 0.0
    upper = np.ones(n - 1)
    return sp.diags([main, upper], [0, 1], shape=(n, n), format='csr') / h


@lru_cache(maxsize=32)
def gradient_operators(nz: int, nx: int, h: float = 1.0):
    """Sparse forward-difference operators (Dx, Dz) acting on column-major vectors.

    Sizes of 1 are allowed so that 1-D signals can be regularized on a 1 x n layout; the
    difference along a singleton axis is identically zero.
    """
    if nz < 1 or nx < 1 or not h > 0:
        raise InvalidArgumentError(f'Invalid operator layout nz={nz}, nx={nx}, h={h}')
    dx = sp.kron(_forward_difference(nx, h), sp.identity(nz), format='csr')
    dz = sp.kron(sp.identity(nx), _forward_difference(nz, h), format='csr')
    return dx, dz


def _operators_for(field):
    grid = field.grid
    return gradient_operators(grid.nz, grid.nx, float(grid.h))


def _wrap(field, values):
    if isinstance(field, RealField):
        return RealField(field.grid, values)
    return ComplexField(field.grid, values)


def _check(field):
    if not isinstance(field, (RealField, ComplexField)) or not isinstance(field.grid, Grid2D):
        raise InvalidArgumentError(f'Expected a field on a Grid2D, got {type(field).__name__}')
    if field.values.size != field.grid.n:
        raise InvalidArgumentError('Field length does not match its grid')


def grad_x(f):
    _check(f)
    dx, _ = _operators_for(f)
    return _wrap(f, dx @ f.values)


def grad_z(f):
    _check(f)
    _, dz = _operators_for(f)
    return _wrap(f, dz @ f.values)


def grad_x_adjoint(f):
    _check(f)
    dx, _ = _operators_for(f)
    return _wrap(f, dx.T @ f.values)


def grad_z_adjoint(f):
    _check(f)
    _, dz = _operators_for(f)
    return _wrap(f, dz.T @ f.values)


def gradient_magnitude(gx, gz):
    return np.sqrt(np.abs(gx) ** 2 + np.abs(gz) ** 2)


def tv_norm(f) -> float:
    """Isotropic total variation, sum of |grad f| with the complex magnitude."""
    _check(f)
    dx, dz = _operators_for(f)
    return float(np.sum(gradient_magnitude(dx @ f.values, dz @ f.values)))
