from enum import Enum
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

# compact fourth-order weights: phase error O((kh)^4), isotropic to that order
LAPLACIAN_MIX = 2 / 3  # weight of the axis-aligned Laplacian in the nine-point mix
MASS_CENTER, MASS_EDGES, MASS_CORNERS = 2 / 3, 1 / 3, 0.0  # totals over the footprint


class Stencil(str, Enum):
    FIVE_POINT = 'five_point'
    NINE_POINT = 'nine_point'


def _inside(z, x, nz, nx):
    return (z >= 1) & (z <= nz) & (x >= 1) & (x <= nx)


def _offset_pairs(nz, nx, dz, dx):
    # cells of a one-cell zero frame around the grid, paired with their (dz, dx) neighbour
    az, ax = np.meshgrid(np.arange(nz + 2), np.arange(nx + 2), indexing='ij')
    az, ax = az.ravel(), ax.ravel()
    bz, bx = az + dz, ax + dx
    valid = (bz >= 0) & (bz < nz + 2) & (bx >= 0) & (bx < nx + 2)
    az, ax, bz, bx = az[valid], ax[valid], bz[valid], bx[valid]
    a_in, b_in = _inside(az, ax, nz, nx), _inside(bz, bx, nz, nx)
    keep = a_in | b_in
    return az[keep], ax[keep], bz[keep], bx[keep], a_in[keep], b_in[keep]


def _flat(z, x, nz):
    return (z - 1) + (x - 1) * nz


@lru_cache(maxsize=16)
def difference(nz, nx, dz, dx):
    """u[p + (dz, dx)] - u[p] for every pair touching the grid, zero outside (Dirichlet).

    Returns the sparse operator and the pair midpoints in grid index coordinates.
    """
    az, ax, bz, bx, a_in, b_in = _offset_pairs(nz, nx, dz, dx)
    rows = np.arange(az.size)
    data_rows = np.concatenate([rows[b_in], rows[a_in]])
    cols = np.concatenate([_flat(bz[b_in], bx[b_in], nz), _flat(az[a_in], ax[a_in], nz)])
    data = np.concatenate([np.ones(np.count_nonzero(b_in)), -np.ones(np.count_nonzero(a_in))])
    operator = sp.csr_matrix((data, (data_rows, cols)), shape=(rows.size, nz * nx))
    return operator, (az + bz) / 2.0 - 1.0, (ax + bx) / 2.0 - 1.0


def _neighbours(nz, nx, dz, dx):
    az, ax, bz, bx, a_in, b_in = _offset_pairs(nz, nx, dz, dx)
    both = a_in & b_in
    rows = _flat(az[both], ax[both], nz)
    cols = _flat(bz[both], bx[both], nz)
    shift = sp.csr_matrix((np.ones(rows.size), (rows, cols)), shape=(nz * nx, nz * nx))
    return shift + shift.T


def _flux_term(nz, nx, dz, dx, coefficient, stretch_z, stretch_x):
    operator, mid_z, mid_x = difference(nz, nx, dz, dx)
    weights = coefficient(stretch_z(mid_z), stretch_x(mid_x))
    return -(operator.T @ sp.diags(weights) @ operator)


def laplacian(nz, nx, h, stretch_z, stretch_x, stencil):
    """Stretched Laplacian scaled by s_x*s_z, symmetric (not Hermitian) with zero outer boundary."""
    axis_x = _flux_term(nz, nx, 0, 1, lambda sz, sx: sz / sx, stretch_z, stretch_x)
    axis_z = _flux_term(nz, nx, 1, 0, lambda sz, sx: sx / sz, stretch_z, stretch_x)
    five = (axis_x + axis_z) / h ** 2
    if Stencil(stencil) is Stencil.FIVE_POINT:
        return five.tocsr()

    # rotated axes only see the diagonal of the stretched tensor
    rotated_coefficient = lambda sz, sx: 0.5 * (sz / sx + sx / sz)
    rotated = (_flux_term(nz, nx, 1, 1, rotated_coefficient, stretch_z, stretch_x)
               + _flux_term(nz, nx, 1, -1, rotated_coefficient, stretch_z, stretch_x)) / (2 * h ** 2)
    return (LAPLACIAN_MIX * five + (1 - LAPLACIAN_MIX) * rotated).tocsr()


@lru_cache(maxsize=16)
def mass(nz, nx, stencil):
    n = nz * nx
    if Stencil(stencil) is Stencil.FIVE_POINT:
        return sp.identity(n, dtype=float, format='csr')
    edges = _neighbours(nz, nx, 0, 1) + _neighbours(nz, nx, 1, 0)
    corners = _neighbours(nz, nx, 1, 1) + _neighbours(nz, nx, 1, -1)
    return (MASS_CENTER * sp.identity(n, format='csr')
            + (MASS_EDGES / 4) * edges + (MASS_CORNERS / 4) * corners).tocsr()
