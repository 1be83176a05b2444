from dataclasses import dataclass, field
from typing import List, NamedTuple, Tuple

import numpy as np
import scipy.sparse as sp

from ..errors import InvalidArgumentError
from ..fields import Grid2D


class SourceTerm(NamedTuple):
    """A point source on the (extended) simulation grid."""

    index: int
    """Flat column-major cell index."""

    amplitude: complex = 1.0
    """Complex amplitude, e.g. the wavelet spectrum at the current frequency."""


class ObservationOperator:
    """Extraction of the state at receiver cells, P in Pu = d."""

    def __init__(self, indices, n):
        self.indices = np.asarray(indices, dtype=int).ravel()
        self.n = int(n)
        if self.indices.size and (self.indices.min() < 0 or self.indices.max() >= self.n):
            raise InvalidArgumentError(f'Receiver index out of range [0, {self.n})')
        if np.unique(self.indices).size != self.indices.size:
            raise InvalidArgumentError('Receiver indices must be distinct')
        self._matrix = None

    def __len__(self):
        return self.indices.size

    def __eq__(self, other):
        if not isinstance(other, ObservationOperator):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.indices, other.indices)

    def __hash__(self):
        return hash((self.n, self.indices.tobytes()))

    @property
    def matrix(self):
        if self._matrix is None:
            m = self.indices.size
            self._matrix = sp.csr_matrix(
                (np.ones(m), (np.arange(m), self.indices)), shape=(m, self.n)
            )
        return self._matrix

    def adjoint(self, d):
        """Scatter data back onto the state vector (P^T d)."""
        out = np.zeros(self.n, dtype=complex)
        out[self.indices] = d
        return out


def sample(P: ObservationOperator, u):
    values = getattr(u, 'values', u)
    values = np.asarray(values)
    if values.size != P.n:
        raise InvalidArgumentError(f'State has {values.size} entries, observation expects {P.n}')
    return values[P.indices].astype(complex)


def extended_index(grid: Grid2D, n_layers, iz, ix):
    """Flat index on the PML-extended grid of physical cell (iz, ix)."""
    iz, ix = np.asarray(iz), np.asarray(ix)
    if np.any((iz < 0) | (iz >= grid.nz) | (ix < 0) | (ix >= grid.nx)):
        raise InvalidArgumentError('Acquisition cell outside the physical grid')
    return (iz + n_layers) + (ix + n_layers) * (grid.nz + 2 * n_layers)


def _spread(count, length):
    # evenly spaced, symmetric positions along an edge of `length` cells
    if count <= 0:
        return np.array([], dtype=int)
    return np.round((np.arange(count) + 0.5) * length / count - 0.5).astype(int)


def _split(total):
    base, rest = divmod(total, 4)
    return [base + (1 if k < rest else 0) for k in range(4)]


@dataclass
class Acquisition:
    """Source and receiver cells on the physical grid, as (iz, ix) pairs."""
    sources: List[Tuple[int, int]] = field(default_factory=list)
    receivers: List[Tuple[int, int]] = field(default_factory=list)

    def __post_init__(self):
        self.sources = [(int(z), int(x)) for z, x in self.sources]
        self.receivers = [(int(z), int(x)) for z, x in self.receivers]
        if len(set(self.receivers)) != len(self.receivers):
            raise InvalidArgumentError('Receiver positions must be distinct')

    @classmethod
    def perimeter(cls, grid: Grid2D, n_sources=8, n_receivers=200, margin=2):
        """Sources and receivers split evenly over the four edges, `margin` cells inside."""
        inner_z, inner_x = grid.nz - 2 * margin, grid.nx - 2 * margin
        if inner_z < 2 or inner_x < 3:
            raise InvalidArgumentError(f'Margin {margin} leaves no room on a {grid.nz}x{grid.nx} grid')

        def ring(total):
            top, bottom, left, right = _split(total)
            # top and bottom rows skip the corner cells owned by the side columns
            cells = [(margin, margin + 1 + x) for x in _spread(top, inner_x - 2)]
            cells += [(grid.nz - 1 - margin, margin + 1 + x) for x in _spread(bottom, inner_x - 2)]
            cells += [(margin + z, margin) for z in _spread(left, inner_z)]
            cells += [(margin + z, grid.nx - 1 - margin) for z in _spread(right, inner_z)]
            return cells

        return cls(ring(n_sources), ring(n_receivers))

    @classmethod
    def surface(cls, grid: Grid2D, source_depth, source_spacing, receiver_depth, receiver_spacing):
        """Fixed-spread lines of sources and receivers at given depths (meters)."""
        def line(depth, spacing):
            iz = int(round(depth / grid.h))
            step = max(int(round(spacing / grid.h)), 1)
            return [(iz, ix) for ix in range(0, grid.nx, step)]
        return cls(line(source_depth, source_spacing), line(receiver_depth, receiver_spacing))

    def observation(self, grid: Grid2D, n_layers) -> ObservationOperator:
        z, x = np.array(self.receivers, dtype=int).reshape(-1, 2).T
        ext = grid.extended(n_layers)
        return ObservationOperator(extended_index(grid, n_layers, z, x), ext.n)

    def source_indices(self, grid: Grid2D, n_layers):
        z, x = np.array(self.sources, dtype=int).reshape(-1, 2).T
        return extended_index(grid, n_layers, z, x)
