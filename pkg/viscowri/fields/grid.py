from dataclasses import dataclass

import numpy as np

from ..errors import InvalidArgumentError


@dataclass(frozen=True)
class Grid2D:
    """Uniform 2-D grid. Fields on it are column-major vectors (z runs fastest)."""
    nz: int
    nx: int
    h: float

    def __post_init__(self):
        if int(self.nz) != self.nz or int(self.nx) != self.nx:
            raise InvalidArgumentError(f'Grid sizes must be integers, got nz={self.nz}, nx={self.nx}')
        if self.nz < 2 or self.nx < 2:
            raise InvalidArgumentError(f'Grid needs at least 2x2 cells, got {self.nz}x{self.nx}')
        if not self.h > 0:
            raise InvalidArgumentError(f'Grid spacing must be positive, got h={self.h}')

    @property
    def n(self) -> int:
        return self.nz * self.nx

    @property
    def shape(self):
        return (self.nz, self.nx)

    def index(self, iz, ix):
        return np.asarray(iz) + np.asarray(ix) * self.nz

    def cell(self, index):
        index = np.asarray(index)
        return index % self.nz, index // self.nz

    def coordinates(self):
        """(z, x) positions in meters of every cell, flattened column-major."""
        z = np.arange(self.nz) * self.h
        x = np.arange(self.nx) * self.h
        zz, xx = np.meshgrid(z, x, indexing='ij')
        return zz.ravel(order='F'), xx.ravel(order='F')

    def extended(self, n_layers: int) -> 'Grid2D':
        return Grid2D(self.nz + 2 * n_layers, self.nx + 2 * n_layers, self.h)

    def to_array(self, values):
        return np.asarray(values).reshape(self.shape, order='F')

    def from_array(self, array):
        array = np.asarray(array)
        if array.shape != self.shape:
            raise InvalidArgumentError(f'Array shape {array.shape} does not match grid {self.shape}')
        return array.ravel(order='F')


def _checked(grid, values, dtype):
    values = np.asarray(values, dtype=dtype).ravel()
    if values.size != grid.n:
        raise InvalidArgumentError(f'Field has {values.size} values, grid {grid.nz}x{grid.nx} needs {grid.n}')
    return values


@dataclass(frozen=True)
class RealField:
    grid: Grid2D
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'values', _checked(self.grid, self.values, float))

    @classmethod
    def constant(cls, grid, value):
        return cls(grid, np.full(grid.n, float(value)))

    def as_array(self):
        return self.grid.to_array(self.values)


@dataclass(frozen=True)
class ComplexField:
    grid: Grid2D
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'values', _checked(self.grid, self.values, complex))

    @classmethod
    def constant(cls, grid, value):
        return cls(grid, np.full(grid.n, complex(value)))

    @classmethod
    def from_polar(cls, grid, magnitude, phase):
        magnitude = np.asarray(magnitude, dtype=float)
        phase = np.asarray(phase, dtype=float)
        return cls(grid, magnitude * np.exp(1j * phase))

    @property
    def real(self):
        return RealField(self.grid, self.values.real)

    @property
    def imag(self):
        return RealField(self.grid, self.values.imag)

    @property
    def magnitude(self):
        return RealField(self.grid, np.abs(self.values))

    @property
    def phase(self):
        """Phase in (-pi, pi]; zero where the value is exactly zero."""
        return RealField(self.grid, wrapped_phase(self.values))

    def as_array(self):
        return self.grid.to_array(self.values)


def wrapped_phase(values):
    values = np.asarray(values, dtype=complex)
    theta = np.where(values == 0, 0.0, np.angle(values))
    return np.where(theta <= -np.pi, theta + 2 * np.pi, theta)
