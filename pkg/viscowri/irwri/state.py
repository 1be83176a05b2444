from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property

import numpy as np
import scipy.sparse as sp

from ..errors import InvalidArgumentError
from ..fields import ComplexField, Grid2D
from ..helmholtz import Acquisition, ObservationOperator, PmlProfile, SourceTerm, SourceWavelet, Stencil
from .batches import FrequencyBatch


class StopStatus(str, Enum):
    CONTINUE = 'continue'
    CONVERGED = 'converged'
    MAX_ITERS = 'max_iters'


@dataclass(frozen=True)
class StoppingCriteria:
    eps_b: float = 1e-3
    """Threshold on the summed source residual |A u - b|^2."""

    eps_d: float = 1e-5
    """Threshold on the summed data residual |P u - d|^2."""

    max_iters: int = 30

    relative: bool = False
    """Scale the thresholds by the batch energies sum |b|^2 and sum |d|^2."""

    def __post_init__(self):
        if not (self.eps_b > 0 and self.eps_d > 0):
            raise InvalidArgumentError(f'Stopping thresholds must be positive, got {self.eps_b}, {self.eps_d}')
        if self.max_iters < 1:
            raise InvalidArgumentError(f'max_iters must be at least 1, got {self.max_iters}')


@dataclass
class Survey:
    """Fixed inversion setup: grid, absorbing layers, stencil, acquisition and source signature."""
    grid: Grid2D
    acquisition: Acquisition
    pml: PmlProfile
    stencil: Stencil = Stencil.NINE_POINT
    wavelet: SourceWavelet = field(default_factory=SourceWavelet)

    def __post_init__(self):
        self.stencil = Stencil(self.stencil)
        if not self.acquisition.sources or not self.acquisition.receivers:
            raise InvalidArgumentError('The survey needs at least one source and one receiver')

    @cached_property
    def observation(self) -> ObservationOperator:
        return self.acquisition.observation(self.grid, self.pml.n_layers)

    @cached_property
    def source_indices(self):
        return self.acquisition.source_indices(self.grid, self.pml.n_layers)

    @property
    def n_sources(self):
        return len(self.acquisition.sources)

    @property
    def n_receivers(self):
        return len(self.acquisition.receivers)

    def sources(self, omega):
        amplitude = self.wavelet.amplitude(omega)
        return [SourceTerm(int(index), amplitude) for index in self.source_indices]


@dataclass
class IrwriState:
    """Model, wavefields and scaled duals of one batch; arrays are indexed [frequency, source, ...]."""
    m: ComplexField
    batch: FrequencyBatch
    u: np.ndarray
    b_dual: np.ndarray
    d_dual: np.ndarray
    iteration: int = 0
    source_residual: float = np.inf
    data_residual: float = np.inf
    b_energy: float = 0.0
    d_energy: float = 0.0

    @classmethod
    def start(cls, m: ComplexField, batch: FrequencyBatch, survey: Survey, data):
        n_ext = survey.grid.extended(survey.pml.n_layers).n
        shape = (len(batch), survey.n_sources)
        if data.shape != shape + (survey.n_receivers,):
            raise InvalidArgumentError(f'Data of shape {data.shape} does not match {shape + (survey.n_receivers,)}')
        return cls(
            m=m, batch=batch,
            u=np.zeros(shape + (n_ext,), dtype=complex),
            b_dual=np.zeros(shape + (n_ext,), dtype=complex),
            d_dual=np.zeros(shape + (survey.n_receivers,), dtype=complex),
            d_energy=float(np.sum(np.abs(data) ** 2)),
        )


@dataclass
class VirtualSourceSystem:
    """Stacked virtual-source operator L (one block per frequency and source) and right-hand side y."""
    L: sp.csr_matrix
    y: np.ndarray

    def __post_init__(self):
        if self.L.shape[0] != self.y.size:
            raise InvalidArgumentError(f'L has {self.L.shape[0]} rows, y has {self.y.size}')

    @property
    def energy(self):
        """Per-cell sum of |L|^2, the diagonal of L^H L."""
        return np.asarray(abs(self.L).power(2).sum(axis=0)).ravel()
