from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional

import numpy as np

from ..errors import InvalidArgumentError


class PhaseRegularizer(str, Enum):
    TV = 'tv_phase'
    SMOOTH = 'smooth_phase'


class Curvature(str, Enum):
    SCALAR = 'scalar'
    """One curvature for every cell, the largest of the per-cell values."""

    DIAGONAL = 'diagonal'
    """Per-cell curvature a_i^2 (G^H G)_ii, for operators with a (near) diagonal Gram matrix."""


@dataclass(frozen=True)
class RegHyperparams:
    lam: float = 1.0
    """Weight of the data term."""

    gamma_x: Optional[float] = None
    """Split-Bregman penalty along x. None picks a value balanced against the data term."""

    gamma_z: Optional[float] = None

    tau: float = 0.5
    """Magnitude/phase trade-off in the polar solver: tau on TV(a), 1 - tau on the phase penalty."""

    max_iters: int = 500

    phase_reg: PhaseRegularizer = PhaseRegularizer.SMOOTH

    curvature: Curvature = Curvature.SCALAR

    armijo_alpha: float = 1e-4
    armijo_shrink: float = 0.5
    armijo_max_backtracks: int = 30

    tv_phase_iters: int = 20
    """Inner split-Bregman iterations of the TV phase prox."""

    gamma_ratio: float = 0.01

    def __post_init__(self):
        object.__setattr__(self, 'phase_reg', PhaseRegularizer(self.phase_reg))
        object.__setattr__(self, 'curvature', Curvature(self.curvature))
        if not self.lam > 0:
            raise InvalidArgumentError(f'lam must be positive, got {self.lam}')
        for name in ('gamma_x', 'gamma_z'):
            value = getattr(self, name)
            if value is not None and not value > 0:
                raise InvalidArgumentError(f'{name} must be positive, got {value}')
        if not 0 <= self.tau <= 1:
            raise InvalidArgumentError(f'tau must lie in [0, 1], got {self.tau}')
        if not self.gamma_ratio > 0:
            raise InvalidArgumentError(f'gamma_ratio must be positive, got {self.gamma_ratio}')
        if self.max_iters < 1:
            raise InvalidArgumentError(f'max_iters must be at least 1, got {self.max_iters}')
        if not (self.armijo_alpha > 0 and 0 < self.armijo_shrink < 1):
            raise InvalidArgumentError('Armijo constants need alpha > 0 and 0 < shrink < 1')

    def with_gammas(self, gamma_x, gamma_z=None):
        return replace(self, gamma_x=gamma_x, gamma_z=gamma_x if gamma_z is None else gamma_z)


@dataclass
class TvAuxState:
    """Auxiliary gradients p and Bregman variables q of the split-Bregman iteration."""
    p_x: np.ndarray
    p_z: np.ndarray
    q_x: np.ndarray
    q_z: np.ndarray

    @classmethod
    def zeros(cls, n, dtype=complex):
        return cls(*(np.zeros(n, dtype=dtype) for _ in range(4)))


@dataclass
class PolarState:
    a: np.ndarray
    """Magnitude, kept non-negative."""

    theta: np.ndarray
    """Phase in radians."""

    @classmethod
    def zeros(cls, n):
        return cls(np.zeros(n), np.zeros(n))

    @property
    def x(self):
        return self.a * np.exp(1j * self.theta)
