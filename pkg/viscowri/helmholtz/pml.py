from dataclasses import dataclass

import numpy as np

from ..errors import InvalidArgumentError


@dataclass(frozen=True)
class PmlProfile:
    """Absorbing layer built by complex coordinate stretching, s = 1 + i*sigma(d)/omega."""
    n_layers: int = 20
    power: float = 2.0
    max_damping: float = 0.0

    def __post_init__(self):
        if self.n_layers < 0 or self.power < 1 or self.max_damping < 0:
            raise InvalidArgumentError(f'Invalid PML profile {self}')

    @classmethod
    def for_velocity(cls, v_max, h, n_layers=20, power=2.0, reflection=1e-3):
        """Peak damping giving a nominal normal-incidence reflection for the fastest velocity."""
        if n_layers == 0:
            return cls(0, power, 0.0)
        thickness = n_layers * h
        damping = (power + 1) * v_max * np.log(1.0 / reflection) / (2 * thickness)
        return cls(n_layers, power, float(damping))

    def stretch(self, position, n_cells, h, omega):
        """Stretch factors at fractional cell positions of the extended axis.

        The physical axis occupies positions n_layers .. n_layers + n_cells - 1.
        """
        position = np.asarray(position, dtype=float)
        if self.n_layers == 0:
            return np.ones_like(position, dtype=complex)
        first, last = self.n_layers, self.n_layers + n_cells - 1
        depth = np.maximum(np.maximum(first - position, position - last), 0.0)
        ratio = np.minimum(depth / self.n_layers, 1.0)
        sigma = self.max_damping * ratio ** self.power
        return 1.0 + 1j * sigma / omega
