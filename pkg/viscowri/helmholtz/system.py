import logging
from collections import OrderedDict
from functools import lru_cache
from threading import Lock

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from ..errors import DomainError, InvalidArgumentError, SolverError
from ..fields import ComplexField, Grid2D
from .acquisition import ObservationOperator, SourceTerm
from .pml import PmlProfile
from .stencils import Stencil, laplacian, mass


logger = logging.getLogger('Helmholtz')
logger.setLevel(logging.DEBUG)

RESIDUAL_WARNING = 1e-10
RESIDUAL_FAILURE = 1e-5
NORMAL_CACHE_SIZE = 4  # augmented factorizations kept per system


@lru_cache(maxsize=16)
def _operators(grid: Grid2D, omega: float, pml: PmlProfile, stencil: Stencil):
    # everything in A that does not depend on the model
    ext = grid.extended(pml.n_layers)
    stretch_z = lambda position: pml.stretch(position, grid.nz, grid.h, omega)
    stretch_x = lambda position: pml.stretch(position, grid.nx, grid.h, omega)

    lap = laplacian(ext.nz, ext.nx, grid.h, stretch_z, stretch_x, stencil)
    boundary = np.outer(stretch_z(np.arange(ext.nz)), stretch_x(np.arange(ext.nx))).ravel(order='F')
    mass_matrix = mass(ext.nz, ext.nx, stencil)

    # edge padding of the physical model into the layers
    ez, ex = np.meshgrid(np.arange(ext.nz), np.arange(ext.nx), indexing='ij')
    source_z = np.clip(ez - pml.n_layers, 0, grid.nz - 1).ravel(order='F')
    source_x = np.clip(ex - pml.n_layers, 0, grid.nx - 1).ravel(order='F')
    extension = sp.csr_matrix(
        (np.ones(ext.n), (np.arange(ext.n), source_z + source_x * grid.nz)), shape=(ext.n, grid.n)
    )
    return ext, lap, boundary, mass_matrix, extension


def _factorize(matrix, what):
    try:
        return splu(matrix.tocsc())
    except RuntimeError as e:
        raise SolverError(f'Could not factorize the {what}', str(e))


def _refined_solve(lu, matrix, rhs, what):
    """Direct solve plus one step of iterative refinement, with a residual check."""
    norm = np.linalg.norm(rhs)
    if norm == 0:
        return np.zeros_like(rhs, dtype=complex)
    x = lu.solve(rhs)
    x = x + lu.solve(rhs - matrix @ x)
    residual = np.linalg.norm(matrix @ x - rhs) / norm
    if not np.isfinite(residual) or residual > RESIDUAL_FAILURE:
        raise SolverError(f'The {what} is singular or nearly so', f'relative residual {residual:.3e}')
    if residual > RESIDUAL_WARNING:
        logger.warning(f'{what} :: relative residual {residual:.3e} above {RESIDUAL_WARNING:g}')
    return x


class HelmholtzSystem:
    """A(omega, m) = Delta + omega^2 C diag(E m) B on the PML-extended grid.

    E pads the physical model into the absorbing layers. Factorizations are built lazily,
    cached and then shared read-only by concurrent solves.
    """

    def __init__(self, grid, m, omega, pml, stencil):
        self.grid = grid
        self.m = m
        self.omega = float(omega)
        self.pml = pml
        self.stencil = Stencil(stencil)
        self.ext_grid, self.laplacian, self.boundary, self.mass, self.extension = _operators(
            grid, self.omega, pml, self.stencil
        )
        self.model_ext = self.extension @ m.values
        self.A = (self.laplacian
                  + sp.diags(self.omega ** 2 * self.boundary * self.model_ext) @ self.mass).tocsc()

        self._lock = Lock()
        self._lu = None
        self._normal = OrderedDict()

    @property
    def n(self):
        return self.A.shape[0]

    def mass_term(self, u):
        """omega^2 C diag(E m) B u, the part of A u that depends on the model."""
        return self.omega ** 2 * self.boundary * self.model_ext * (self.mass @ u)

    def virtual_source(self, u):
        """d(A u)/dm = omega^2 C diag(B u) E, one nonzero per row."""
        return sp.diags(self.omega ** 2 * self.boundary * (self.mass @ u)) @ self.extension

    def source_vector(self, sources):
        if isinstance(sources, np.ndarray):
            if sources.size != self.n:
                raise InvalidArgumentError(f'Right-hand side has {sources.size} entries, system has {self.n}')
            return sources.astype(complex)
        if isinstance(sources, SourceTerm):
            sources = [sources]
        b = np.zeros(self.n, dtype=complex)
        for term in sources:
            if not 0 <= term.index < self.n:
                raise InvalidArgumentError(f'Source index {term.index} outside [0, {self.n})')
            b[term.index] += term.amplitude / self.grid.h ** 2  # point source
        return b

    def factorization(self):
        with self._lock:
            if self._lu is None:
                self._lu = _factorize(self.A, f'Helmholtz matrix at omega={self.omega:.4g}')
            return self._lu

    def normal_factorization(self, P: ObservationOperator, lam, gamma):
        """Factored lam A^H A + gamma P^T P, least recently used entries dropped first."""
        key = (P, float(lam), float(gamma))
        with self._lock:
            if key in self._normal:
                self._normal.move_to_end(key)
            else:
                normal = (lam * (self.A.conj().T @ self.A) + gamma * (P.matrix.T @ P.matrix)).tocsc()
                self._normal[key] = (normal, _factorize(normal, 'augmented normal matrix'))
                while len(self._normal) > NORMAL_CACHE_SIZE:
                    self._normal.popitem(last=False)
            return self._normal[key]

    def residual(self, u, b):
        return self.A @ getattr(u, 'values', u) - b


def assemble(grid: Grid2D, m: ComplexField, omega, pml: PmlProfile = None, stencil=Stencil.NINE_POINT):
    """Assemble A at one frequency. Without a profile, 20 layers tuned to the fastest velocity are used."""
    if m.grid != grid:
        raise InvalidArgumentError('Model grid does not match the simulation grid')
    if not omega > 0:
        raise InvalidArgumentError(f'Angular frequency must be positive, got {omega}')
    if not np.all(np.isfinite(m.values)):
        raise DomainError(f'Model has {np.count_nonzero(~np.isfinite(m.values))} nonfinite entries')
    if np.any(m.values.real <= 0):
        raise DomainError(f'Model needs Re(m) > 0, {np.count_nonzero(m.values.real <= 0)} cells violate it')
    if pml is None:
        pml = PmlProfile.for_velocity(1.0 / np.sqrt(m.values.real.min()), grid.h)
    ext = grid.extended(pml.n_layers)
    if Stencil(stencil) is Stencil.NINE_POINT and min(ext.nz, ext.nx) < 3:
        raise InvalidArgumentError(f'Grid {ext.nz}x{ext.nx} too small for the nine-point stencil')
    return HelmholtzSystem(grid, m, omega, pml, stencil)


def solve_forward(system: HelmholtzSystem, b) -> ComplexField:
    rhs = system.source_vector(b)
    u = _refined_solve(system.factorization(), system.A, rhs, 'Helmholtz system')
    return ComplexField(system.ext_grid, u)


def augmented_wavefield_solve(system: HelmholtzSystem, P: ObservationOperator, rhs_b, rhs_d, lam, gamma):
    """Minimizer of gamma/2 |rhs_d - P u|^2 + lam/2 |rhs_b - A u|^2 via its normal equations."""
    if not lam > 0 or gamma < 0:
        raise InvalidArgumentError(f'Need lam > 0 and gamma >= 0, got lam={lam}, gamma={gamma}')
    rhs_b = system.source_vector(np.asarray(rhs_b, dtype=complex))
    rhs = lam * (system.A.conj().T @ rhs_b) + gamma * P.adjoint(rhs_d)
    normal, lu = system.normal_factorization(P, lam, gamma)
    u = _refined_solve(lu, normal, rhs, 'augmented wavefield system')
    return ComplexField(system.ext_grid, u)
