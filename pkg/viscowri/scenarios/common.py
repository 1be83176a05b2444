"""Translation of configuration sections into the objects the solvers take."""
import numpy as np

from ..attenuation import AttenuationPair, FrequencySpec, forward
from ..errors import ConfigError, VwriError
from ..fields import ComplexField, Grid2D, RealField, read_field
from ..helmholtz import Acquisition, PmlProfile, SourceWavelet, Stencil
from ..irwri import REGULARIZERS, StoppingCriteria, Survey
from ..regularizers import RegHyperparams


def checked(build, what):
    try:
        return build()
    except VwriError as e:
        if isinstance(e, ConfigError):
            raise
        raise ConfigError(f'Invalid {what}: {str(e)}')


def make_grid(config) -> Grid2D:
    g = config.grid
    return checked(lambda: Grid2D(g.nz, g.nx, g.h), '[grid]')


def reg_hyperparams(config, **overrides) -> RegHyperparams:
    r = config.regularization
    values = dict(
        lam=r.lam, gamma_x=r.gamma, gamma_z=r.gamma, tau=r.tau, max_iters=r.max_iters,
        phase_reg=r.phase_reg, curvature=r.curvature, gamma_ratio=r.gamma_ratio,
        armijo_alpha=r.armijo_alpha, armijo_shrink=r.armijo_shrink,
        armijo_max_backtracks=r.armijo_max_backtracks, tv_phase_iters=r.tv_phase_iters,
    )
    values.update(overrides)
    return checked(lambda: RegHyperparams(**values), '[regularization]')


def check_regularizers(names):
    unknown = [name for name in names if name not in REGULARIZERS]
    if unknown:
        raise ConfigError(f'Unknown regularizer(s) {unknown}, expected {REGULARIZERS}')
    return list(names)


def stopping_criteria(config) -> StoppingCriteria:
    w = config.irwri
    return checked(lambda: StoppingCriteria(w.eps_b, w.eps_d, w.max_iters, w.relative_stop), '[irwri]')


def pml_profile(config, v_max) -> PmlProfile:
    p = config.pml
    return checked(lambda: PmlProfile.for_velocity(v_max, config.grid.h, p.n_layers, p.power, p.reflection), '[pml]')


def acquisition(config, grid) -> Acquisition:
    a = config.acquisition
    if a.layout == 'perimeter':
        return checked(lambda: Acquisition.perimeter(grid, a.n_sources, a.n_receivers, a.margin), '[acquisition]')
    if a.layout == 'surface':
        return checked(lambda: Acquisition.surface(grid, a.source_depth, a.source_spacing,
                                                    a.receiver_depth, a.receiver_spacing), '[acquisition]')
    raise ConfigError(f'Unknown acquisition layout {a.layout!r}')


def wavelet(config) -> SourceWavelet:
    w = config.wavelet
    return checked(lambda: SourceWavelet(w.kind, w.f_dominant, w.delay), '[wavelet]')


def survey(config, grid, v_max) -> Survey:
    stencil = checked(lambda: Stencil(config.irwri.stencil), '[irwri] stencil')
    return Survey(grid, acquisition(config, grid), pml_profile(config, v_max), stencil, wavelet(config))


def reference_omega(config):
    return 2 * np.pi * config.attenuation.f_reference


def model_at(pair: AttenuationPair, kind, omega_r):
    """Frequency-dependent complex model of a (v, alpha) pair under one mechanism."""
    return lambda omega: forward(kind, pair, FrequencySpec(omega, omega_r))


def load_pair(config, grid=None) -> AttenuationPair:
    """(v, alpha) from the model files of the configuration."""
    m = config.model
    if not m.velocity_file:
        raise ConfigError('[model] velocity_file is required for this scenario')
    v = read_field(m.velocity_file)
    if not isinstance(v, RealField):
        raise ConfigError(f'{m.velocity_file} must hold a real field')
    alpha = read_field(m.alpha_file) if m.alpha_file else RealField.constant(v.grid, 0.0)
    if grid is not None and v.grid != grid:
        raise ConfigError(f'Model grid {v.grid.nz}x{v.grid.nx} does not match [grid] {grid.nz}x{grid.nx}')
    return checked(lambda: AttenuationPair(v, alpha).check_physical(), '[model]')


def initial_model(config, grid, omega) -> ComplexField:
    m = config.model
    if m.initial_file:
        field = read_field(m.initial_file)
        if not isinstance(field, ComplexField) or field.grid != grid:
            raise ConfigError(f'{m.initial_file} must hold a complex field on the [grid] grid')
        return field
    background = AttenuationPair(RealField.constant(grid, m.velocity), RealField.constant(grid, m.alpha))
    spec = FrequencySpec(omega, reference_omega(config))
    return checked(lambda: forward(config.attenuation.data_kind, background, spec), '[model] background')
