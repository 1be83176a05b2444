"""Kolsky-Futterman and standard-linear-solid mappings between (v, alpha) and squared slowness.

Every mapping uses the e^{-i omega t} convention of the Helmholtz assembly: an attenuative
medium has Im(m) > 0.
"""
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

import numpy as np

from ..errors import DomainError, ExtractionError, InvalidArgumentError
from ..fields import ComplexField, RealField

NEGATIVE_ALPHA_NOISE = 1e-12


class AttenuationModelKind(str, Enum):
    KF = 'kf'
    SLS = 'sls'


class FrequencySpec(NamedTuple):
    """Angular frequency of evaluation and reference angular frequency."""

    omega: float
    """Angular frequency (rad/s) the mapping is evaluated at."""

    omega_r: float
    """Reference angular frequency (rad/s) at which v and alpha are defined."""

    def checked(self):
        if not (self.omega > 0 and self.omega_r > 0):
            raise InvalidArgumentError(f'Frequencies must be positive, got {self}')
        return self

    @classmethod
    def from_hz(cls, f, f_r):
        return cls(2 * np.pi * f, 2 * np.pi * f_r).checked()


@dataclass(frozen=True)
class AttenuationPair:
    """Phase velocity (m/s) and attenuation factor (1/Q) at the reference frequency."""
    v: RealField
    alpha: RealField

    def __post_init__(self):
        if self.v.grid != self.alpha.grid:
            raise InvalidArgumentError('v and alpha live on different grids')

    @property
    def grid(self):
        return self.v.grid

    def check_physical(self):
        if np.any(~np.isfinite(self.v.values)) or np.any(self.v.values <= 0):
            raise DomainError(f'Velocity must be positive and finite ({np.sum(self.v.values <= 0)} bad cells)')
        if np.any(~np.isfinite(self.alpha.values)) or np.any(self.alpha.values < 0):
            raise DomainError(f'Attenuation factor must be nonnegative ({np.sum(self.alpha.values < 0)} bad cells)')
        return self


def _clamp_noise(alpha):
    return np.where((alpha < 0) & (alpha > -NEGATIVE_ALPHA_NOISE), 0.0, alpha)


def kf_slowness(v, alpha, omega, omega_r):
    log_ratio = np.log(np.abs(omega / omega_r))
    return (1.0 / v ** 2) * (1 - (alpha / np.pi) * log_ratio + 0.5j * alpha) ** 2


def relaxation_times(alpha, omega_r):
    root = np.sqrt(1 + alpha ** 2)
    return (root + alpha) / omega_r, (root - alpha) / omega_r


def _sls_normalization(tau_eps, tau_sig, omega_r):
    return np.real(np.sqrt((1 + 1j * omega_r * tau_sig) / (1 + 1j * omega_r * tau_eps))) ** -2


def sls_slowness(v, alpha, omega, omega_r):
    tau_eps, tau_sig = relaxation_times(alpha, omega_r)
    relaxation = (1 - 1j * omega * tau_sig) / (1 - 1j * omega * tau_eps)
    return (1.0 / v ** 2) * _sls_normalization(tau_eps, tau_sig, omega_r) * relaxation


def kf_forward(pair: AttenuationPair, freq: FrequencySpec) -> ComplexField:
    pair.check_physical()
    freq.checked()
    return ComplexField(pair.grid, kf_slowness(pair.v.values, pair.alpha.values, freq.omega, freq.omega_r))


def sls_forward(pair: AttenuationPair, freq: FrequencySpec) -> ComplexField:
    pair.check_physical()
    freq.checked()
    return ComplexField(pair.grid, sls_slowness(pair.v.values, pair.alpha.values, freq.omega, freq.omega_r))


def sls_relaxation_times(alpha: RealField, omega_r: float):
    if not omega_r > 0:
        raise InvalidArgumentError(f'Reference frequency must be positive, got {omega_r}')
    tau_eps, tau_sig = relaxation_times(alpha.values, omega_r)
    return RealField(alpha.grid, tau_eps), RealField(alpha.grid, tau_sig)


def kf_extract(m, omega, omega_r):
    root = np.sqrt(np.asarray(m, dtype=complex))
    denominator = root.real + (2 / np.pi) * np.log(np.abs(omega / omega_r)) * root.imag
    bad = np.flatnonzero(~(denominator > 0))
    if bad.size:
        raise ExtractionError('KF extraction denominator is not positive', bad)
    return 1.0 / denominator, _clamp_noise(2 * root.imag / denominator)


def sls_extract(m, omega, omega_r):
    inverse = 1.0 / np.asarray(m, dtype=complex)
    bad = np.flatnonzero(~(inverse.real > 0))
    if bad.size:
        raise ExtractionError('SLS extraction needs Re(1/m) > 0', bad)
    # Im(1/m) = 0 gives alpha = 0 without a division by it
    alpha = (omega ** 2 + omega_r ** 2) / (2 * omega * omega_r) * (-inverse.imag / inverse.real)
    alpha = _clamp_noise(alpha)
    tau_eps, tau_sig = relaxation_times(alpha, omega_r)
    v_squared = (inverse.real * _sls_normalization(tau_eps, tau_sig, omega_r)
                 * (1 + omega ** 2 * tau_sig ** 2) / (1 + omega ** 2 * tau_sig * tau_eps))
    return np.sqrt(v_squared), alpha


def kf_inverse(m: ComplexField, freq: FrequencySpec) -> AttenuationPair:
    freq.checked()
    v, alpha = kf_extract(m.values, freq.omega, freq.omega_r)
    return AttenuationPair(RealField(m.grid, v), RealField(m.grid, alpha))


def sls_inverse(m: ComplexField, freq: FrequencySpec) -> AttenuationPair:
    freq.checked()
    v, alpha = sls_extract(m.values, freq.omega, freq.omega_r)
    return AttenuationPair(RealField(m.grid, v), RealField(m.grid, alpha))


FORWARD = {AttenuationModelKind.KF: kf_forward, AttenuationModelKind.SLS: sls_forward}
INVERSE = {AttenuationModelKind.KF: kf_inverse, AttenuationModelKind.SLS: sls_inverse}
SLOWNESS = {AttenuationModelKind.KF: kf_slowness, AttenuationModelKind.SLS: sls_slowness}
EXTRACT = {AttenuationModelKind.KF: kf_extract, AttenuationModelKind.SLS: sls_extract}


def forward(kind, pair, freq):
    return FORWARD[AttenuationModelKind(kind)](pair, freq)


def inverse(kind, m, freq):
    return INVERSE[AttenuationModelKind(kind)](m, freq)
