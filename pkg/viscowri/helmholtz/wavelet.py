from dataclasses import dataclass

import numpy as np

from ..errors import InvalidArgumentError


def ricker_spectrum(f_dominant, omega, delay=0.0):
    """Spectrum R of the zero-phase Ricker wavelet, normalized so r(t) = integral of R e^{-i omega t}.

    A positive delay shifts the wavelet later in time.
    """
    if not f_dominant > 0:
        raise InvalidArgumentError(f'Dominant frequency must be positive, got {f_dominant}')
    omega = np.asarray(omega, dtype=float)
    omega_p = 2 * np.pi * f_dominant
    spectrum = (2 / np.sqrt(np.pi)) * (omega ** 2 / omega_p ** 3) * np.exp(-omega ** 2 / omega_p ** 2)
    return spectrum * np.exp(1j * omega * delay)


def ricker_wavelet(f_dominant, t):
    arg = (np.pi * f_dominant * np.asarray(t, dtype=float)) ** 2
    return (1 - 2 * arg) * np.exp(-arg)


def synthesize_traces(omegas, spectra, times):
    """Real time signals from one-sided spectra on a uniform angular-frequency grid.

    Args:
      omegas: Increasing, uniformly spaced angular frequencies (rad/s), shape (nf,).
      spectra: Complex spectra with frequency on the first axis, shape (nf, ...).
      times: Output times (s).

    Returns:
      Array of shape (len(times), ...) with u(t) = 2 Re sum_k w_k S_k e^{-i omega_k t} d_omega.
    """
    omegas = np.asarray(omegas, dtype=float)
    spectra = np.asarray(spectra, dtype=complex)
    if omegas.ndim != 1 or spectra.shape[0] != omegas.size:
        raise InvalidArgumentError('Spectra must have one row per frequency')
    if omegas.size == 1:
        raise InvalidArgumentError('At least two frequencies are needed to synthesize a trace')
    step = np.diff(omegas)
    if not np.allclose(step, step[0], rtol=1e-6):
        raise InvalidArgumentError('Frequencies must be uniformly spaced')

    weights = np.full(omegas.size, step[0])
    weights[[0, -1]] *= 0.5  # trapezoid
    kernel = np.exp(-1j * np.outer(np.asarray(times, dtype=float), omegas)) * weights
    flat = spectra.reshape(omegas.size, -1)
    return 2 * np.real(kernel @ flat).reshape((len(times),) + spectra.shape[1:])


@dataclass(frozen=True)
class SourceWavelet:
    """Source signature: unit-amplitude monochromatic, or Ricker weighted."""
    kind: str = 'unit'
    f_dominant: float = 10.0
    delay: float = 0.0

    def __post_init__(self):
        if self.kind not in ('unit', 'ricker'):
            raise InvalidArgumentError(f'Unknown wavelet kind {self.kind!r}')
        if self.kind == 'ricker' and not self.f_dominant > 0:
            raise InvalidArgumentError(f'Dominant frequency must be positive, got {self.f_dominant}')

    def amplitude(self, omega):
        if self.kind == 'unit':
            return 1.0 + 0j
        return complex(ricker_spectrum(self.f_dominant, omega, self.delay))
