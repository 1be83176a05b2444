import numpy as np
import pandas as pd

from ..errors import InvalidArgumentError
from ..fields import ComplexField
from .mappings import SLOWNESS, AttenuationModelKind, AttenuationPair


def band_omegas(batch):
    """Angular frequencies of a batch (a FrequencyBatch or a plain sequence in rad/s)."""
    omegas = np.asarray(getattr(batch, 'omegas', batch), dtype=float).ravel()
    if omegas.size == 0:
        raise InvalidArgumentError('Empty frequency batch')
    return omegas


def band_center(batch) -> float:
    return float(np.mean(band_omegas(batch)))


def piecewise_band_models(pair: AttenuationPair, batches, kind, omega_r):
    """One frequency-independent model per batch, the mapping evaluated at the batch centre."""
    if not batches:
        raise InvalidArgumentError('No frequency batches given')
    pair.check_physical()
    slowness = SLOWNESS[AttenuationModelKind(kind)]
    return [
        ComplexField(pair.grid, slowness(pair.v.values, pair.alpha.values, band_center(batch), omega_r))
        for batch in batches
    ]


def dispersion_curves(m):
    """Phase velocity 1/Re(sqrt(m)) and inverse quality factor Im(m)/Re(m)."""
    m = np.asarray(m, dtype=complex)
    return 1.0 / np.sqrt(m).real, m.imag / m.real


def band_staircase(v, alpha, omega_r, batches, kind) -> pd.DataFrame:
    """Exact and band-wise dispersion curves of a homogeneous medium on every batch frequency.

    A frequency shared by two batches is attributed to the first one.
    """
    slowness = SLOWNESS[AttenuationModelKind(kind)]
    rows = []
    seen = set()
    for index, batch in enumerate(batches):
        omegas = band_omegas(batch)
        center = omegas.mean()
        band_c, band_q = dispersion_curves(slowness(v, alpha, center, omega_r))
        for omega in omegas:
            if omega in seen:
                continue
            seen.add(omega)
            exact_c, exact_q = dispersion_curves(slowness(v, alpha, omega, omega_r))
            rows.append({
                'band': index,
                'frequency': omega / (2 * np.pi),
                'center_frequency': center / (2 * np.pi),
                'velocity_exact': float(exact_c),
                'velocity_band': float(band_c),
                'inverse_q_exact': float(exact_q),
                'inverse_q_band': float(band_q),
            })
    return pd.DataFrame(rows)
