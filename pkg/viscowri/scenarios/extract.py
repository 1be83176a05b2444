import logging

import numpy as np
import pandas as pd

from ..attenuation import AttenuationModelKind, AttenuationPair, FrequencySpec
from ..attenuation.mappings import EXTRACT
from ..errors import ExtractionError, InvalidArgumentError
from ..fields import ComplexField, RealField, read_field

logger = logging.getLogger('Extract')
logger.setLevel(logging.DEBUG)


def extract_physical(m: ComplexField, kind, freq: FrequencySpec, strict=True) -> AttenuationPair:
    """(v, alpha) of a complex model under one mechanism.

    With `strict` unset, cells outside the mapping's domain become NaN and are counted in the log
    instead of aborting the whole extraction.
    """
    freq.checked()
    extract = EXTRACT[AttenuationModelKind(kind)]
    try:
        v, alpha = extract(m.values, freq.omega, freq.omega_r)
    except ExtractionError as e:
        if strict:
            raise
        logger.warning(f'{kind} extraction :: {str(e)}')
        good = np.ones(m.grid.n, dtype=bool)
        good[e.cells] = False
        v, alpha = np.full(m.grid.n, np.nan), np.full(m.grid.n, np.nan)
        v[good], alpha[good] = extract(m.values[good], freq.omega, freq.omega_r)
    return AttenuationPair(RealField(m.grid, v), RealField(m.grid, alpha))


def extract_file(m_file, kind, freq: FrequencySpec, writer, strict=True):
    """Read a complex VWF1 model, extract (v, alpha) and write both fields."""
    m = read_field(m_file)
    if not isinstance(m, ComplexField):
        raise InvalidArgumentError(f'{m_file} does not hold a complex model')
    pair = extract_physical(m, kind, freq, strict)
    writer.field(f'v_{AttenuationModelKind(kind).value}.vwf', pair.v)
    writer.field(f'alpha_{AttenuationModelKind(kind).value}.vwf', pair.alpha)
    logger.info(f'Extracted :: {m_file} :: {kind} :: omega {freq.omega:.4g} :: omega_r {freq.omega_r:.4g}')
    return pair


def mechanism_comparison(m: ComplexField, freq: FrequencySpec):
    """KF and SLS readings of the same complex model, per cell, with aggregate differences."""
    kf = extract_physical(m, AttenuationModelKind.KF, freq, strict=False)
    sls = extract_physical(m, AttenuationModelKind.SLS, freq, strict=False)
    z, x = m.grid.coordinates()
    cells = pd.DataFrame({
        'z': z, 'x': x,
        'v_kf': kf.v.values, 'v_sls': sls.v.values,
        'alpha_kf': kf.alpha.values, 'alpha_sls': sls.alpha.values,
    })
    valid = np.isfinite(kf.v.values) & np.isfinite(sls.v.values)
    diff = kf.v.values[valid] - sls.v.values[valid]
    summary = {
        'v_relative_l2': float(np.linalg.norm(diff) / max(np.linalg.norm(sls.v.values[valid]), 1e-300)),
        'alpha_mean_abs_diff': float(np.mean(np.abs(kf.alpha.values[valid] - sls.alpha.values[valid])))
        if valid.any() else float('nan'),
        'invalid_cells': int(np.count_nonzero(~valid)),
    }
    return cells, summary
