import logging
from pathlib import Path

import numpy as np
import pandas as pd

from ..errors import InvalidArgumentError
from .grid import ComplexField, Grid2D, RealField


logger = logging.getLogger('Storage')
logger.setLevel(logging.DEBUG)

MAGIC = 'VWF1'
HEADER_BYTES = 32


def _header(grid: Grid2D, kind: str) -> bytes:
    text = f'{MAGIC} {grid.nz} {grid.nx} {grid.h!r} {kind}'
    if len(text) > HEADER_BYTES - 1:
        raise InvalidArgumentError(f'Header does not fit in {HEADER_BYTES} bytes: {text!r}')
    return (text.ljust(HEADER_BYTES - 1) + '\n').encode('ascii')


def write_field(path, field):
    """Write a field as a VWF1 file: text header, then little-endian float64 rows."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if isinstance(field, ComplexField):
        kind, payload = 'C', field.as_array().astype('<c16')
    elif isinstance(field, RealField):
        kind, payload = 'R', field.as_array().astype('<f8')
    else:
        raise InvalidArgumentError(f'Cannot serialize {type(field).__name__}')

    with open(path, 'wb') as f:
        f.write(_header(field.grid, kind))
        f.write(np.ascontiguousarray(payload).tobytes(order='C'))
    logger.debug(f'Field written :: {path} ({field.grid.nz}x{field.grid.nx}, {kind})')
    return path


def read_field(path):
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as e:
        raise InvalidArgumentError(f'Could not read field file {path}. {str(e)}')

    try:
        magic, nz, nx, h, kind = raw[:HEADER_BYTES].decode('ascii').split()
        grid = Grid2D(int(nz), int(nx), float(h))
    except (UnicodeDecodeError, ValueError) as e:
        raise InvalidArgumentError(f'Malformed VWF1 header in {path}. {str(e)}')
    if magic != MAGIC or kind not in ('R', 'C'):
        raise InvalidArgumentError(f'{path} is not a VWF1 field file')

    dtype = '<c16' if kind == 'C' else '<f8'
    data = np.frombuffer(raw[HEADER_BYTES:], dtype=dtype)
    if data.size != grid.n:
        raise InvalidArgumentError(f'{path} holds {data.size} values, header announces {grid.n}')
    values = grid.from_array(data.reshape(grid.shape))
    if kind == 'C':
        return ComplexField(grid, values)
    return RealField(grid, values)


def write_csv(path, field, part='real'):
    """One CSV row per grid row, for plotting. `part` picks the view of a complex field."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if isinstance(field, ComplexField):
        views = {
            'real': field.real, 'imag': field.imag,
            'magnitude': field.magnitude, 'phase': field.phase
        }
        if part not in views:
            raise InvalidArgumentError(f'Unknown complex view {part!r}')
        field = views[part]
    pd.DataFrame(field.as_array()).to_csv(path, header=False, index=False)
    return path


def write_profile(path, columns: dict):
    """Named 1-D profiles side by side, e.g. a vertical cut through true and recovered models."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    pd.DataFrame(columns).to_csv(path, index=False)
    return path
