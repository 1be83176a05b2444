from dataclasses import dataclass
from typing import List, Tuple

import numpy as np
import pandas as pd

from ..errors import InvalidArgumentError


@dataclass(frozen=True)
class FrequencyBatch:
    """Frequencies (Hz) inverted jointly with one frequency-independent model."""
    frequencies: Tuple[float, ...]

    def __post_init__(self):
        freqs = tuple(float(f) for f in self.frequencies)
        object.__setattr__(self, 'frequencies', freqs)
        if not freqs:
            raise InvalidArgumentError('A frequency batch needs at least one frequency')
        if freqs[0] <= 0 or np.any(np.diff(freqs) <= 0):
            raise InvalidArgumentError(f'Batch frequencies must be positive and increasing, got {freqs}')

    def __len__(self):
        return len(self.frequencies)

    def __iter__(self):
        return iter(self.frequencies)

    @property
    def omegas(self):
        return 2 * np.pi * np.asarray(self.frequencies)

    @property
    def label(self):
        return f'{self.frequencies[0]:g}-{self.frequencies[-1]:g}Hz'


def frequency_plan(f_min, f_max, df):
    """f_min, f_min + df, ... up to f_max inclusive."""
    if not df > 0:
        raise InvalidArgumentError(f'Frequency step must be positive, got {df}')
    if not 0 < f_min <= f_max:
        raise InvalidArgumentError(f'Need 0 < f_min <= f_max, got {f_min}, {f_max}')
    count = int(np.floor((f_max - f_min) / df + 1e-9)) + 1
    return f_min + df * np.arange(count)


def build_batches(f_min, f_max, df, batch_size, overlap) -> List[FrequencyBatch]:
    """Sliding windows of `batch_size` frequencies, consecutive windows sharing `overlap` of them."""
    if batch_size < 1 or not 0 <= overlap < batch_size:
        raise InvalidArgumentError(f'Need batch_size >= 1 and 0 <= overlap < batch_size, got {batch_size}, {overlap}')
    freqs = frequency_plan(f_min, f_max, df)
    step = batch_size - overlap
    batches = []
    for start in range(0, freqs.size, step):
        batches.append(FrequencyBatch(tuple(freqs[start:start + batch_size])))
        if start + batch_size >= freqs.size:
            break
    return batches


def batch_table(batches):
    rows = [dict(batch=k, f_min=b.frequencies[0], f_max=b.frequencies[-1], n_freq=len(b),
                 frequencies=' '.join(f'{f:g}' for f in b))
            for k, b in enumerate(batches, 1)]
    return pd.DataFrame(rows, columns=['batch', 'f_min', 'f_max', 'n_freq', 'frequencies'])
