import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Dict, List

import numpy as np

from ..errors import InvalidArgumentError
from ..fields import wrapped_phase

ATTRIBUTES = ('real', 'imag', 'magnitude', 'phase', 'v', 'alpha')


def _values(f):
    return np.asarray(getattr(f, 'values', f))


def model_error(estimate, truth, attribute, mask=None):
    """Relative l2 error of one attribute of a model, over the masked cells.

    'real', 'imag', 'magnitude' and 'phase' read complex models; 'v' and 'alpha' compare real fields as given.
    The phase error uses the wrapped difference and is relative to the true phase norm.
    """
    if attribute not in ATTRIBUTES:
        raise InvalidArgumentError(f'Unknown attribute {attribute!r}, expected one of {ATTRIBUTES}')
    est, true = _values(estimate), _values(truth)
    if est.shape != true.shape:
        raise InvalidArgumentError(f'Shapes differ: {est.shape} vs {true.shape}')
    if mask is not None:
        est, true = est[mask], true[mask]

    if attribute == 'phase':
        diff = wrapped_phase(np.exp(1j * (np.angle(est) - np.angle(true))))
        reference = np.angle(true)
    else:
        view = {'real': np.real, 'imag': np.imag, 'magnitude': np.abs}.get(attribute, np.real)
        diff = view(est) - view(true)
        reference = view(true)
    top = np.linalg.norm(diff)
    bottom = np.linalg.norm(reference)
    if bottom == 0:
        return float(top)
    return float(top / bottom)


def relative_discrepancy(estimate, reference):
    """(relative l-inf, relative l2) of estimate - reference."""
    estimate, reference = np.asarray(estimate), np.asarray(reference)
    diff = estimate - reference
    linf = np.max(np.abs(diff)) / max(np.max(np.abs(reference)), 1e-300)
    l2 = np.linalg.norm(diff) / max(np.linalg.norm(reference), 1e-300)
    return float(linf), float(l2)


@dataclass
class MetricsReport:
    scenario: str
    seed: int
    errors: Dict[str, Dict[str, float]] = field(default_factory=dict)
    """Per run (e.g. regularizer), attribute -> relative l2 error."""

    misfit_history: Dict[str, List[float]] = field(default_factory=dict)
    wall_times: Dict[str, float] = field(default_factory=dict)
    extra: Dict[str, float] = field(default_factory=dict)

    def add_error(self, run, attribute, value):
        if not value >= 0 and not np.isnan(value):
            raise InvalidArgumentError(f'Negative error {value} for {run}/{attribute}')
        self.errors.setdefault(run, {})[attribute] = float(value)

    def to_dict(self):
        return asdict(self)

    def write(self, path):
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, 'w') as f:
            json.dump(self.to_dict(), f, indent=2, default=float)
        return path
