import json
import logging
from datetime import datetime
from pathlib import Path

import numpy as np
import pandas as pd

from .. import __version__
from ..fields import write_field, write_profile

logger = logging.getLogger('Writers')
logger.setLevel(logging.DEBUG)


class OutputWriter:
    """Writes a scenario's artifacts under one directory and remembers what it wrote."""

    def __init__(self, directory, enabled=True):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self.enabled = enabled
        self.written = []

    def path(self, name):
        return self.directory / name

    def _done(self, path):
        self.written.append(path.name)
        logger.debug(f'Written :: {path}')
        return path

    def field(self, name, field):
        if not self.enabled:
            return None
        return self._done(write_field(self.path(name), field))

    def profile(self, name, columns):
        return self._done(write_profile(self.path(name), columns))

    def table(self, name, frame: pd.DataFrame):
        path = self.path(name)
        frame.to_csv(path, index=False)
        return self._done(path)

    def report(self, name, report):
        return self._done(report.write(self.path(name)))

    def manifest(self, config, extra=None):
        """Configuration echo, package version, seed and the list of files written."""
        content = {
            'version': __version__,
            'created': datetime.now().isoformat(timespec='seconds'),
            'seed': config.scenario.seed,
            'config': config.to_dict(),
            'source': config.source,
            'files': sorted(self.written),
        }
        content.update(extra or {})
        path = self.path('manifest.json')
        with open(path, 'w') as f:
            json.dump(content, f, indent=2, default=_jsonable)
        logger.info(f'Manifest written :: {path}')
        return path


def _jsonable(value):
    if isinstance(value, np.generic):
        return value.item()
    return str(value)
