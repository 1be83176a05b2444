import numpy as np


class VwriError(Exception):
    exit_code = 1


class InvalidArgumentError(VwriError, ValueError):
    exit_code = 2


class ConfigError(VwriError):
    exit_code = 2


class DomainError(VwriError, ValueError):
    exit_code = 5


class SolverError(VwriError, RuntimeError):
    exit_code = 3

    def __init__(self, message, diagnostic=None):
        super().__init__(message if diagnostic is None else f'{message} :: {diagnostic}')
        self.diagnostic = diagnostic


class ExtractionError(VwriError, ValueError):
    """Inverse mapping undefined at some cells.

    Attributes:
        cells: Flat (column-major) indices of the offending cells.
    """
    exit_code = 4

    def __init__(self, message, cells):
        self.cells = np.asarray(cells, dtype=int)
        preview = ', '.join(str(c) for c in self.cells[:10])
        more = ' ...' if self.cells.size > 10 else ''
        super().__init__(f'{message} :: {self.cells.size} cell(s) [{preview}{more}]')
