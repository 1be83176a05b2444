import logging
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import List, Optional

import tomli

from ..errors import ConfigError

logger = logging.getLogger('Config')
logger.setLevel(logging.DEBUG)

SCENARIO_KINDS = ('cs1d', 'inclusion', 'piecewise', 'custom')
SCENARIO_DIR = Path(__file__).resolve().parents[2] / 'files' / 'scenarios'


@dataclass
class ScenarioSection:
    kind: str = 'inclusion'
    seed: int = 0
    output: str = 'out'
    threads: int = 1


@dataclass
class GridSection:
    nz: int = 81
    nx: int = 81
    h: float = 25.0


@dataclass
class PmlSection:
    n_layers: int = 20
    power: float = 2.0
    reflection: float = 1e-3


@dataclass
class AcquisitionSection:
    layout: str = 'perimeter'
    """'perimeter' (sources and receivers around the edges) or 'surface' (two horizontal lines)."""
    n_sources: int = 8
    n_receivers: int = 200
    margin: int = 2
    source_depth: float = 0.0
    source_spacing: float = 100.0
    receiver_depth: float = 0.0
    receiver_spacing: float = 25.0
    source_offset: float = 500.0
    """Source to receiver distance of the piecewise-wavefield trace (meters)."""


@dataclass
class FrequencySection:
    f_min: float = 5.0
    f_max: float = 7.0
    df: float = 1.0
    batch_size: int = 3
    overlap: int = 0


@dataclass
class ModelSection:
    velocity: float = 1500.0
    alpha: float = 0.01
    circle_velocity: float = 1800.0
    circle_alpha: float = 0.1
    radius: float = 125.0
    rect_velocity: float = 1300.0
    rect_alpha: float = 0.1
    rect_width: float = 200.0
    rect_height: float = 800.0
    length: int = 500
    measurements: int = 50
    velocity_file: str = ''
    alpha_file: str = ''
    initial_file: str = ''
    """Complex VWF1 starting model. Empty: the background (velocity, alpha) at the first frequency."""


@dataclass
class AttenuationSection:
    data_kind: str = 'sls'
    extraction_kinds: List[str] = field(default_factory=lambda: ['kf', 'sls'])
    f_reference: float = 10.0
    f_extraction: float = 6.0


@dataclass
class WaveletSection:
    kind: str = 'unit'
    f_dominant: float = 6.0
    delay: float = 0.0


@dataclass
class RegularizationSection:
    reg: str = 'alg3'
    regs: List[str] = field(default_factory=lambda: ['none', 'alg1', 'alg2', 'alg3'])
    """Regularizers compared by the inclusion scenario."""
    lam: float = 1.0
    gamma: Optional[float] = None
    tau: float = 0.5
    max_iters: int = 500
    phase_reg: str = 'smooth_phase'
    curvature: str = 'scalar'
    gamma_ratio: float = 0.01
    armijo_alpha: float = 1e-4
    armijo_shrink: float = 0.5
    armijo_max_backtracks: int = 30
    tv_phase_iters: int = 20
    refine: bool = True


@dataclass
class IrwriSection:
    lam: float = 1.0
    gamma: Optional[float] = None
    max_iters: int = 30
    eps_b: float = 1e-3
    eps_d: float = 1e-5
    relative_stop: bool = False
    stencil: str = 'nine_point'


@dataclass
class OutputSection:
    write_fields: bool = True
    seismograms: bool = False
    trace_duration: float = 1.0
    trace_samples: int = 501
    snapshot_time: float = 0.5


SECTIONS = {
    'scenario': ScenarioSection,
    'grid': GridSection,
    'pml': PmlSection,
    'acquisition': AcquisitionSection,
    'frequencies': FrequencySection,
    'model': ModelSection,
    'attenuation': AttenuationSection,
    'wavelet': WaveletSection,
    'regularization': RegularizationSection,
    'irwri': IrwriSection,
    'output': OutputSection,
}


def _coerce(section, key, value, default):
    where = f'[{section}] {key}'
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ConfigError(f'{where} must be true or false, got {value!r}')
        return value
    if isinstance(value, bool):
        raise ConfigError(f'{where} must not be a boolean')
    if isinstance(default, int):
        if not isinstance(value, int):
            raise ConfigError(f'{where} must be an integer, got {value!r}')
        return value
    if default is None and value is None:
        return None
    if isinstance(default, float) or default is None:
        if not isinstance(value, (int, float)):
            raise ConfigError(f'{where} must be a number, got {value!r}')
        return float(value)
    if isinstance(default, str):
        if not isinstance(value, str):
            raise ConfigError(f'{where} must be a string, got {value!r}')
        return value
    if isinstance(default, list):
        if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
            raise ConfigError(f'{where} must be a list of strings, got {value!r}')
        return list(value)
    return value


def _section(name, cls, values):
    if not isinstance(values, dict):
        raise ConfigError(f'[{name}] must be a table')
    defaults = cls()
    known = {f.name for f in fields(cls)}
    unknown = sorted(set(values) - known)
    if unknown:
        raise ConfigError(f'Unknown keys in [{name}]: {", ".join(unknown)}')
    return replace(defaults, **{k: _coerce(name, k, v, getattr(defaults, k)) for k, v in values.items()})


@dataclass
class ExperimentConfig:
    scenario: ScenarioSection = field(default_factory=ScenarioSection)
    grid: GridSection = field(default_factory=GridSection)
    pml: PmlSection = field(default_factory=PmlSection)
    acquisition: AcquisitionSection = field(default_factory=AcquisitionSection)
    frequencies: FrequencySection = field(default_factory=FrequencySection)
    model: ModelSection = field(default_factory=ModelSection)
    attenuation: AttenuationSection = field(default_factory=AttenuationSection)
    wavelet: WaveletSection = field(default_factory=WaveletSection)
    regularization: RegularizationSection = field(default_factory=RegularizationSection)
    irwri: IrwriSection = field(default_factory=IrwriSection)
    output: OutputSection = field(default_factory=OutputSection)
    source: str = ''
    """Path the configuration was read from, if any."""

    def __post_init__(self):
        if self.scenario.kind not in SCENARIO_KINDS:
            raise ConfigError(f'Unknown scenario kind {self.scenario.kind!r}, expected one of {SCENARIO_KINDS}')
        if self.scenario.threads < 1:
            raise ConfigError(f'threads must be at least 1, got {self.scenario.threads}')

    @staticmethod
    def from_dict(values, source=''):
        unknown = sorted(set(values) - set(SECTIONS))
        if unknown:
            raise ConfigError(f'Unknown tables: {", ".join(unknown)}')
        sections = {name: _section(name, cls, values.get(name, {})) for name, cls in SECTIONS.items()}
        return ExperimentConfig(source=str(source), **sections)

    @staticmethod
    def load(path):
        path = Path(path)
        try:
            with open(path, 'rb') as f:
                values = tomli.load(f)
        except OSError as e:
            raise ConfigError(f'Could not read {path}. {str(e)}')
        except tomli.TOMLDecodeError as e:
            raise ConfigError(f'Malformed TOML in {path}. {str(e)}')
        config = ExperimentConfig.from_dict(values, path)
        logger.info(f'Configuration loaded :: {path} :: {config.scenario.kind}')
        return config

    @staticmethod
    def default(kind):
        """The shipped configuration of a scenario."""
        return ExperimentConfig.load(SCENARIO_DIR / f'{kind}.toml')

    def with_overrides(self, seed=None, out=None, reg=None, tau=None, threads=None):
        """Copy with command-line values taking precedence over the file."""
        scenario, regularization = self.scenario, self.regularization
        if seed is not None:
            scenario = replace(scenario, seed=int(seed))
        if out is not None:
            scenario = replace(scenario, output=str(out))
        if threads is not None:
            scenario = replace(scenario, threads=int(threads))
        if reg is not None:
            regularization = replace(regularization, reg=reg, regs=[reg])
        if tau is not None:
            regularization = replace(regularization, tau=float(tau))
        return replace(self, scenario=scenario, regularization=regularization)

    def to_dict(self):
        return {name: asdict(getattr(self, name)) for name in SECTIONS}
