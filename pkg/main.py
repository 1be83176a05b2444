import logging
import logging.config
import sys
from pathlib import Path

import click

from viscowri.attenuation import FrequencySpec
from viscowri.errors import VwriError
from viscowri.irwri import batch_table, build_batches
from viscowri.scenarios import (CustomWorkflow, ExperimentConfig, OutputWriter, cs1d_experiment, extract_file,
                                inclusion_experiment, piecewise_wavefield_experiment)


HERE = Path(__file__).resolve().parent
LOGGING_CONF = HERE / 'files' / 'logging.conf'

if LOGGING_CONF.exists():
    logging.config.fileConfig(LOGGING_CONF, disable_existing_loggers=False)
else:
    logging.basicConfig(level=logging.INFO)
logger = logging.getLogger('Main')
logger.setLevel(logging.DEBUG)


def _config(kind, path, **overrides):
    config = ExperimentConfig.load(path) if path else ExperimentConfig.default(kind)
    return config.with_overrides(**overrides)


def _guarded(work):
    """Run a command, turning package errors into their exit codes."""
    try:
        return work()
    except VwriError as e:
        logger.error(f'{type(e).__name__} :: {str(e)}')
        sys.exit(e.exit_code)


config_option = click.option('--config', 'config_path', type=click.Path(dir_okay=False), default=None,
                             help='TOML scenario file (defaults to the shipped one).')
seed_option = click.option('--seed', type=int, default=None, help='Random seed.')
out_option = click.option('--out', type=click.Path(file_okay=False), default=None, help='Output directory.')
reg_option = click.option('--reg', type=click.Choice(['none', 'alg1', 'alg2', 'alg3']), default=None,
                          help='Model regularizer.')
tau_option = click.option('--tau', type=float, default=None, help='Magnitude/phase trade-off in [0, 1].')
threads_option = click.option('--threads', type=int, default=None, help='Worker threads for wavefield solves.')


@click.group()
def cli():
    """Visco-acoustic frequency-domain waveform inversion with complex-valued models."""


@cli.command()
@config_option
@seed_option
@out_option
@tau_option
def cs1d(config_path, seed, out, tau):
    """Compressed sensing of a complex 1-D signal with the three TV solvers."""
    def work():
        config = _config('cs1d', config_path, seed=seed, out=out, tau=tau)
        report = cs1d_experiment(config)
        for name, errors in report.errors.items():
            click.echo(f'{name:12s} complex {errors["complex"]:.4e} magnitude {errors["magnitude"]:.4e}')
    _guarded(work)


@cli.command()
@config_option
@seed_option
@out_option
@reg_option
@tau_option
@threads_option
def inclusion(config_path, seed, out, reg, tau, threads):
    """Joint multi-frequency inversion of the two-inclusion model."""
    def work():
        config = _config('inclusion', config_path, seed=seed, out=out, reg=reg, tau=tau, threads=threads)
        report = inclusion_experiment(config)
        for name, errors in report.errors.items():
            click.echo(f'{name:12s} ' + ' '.join(f'{k} {v:.4e}' for k, v in errors.items()))
    _guarded(work)


@cli.command()
@config_option
@out_option
def piecewise(config_path, out):
    """Exact vs band-wise frequency-independent models in the time domain."""
    def work():
        config = _config('piecewise', config_path, out=out)
        report = piecewise_wavefield_experiment(config)
        for key, value in report.extra.items():
            click.echo(f'{key:36s} {value:.4e}')
    _guarded(work)


@cli.command()
@config_option
@seed_option
@out_option
@threads_option
def forward(config_path, seed, out, threads):
    """Model frequency-domain data (and seismograms) of user-supplied (v, alpha) files."""
    def work():
        config = _config('north_sea', config_path, seed=seed, out=out, threads=threads)
        data = CustomWorkflow(config).forward()
        click.echo(f'{len(data)} frequencies written to {config.scenario.output}')
    _guarded(work)


@cli.command()
@config_option
@seed_option
@out_option
@reg_option
@tau_option
@threads_option
def invert(config_path, seed, out, reg, tau, threads):
    """IR-WRI with frequency continuation over the configured batch plan."""
    def work():
        config = _config('north_sea', config_path, seed=seed, out=out, reg=reg, tau=tau, threads=threads)
        _, report = CustomWorkflow(config).invert()
        for name, errors in report.errors.items():
            click.echo(f'{name:6s} ' + ' '.join(f'{k} {v:.4e}' for k, v in errors.items()))
    _guarded(work)


@cli.command()
@click.argument('m_file', type=click.Path(dir_okay=False))
@click.option('--kind', type=click.Choice(['kf', 'sls']), default='sls', help='Attenuation mechanism.')
@click.option('--frequency', type=float, required=True, help='Frequency of the model (Hz).')
@click.option('--reference', type=float, default=10.0, help='Reference frequency (Hz).')
@out_option
@click.option('--lenient', is_flag=True, help='Write NaN at cells outside the mapping domain instead of failing.')
def extract(m_file, kind, frequency, reference, out, lenient):
    """Extract (v, alpha) from a complex model file."""
    def work():
        freq = FrequencySpec.from_hz(frequency, reference)
        writer = OutputWriter(out or 'out')
        pair = extract_file(m_file, kind, freq, writer, strict=not lenient)
        click.echo(f'v in [{pair.v.values.min():.6g}, {pair.v.values.max():.6g}], '
                   f'alpha in [{pair.alpha.values.min():.6g}, {pair.alpha.values.max():.6g}]')
    _guarded(work)


@cli.command()
@config_option
@click.option('--f-min', type=float, default=None)
@click.option('--f-max', type=float, default=None)
@click.option('--df', type=float, default=None)
@click.option('--batch-size', type=int, default=None)
@click.option('--overlap', type=int, default=None)
def batches(config_path, f_min, f_max, df, batch_size, overlap):
    """Print the frequency batch plan."""
    def work():
        plan = (ExperimentConfig.load(config_path) if config_path else ExperimentConfig.default('north_sea')).frequencies
        table = batch_table(build_batches(
            plan.f_min if f_min is None else f_min, plan.f_max if f_max is None else f_max,
            plan.df if df is None else df, plan.batch_size if batch_size is None else batch_size,
            plan.overlap if overlap is None else overlap,
        ))
        click.echo(table.to_string(index=False))
    _guarded(work)


if __name__ == '__main__':
    cli()
