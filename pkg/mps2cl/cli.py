import sys

import click

from typing import List, Optional, TextIO, Type

from mps2cl.config import ConfigParser, MissingConfigurationError, InvalidConfigurationError, PRESETS
from mps2cl.consts import PROG_NAME, VERSION, ENV_OUTPUT_DIR, ENV_WORKERS
from mps2cl.core.mps import load_tensors
from mps2cl.errors import ERROR_HANDLER, InputError, BoundViolation, SolverError, VerdictError
from mps2cl.experiments.common import Experiment, ExperimentOptions
from mps2cl.experiments.runner import (
    G1Experiment, CanonExperiment, SpectrumExperiment, BlockExperiment,
    ConvergeExperiment, ParentGapExperiment, DecomposeExperiment,
    PhasePathExperiment, SweepExperiment, AkltExperiment,
)
from mps2cl.logger import LOGGER, set_level

LOG_LEVELS = ['CRITICAL', 'ERROR', 'WARNING', 'INFO', 'DEBUG']
DEFAULT_LOG_LEVEL = 'INFO'

EXIT_VERDICT = 1
EXIT_CONFIG = 2


def _invalid(title: str, items: List[str]):
    click.echo(f'Error: {title}', err=True)
    for item in items:
        click.echo(f' - {item}', err=True)
    sys.exit(EXIT_CONFIG)


def validate_config(ctx, param, value: TextIO) -> ConfigParser:
    content = value.read()
    cfg_parser = ConfigParser()

    if not cfg_parser.can_read(content):
        _invalid('Cannot parse config file', [])

    try:
        cfg_parser.read_string(content)
        cfg_parser.validate()
        return cfg_parser
    except MissingConfigurationError as e:
        _invalid('Missing configuration', e.missing)
    except InvalidConfigurationError as e:
        _invalid('Invalid configuration', e.problems)


def _ints(values) -> Optional[List[int]]:
    return list(values) if values else None


def run(experiment_cls: Type[Experiment], cfg_parser: ConfigParser):
    config = cfg_parser.config
    d = None
    if config.model.file is not None:
        try:
            d = load_tensors(config.model.file).d
        except (OSError, InputError) as e:
            _invalid('Invalid configuration', [f'model.file: {e}'])
    problems = config.problems(experiment_cls.NAME, d)
    if problems:
        _invalid('Invalid configuration', problems)
    options = ExperimentOptions(
        output_dir=config.output.directory,
        workers=config.output.workers,
    )
    experiment = experiment_cls(config=config, options=options)
    LOGGER.info(f'Starting {experiment_cls.NAME}')
    exit_code = 0
    try:
        experiment.run()
    except VerdictError:
        LOGGER.info('Stopped at the first failed check, you can try to run with --best-effort flag')
        exit_code = EXIT_VERDICT
    except InputError as e:
        LOGGER.critical(f'Rejected input: {e}')
        experiment.abort(e)
        exit_code = EXIT_CONFIG
    except (BoundViolation, SolverError) as e:
        LOGGER.critical(f'{type(e).__name__}: {e}')
        experiment.abort(e)
        exit_code = EXIT_VERDICT
    experiment.finish()
    if ERROR_HANDLER.failed:
        for failure in ERROR_HANDLER.failures:
            LOGGER.error(f'- failed: {failure}')
        exit_code = exit_code or EXIT_VERDICT
    if exit_code:
        sys.exit(exit_code)
    LOGGER.info('Done, all checks passed')


@click.group(name=PROG_NAME)
@click.option('-c', '--config', type=click.File('r'),
              callback=validate_config, required=True,
              help='Config YML/JSON file (see example).')
@click.option('-o', '--output-dir', envvar=ENV_OUTPUT_DIR, type=click.Path(file_okay=False),
              help='Directory for JSON summaries and CSV tables.')
@click.option('-w', '--workers', envvar=ENV_WORKERS, type=click.IntRange(min=1),
              help='Worker processes for sweeps.')
@click.option('-p', '--preset', type=click.Choice(PRESETS),
              help='Model preset (overrides model.preset).')
@click.option('-m', '--model-file', type=click.Path(exists=True, dir_okay=False),
              help='Tensor JSON file (overrides model.file).')
@click.option('-s', '--seed', type=int,
              help='Seed of the random preset.')
@click.option('-b', '--best-effort', is_flag=True,
              help='Run in best effort mode (report every verdict instead of stopping at the first failure).')
@click.option('-l', '--log-level', type=click.Choice(LOG_LEVELS),
              default=DEFAULT_LOG_LEVEL, show_default=True,
              help='Set logging level.')
@click.version_option(version=VERSION, prog_name=PROG_NAME)
@click.pass_context
def main(ctx, config: ConfigParser, output_dir: Optional[str], workers: Optional[int],
         preset: Optional[str], model_file: Optional[str], seed: Optional[int],
         best_effort: bool, log_level: str):
    """Parent Hamiltonians of matrix product states, their renormalization
    into a classical Hamiltonian plus perturbations, and gap stability."""
    set_level(log_level)
    ERROR_HANDLER.reset()
    if best_effort:
        ERROR_HANDLER.set_log()
    else:
        ERROR_HANDLER.set_stop()
    config.set('output', 'directory', value=output_dir)
    config.set('output', 'workers', value=workers)
    if model_file is not None:
        config.set('model', 'file', value=model_file)
    elif preset is not None:
        config.set('model', 'preset', value=preset)
        config.cfg['model']['file'] = None
    config.set('model', 'seed', value=seed)
    ctx.obj = config


@main.command()
@click.option('--cap', type=click.IntRange(min=1), help='Largest block length tried.')
@click.pass_obj
def g1(config: ConfigParser, cap: Optional[int]):
    """Minimal L0 with spanning products and the span dimensions."""
    config.set('model', 'g1_cap', value=cap)
    run(G1Experiment, config)


@main.command()
@click.pass_obj
def canon(config: ConfigParser):
    """Canonical form and the dual fixed point Xi."""
    run(CanonExperiment, config)


@main.command()
@click.pass_obj
def spectrum(config: ConfigParser):
    """Transfer spectrum, lambda2 and the peripheral check."""
    run(SpectrumExperiment, config)


@main.command()
@click.option('-L', '--block-length', 'lengths', type=int, multiple=True, help='Block lengths.')
@click.pass_obj
def block(config: ConfigParser, lengths):
    """SVD blocking, compression identity and aligned rho distance."""
    config.set('block', 'L_list', value=_ints(lengths))
    run(BlockExperiment, config)


@main.command()
@click.option('-L', '--block-length', 'lengths', type=int, multiple=True,
              help='Block lengths of the convergence fit.')
@click.pass_obj
def converge(config: ConfigParser, lengths):
    """Convergence of T^L to the limit channel and of the projectors."""
    config.set('converge', 'L_range', value=_ints(lengths))
    run(ConvergeExperiment, config)


@main.command(name='parent-gap')
@click.option('-N', '--sites', 'sizes', type=int, multiple=True, help='Ring sizes.')
@click.option('-P', '--range', 'interaction_range', type=click.IntRange(min=1),
              help='Interaction range of the parent term.')
@click.pass_obj
def parent_gap(config: ConfigParser, sizes, interaction_range: Optional[int]):
    """Ground energy, degeneracy and gap of the periodic parent Hamiltonian."""
    config.set('parent', 'N_list', value=_ints(sizes))
    config.set('model', 'range', value=interaction_range)
    run(ParentGapExperiment, config)


def _decompose_options(f):
    f = click.option('-L', '--block-length', 'length', type=int, help='Block length (even).')(f)
    f = click.option('-m', '--blocks', type=int, help='Number of blocks on the ring.')(f)
    f = click.option('-P', '--range', 'interaction_range', type=click.IntRange(min=1),
                     help='Interaction range of the parent term.')(f)
    return f


def _set_decompose(config: ConfigParser, length, blocks, interaction_range):
    config.set('block', 'L', value=length)
    config.set('block', 'blocks', value=blocks)
    config.set('model', 'range', value=interaction_range)


@main.command()
@_decompose_options
@click.pass_obj
def decompose(config: ConfigParser, length, blocks, interaction_range):
    """Split the rotated parent Hamiltonian and check every bound."""
    _set_decompose(config, length, blocks, interaction_range)
    run(DecomposeExperiment, config)


@main.command(name='phase-path')
@_decompose_options
@click.option('--steps', type=click.IntRange(min=1), help='Number of path steps.')
@click.pass_obj
def phase_path(config: ConfigParser, length, blocks, interaction_range, steps):
    """Gap along the path from the classical Hamiltonian to the parent one."""
    _set_decompose(config, length, blocks, interaction_range)
    config.set('path', 'steps', value=steps)
    run(PhasePathExperiment, config)


@main.command()
@click.option('-N', '--sites', 'sizes', type=int, multiple=True, help='Ring sizes.')
@click.option('--beta', 'fractions', type=float, multiple=True,
              help='Perturbation strengths as fractions of the unperturbed gap.')
@click.option('--seeds', type=click.IntRange(min=1), help='Use seeds 0..n-1.')
@click.option('--ensemble', type=click.Choice(['iid', 'uniform']), help='Perturbation ensemble.')
@click.pass_obj
def sweep(config: ConfigParser, sizes, fractions, seeds: Optional[int], ensemble: Optional[str]):
    """Gap of randomly perturbed parent Hamiltonians."""
    config.set('sweep', 'N_list', value=_ints(sizes))
    config.set('sweep', 'beta_fractions', value=list(fractions) if fractions else None)
    config.set('sweep', 'seeds', value=list(range(seeds)) if seeds else None)
    config.set('sweep', 'ensemble', value=ensemble)
    run(SweepExperiment, config)


@main.command()
@click.pass_obj
def aklt(config: ConfigParser):
    """End-to-end checks for the spin-1 AKLT model."""
    run(AkltExperiment, config)
