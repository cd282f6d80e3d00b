"""
mouseauth command line.

    python cli.py parse INPUT_DIR [--output-dir DIR]
    python cli.py run [--config FILE] [--set key=value ...]
    python cli.py score MODEL LOG [--threshold T]
    python cli.py synth OUTPUT_DIR [--users N] [--duration S] [--seed N]
    python cli.py sweep [--lengths 5,10,20] [--scenario B]
"""
import logging
import os

import click

from config import load_pipeline_config, parse_override
from evaluation.report import render_report_table
from evaluation.stream import StreamAuthenticator, segmenter_for_model
from forest.forest import load_model
from io_utils import atomic_open
from mouse.event import read_session_file, write_session_log
from pipeline import clean_sessions, run_pipeline, sweep_sequence_lengths
from synth.generator import generate_corpus

logger = logging.getLogger(__name__)


def _setup_logging(verbose: bool):
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )


def _load_config(config_file, settings, **options):
    try:
        overrides = [parse_override(s) for s in settings]
        overrides += [(k, str(v)) for k, v in options.items() if v is not None]
        return load_pipeline_config(config_file, overrides)
    except ValueError as e:
        raise click.BadParameter(str(e))


@click.group()
@click.option('-v', '--verbose', is_flag=True, help='Debug logging.')
def cli(verbose):
    """Mouse dynamics continuous authentication."""
    _setup_logging(verbose)


@cli.command()
@click.argument('input_dir', type=click.Path(file_okay=False))
@click.option('--output-dir', type=click.Path(file_okay=False), default=None,
              help='Write the deduplicated logs here.')
def parse(input_dir, output_dir):
    """Validate and deduplicate every session log of INPUT_DIR."""
    try:
        sources = clean_sessions(input_dir, output_dir)
    except ValueError as e:
        raise click.ClickException(str(e))
    total_events = total_removed = 0
    for source in sources:
        click.echo(f"{source.name}: user {source.user_id}, {len(source.log)} events, "
                   f"duplicates removed: {source.duplicates_removed}, "
                   f"out of order: {source.log.out_of_order}")
        total_events += len(source.log)
        total_removed += source.duplicates_removed
    click.echo(f"{len(sources)} files, {total_events} events, duplicates removed: {total_removed}")


@cli.command()
@click.option('--config', 'config_file', type=click.Path(dir_okay=False), default=None,
              help='key=value settings file.')
@click.option('--set', 'settings', multiple=True, metavar='KEY=VALUE', help='Override one setting.')
@click.option('--input-dir', default=None, help='One session log per user.')
@click.option('--output-dir', default=None)
@click.option('--synth-users', type=int, default=None)
@click.option('--synth-duration', type=float, default=None)
@click.option('--scenarios', default=None, help='A, B or A,B.')
@click.option('--seed', type=int, default=None)
@click.option('--jobs', 'n_jobs', type=int, default=None)
def run(config_file, settings, **options):
    """Run the full pipeline and write reports, models and a manifest."""
    config = _load_config(config_file, settings, **options)
    try:
        result = run_pipeline(config)
    except ValueError as e:
        raise click.ClickException(str(e))
    for scenario in config.scenarios:
        click.echo(render_report_table(result.reports[scenario]))
    click.echo(f"Manifest: {result.manifest_path}")


@cli.command()
@click.argument('model_path', type=click.Path(exists=True, dir_okay=False))
@click.argument('log_path', type=click.Path(exists=True, dir_okay=False))
@click.option('--threshold', type=click.FloatRange(0.0, 1.0), default=0.5, show_default=True)
@click.option('--sequence-length', type=int, default=None,
              help='Defaults to the model\'s training windowing, else 10.')
@click.option('--stride', type=int, default=None, help='Defaults to the model\'s stride, else the sequence length.')
def score(model_path, log_path, threshold, sequence_length, stride):
    """Stream a session log through a user's model."""
    try:
        model = load_model(model_path)
        log = read_session_file(log_path)
        authenticator = StreamAuthenticator(model, segmenter_for_model(model, sequence_length, stride), threshold)
        for event in log.events:
            for decision in authenticator.push(event):
                click.echo(f"{decision.ordinal} {decision.score:.6f} {int(decision.decision)}")
    except ValueError as e:
        raise click.ClickException(str(e))
    rate = authenticator.authentication_rate
    rate_text = 'n/a' if rate is None else f"{rate:.4f}"
    click.echo(f"{authenticator.decisions} actions scored, authentication rate {rate_text}")


@cli.command()
@click.argument('output_dir', type=click.Path(file_okay=False))
@click.option('--users', type=click.IntRange(min=2), default=10, show_default=True)
@click.option('--duration', type=click.FloatRange(min=0, min_open=True), default=1200.0, show_default=True)
@click.option('--seed', type=int, default=0, show_default=True)
def synth(output_dir, users, duration, seed):
    """Write one synthetic session log per user."""
    corpus = generate_corpus(users, duration, seed)
    for uid, log in sorted(corpus.items()):
        path = os.path.join(output_dir, f"user_{uid}.txt")
        with atomic_open(path) as fh:
            write_session_log(log, fh)
        click.echo(f"{path}: {len(log)} events")


@cli.command()
@click.option('--config', 'config_file', type=click.Path(dir_okay=False), default=None)
@click.option('--set', 'settings', multiple=True, metavar='KEY=VALUE')
@click.option('--lengths', default='5,10,20,50', show_default=True, help='Comma separated action lengths.')
@click.option('--scenario', type=click.Choice(['A', 'B']), default='B', show_default=True)
@click.option('--output', type=click.Path(dir_okay=False), default=None, help='Also write the table as CSV.')
def sweep(config_file, settings, lengths, scenario, output):
    """Compare action lengths by their average scenario metrics."""
    config = _load_config(config_file, settings)
    try:
        values = [int(part) for part in lengths.split(',') if part.strip()]
    except ValueError:
        raise click.BadParameter(f"lengths must be integers, got {lengths!r}")
    try:
        frame = sweep_sequence_lengths(config, values, scenario)
    except ValueError as e:
        raise click.ClickException(str(e))
    click.echo(frame.to_string(index=False, float_format='{:.4f}'.format))
    if output:
        with atomic_open(output) as fh:
            frame.to_csv(fh, index=False, lineterminator='\n')


if __name__ == '__main__':
    cli()
