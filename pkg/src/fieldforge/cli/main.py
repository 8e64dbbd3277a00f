"""
Main CLI entry point for FieldForge
"""

import logging
import logging.config

import click
from rich.console import Console
from rich.panel import Panel
from rich.text import Text

from .. import __version__
from ..config import settings
from .commands.corpus import plan, split, stats, synthesize
from .commands.detect import fuse
from .commands.evaluate import evaluate, lr_dump, simulate
from .commands.mosaic import augment, generate
from .commands.service import serve
from .utils import print_info

console = Console()

EXAMPLES = [
    ("Corpus", [
        ("fieldforge stats --labels data/train.csv", "Class counts"),
        ("fieldforge plan --json", "Images each class needs"),
        ("fieldforge synthesize --seed 3 --out data/synthetic", "Balance with novel images"),
        ("fieldforge split --test-fraction 0.2 --out data/split", "Seeded train/test split"),
    ]),
    ("Mosaics", [
        ("fieldforge generate --count 4 --seed 7 --out data/mosaics", "Render field mosaics"),
        ("fieldforge augment --in data/mosaics --out data/mixed", "CutMix a folder"),
    ]),
    ("Evaluation", [
        ("fieldforge fuse --method wbf --iou 0.55 a.json b.json", "Fuse model boxes"),
        ("fieldforge lr-dump --epochs 30", "Learning-rate curve as CSV"),
        ("fieldforge evaluate preds.csv", "Classifier report"),
        ("fieldforge simulate --mosaics data/mosaics", "End-to-end pipeline accuracy"),
    ]),
    ("Service", [
        ("fieldforge serve --port 8000", "Prediction service"),
    ]),
]


@click.group()
@click.version_option(version=__version__, prog_name="fieldforge")
@click.option('--verbose', '-v', is_flag=True, help='Enable verbose output')
@click.option('--quiet', '-q', is_flag=True, help='Suppress non-error output')
@click.pass_context
def cli(ctx, verbose, quiet):
    """
    FieldForge CLI

    Synthetic field imagery, box fusion, augmentation and evaluation for a
    two-step crop-disease pipeline.

    \b
    Examples:
        fieldforge stats --labels data/train.csv
        fieldforge generate --count 1 --seed 7 --out out/
        fieldforge simulate --mosaics out/ --miss-rate 0.245

    \b
    Environment:
        FIELDFORGE_DATA_ROOT: root holding train.csv, images/ and mosaics/
        FIELDFORGE_LOG_LEVEL: logging level
        FIELDFORGE_MAX_WORKERS: worker threads for parallel steps
    """
    ctx.ensure_object(dict)
    ctx.obj['verbose'] = verbose
    ctx.obj['quiet'] = quiet

    logging.config.dictConfig(settings.get_logging_config())
    if verbose:
        logging.getLogger("fieldforge").setLevel(logging.DEBUG)
    elif quiet:
        logging.getLogger("fieldforge").setLevel(logging.ERROR)


@cli.command()
def version():
    """Show version information"""
    print_info("FieldForge CLI")
    console.print(f"Version: {__version__}")
    console.print(f"Environment: {settings.environment}")
    console.print(f"Data root: {settings.data_root}")


@cli.command()
def examples():
    """Show usage examples"""
    text = Text()
    for section, rows in EXAMPLES:
        text.append(f"{section}:\n", style="bold cyan")
        for command, note in rows:
            text.append(f"  {command}", style="green")
            text.append(f"  # {note}\n", style="dim")
        text.append("\n")
    text.append("For detailed help on any command, use:", style="white")
    text.append("\n  fieldforge <command> --help", style="bold yellow")
    console.print(Panel(text, title="Usage Examples", border_style="green"))


cli.add_command(stats)
cli.add_command(plan)
cli.add_command(synthesize)
cli.add_command(split)
cli.add_command(generate)
cli.add_command(augment)
cli.add_command(fuse)
cli.add_command(lr_dump)
cli.add_command(evaluate)
cli.add_command(simulate)
cli.add_command(serve)


if __name__ == "__main__":
    cli()
