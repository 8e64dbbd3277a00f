"""
CLI utility functions for FieldForge
"""

import json
import sys
from functools import wraps
from pathlib import Path
from typing import Any, Dict, List, Optional

import click
from rich.align import Align
from rich.console import Console
from rich.markup import escape
from rich.panel import Panel
from rich.table import Table
from rich.text import Text
from tabulate import tabulate

from ..config import settings
from ..exceptions import FieldForgeError
from ..models.boxes import ScoredBox
from ..models.mosaic import MosaicSpec

console = Console()
err_console = Console(stderr=True)


def handle_errors(func):
    """Decorator to turn domain and I/O failures into exit code 1"""
    @wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except click.ClickException:
            raise
        except KeyboardInterrupt:
            print_warning("\nOperation cancelled by user")
            sys.exit(1)
        except (FieldForgeError, OSError, ValueError) as e:
            print_error(f"Error: {e}")
            if settings.debug:
                raise
            sys.exit(1)
    return wrapper


def print_success(message: str):
    """Print success message"""
    err_console.print(f"[green]{message}[/green]")


def print_error(message: str):
    """Print error message"""
    err_console.print(f"[red]{escape(message)}[/red]")


def print_warning(message: str):
    """Print warning message"""
    err_console.print(f"[yellow]{escape(message)}[/yellow]")


def print_info(message: str):
    """Print info message"""
    err_console.print(f"[blue]{message}[/blue]")


def display_table(data: List[Dict[str, Any]], headers: List[str], title: str = ""):
    """Display data in a rich table"""
    if not data:
        print_info("No data found")
        return

    table = Table(title=title, show_header=True, header_style="bold magenta")
    for i, header in enumerate(headers):
        style = "cyan" if i % 2 == 0 else "green"
        table.add_column(header, style=style)
    for row in data:
        table.add_row(*[str(row.get(header, "")) for header in headers])
    console.print(table)


def display_simple_table(data: List[Dict[str, Any]], headers: List[str]):
    """Display a plain table using tabulate"""
    if not data:
        print_info("No data found")
        return
    rows = [[row.get(header, "") for header in headers] for row in data]
    click.echo(tabulate(rows, headers=headers, tablefmt="github"))


def display_stats_panel(title: str, stats: Dict[str, Any]):
    """Display statistics in a panel"""
    stats_text = Text()
    for key, value in stats.items():
        stats_text.append(f"{key}: ", style="bold cyan")
        stats_text.append(f"{value}\n", style="white")

    panel = Panel(
        Align.center(stats_text),
        title=title,
        border_style="bright_blue",
        padding=(1, 2)
    )
    console.print(panel)


def write_json(payload: Any, out: Optional[Path]):
    """Write JSON to ``out``, or to stdout when no path is given"""
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if out is None:
        click.echo(text, nl=False)
        return
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text, encoding="utf-8")
    print_success(f"Wrote {out}")


def read_json(path: Path) -> Any:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def read_boxes(path: Path) -> List[ScoredBox]:
    """Read a JSON list of ``{"box", "score", "label"}`` objects"""
    payload = read_json(path)
    if not isinstance(payload, list):
        raise ValueError(f"{path}: expected a JSON list of boxes")
    try:
        return [ScoredBox.from_json(b) for b in payload]
    except (KeyError, TypeError) as e:
        raise ValueError(f"{path}: malformed box entry ({e!r})") from e


def parse_pair(value: str, option: str) -> tuple:
    """Parse ``AxB`` into two positive ints"""
    try:
        a, b = (int(v) for v in value.lower().split("x"))
    except ValueError:
        raise click.BadParameter(f"expected WxH, got {value!r}", param_hint=option)
    if a <= 0 or b <= 0:
        raise click.BadParameter(f"both sizes must be positive, got {value!r}", param_hint=option)
    return a, b


def grid_options(func):
    """Add ``--grid`` and ``--tile`` options that build a MosaicSpec geometry"""
    func = click.option("--tile", default="64x43", show_default=True,
                        help="Tile size as WxH pixels")(func)
    func = click.option("--grid", default="28x28", show_default=True,
                        help="Grid size as COLSxROWS")(func)
    return func


def build_spec(grid: str, tile: str, **kwargs) -> MosaicSpec:
    cols, rows = parse_pair(grid, "--grid")
    tile_w, tile_h = parse_pair(tile, "--tile")
    return MosaicSpec.from_grid(cols, rows, tile_w, tile_h, **kwargs)


labels_option = click.option(
    "--labels", "labels", type=click.Path(path_type=Path), default=None,
    help="Label table (default: $FIELDFORGE_DATA_ROOT/train.csv)")
images_option = click.option(
    "--images", type=click.Path(path_type=Path), default=None,
    help="Image folder (default: $FIELDFORGE_DATA_ROOT/images)")
seed_option = click.option(
    "--seed", type=int, default=None, help="Random seed (default: settings.default_seed)")


def labels_path(labels: Optional[Path]) -> Path:
    return labels or settings.labels_path


def images_path(images: Optional[Path]) -> Path:
    return images or settings.images_path


def resolve_seed(seed: Optional[int]) -> int:
    return settings.default_seed if seed is None else seed
