"""
Corpus commands for the FieldForge CLI

- ``stats``: class counts of a label table
- ``plan``: per-class quotas to balance the corpus
- ``synthesize``: fill those quotas with novel images
- ``split``: seeded train/test split of a label table
"""

from pathlib import Path

import click

from ...config import settings
from ...models.rebalance import GeneratorConfig
from ...services.corpus import (
    ImageStore,
    attach_store,
    class_distribution,
    read_label_table,
    split_records,
    write_label_table,
)
from ...services.rebalance import (
    DirectoryGenerator,
    balance_plan,
    builtin_generator,
    synthesize as synthesize_images,
    write_samples,
)
from ..utils import (
    display_simple_table,
    display_stats_panel,
    display_table,
    handle_errors,
    images_option,
    images_path,
    labels_option,
    labels_path,
    print_success,
    resolve_seed,
    seed_option,
    write_json,
)


@click.command()
@labels_option
@click.option("--json", "as_json", is_flag=True, help="Emit the counts as JSON")
@click.option("--plain", is_flag=True, help="Plain GitHub-style table instead of a rich one")
@handle_errors
def stats(labels, as_json, plain):
    """
    Show the class distribution of a label table

    Example:
        fieldforge stats --labels data/train.csv
    """
    dist = class_distribution(read_label_table(labels_path(labels)))
    counts = dist.as_dict()
    if as_json:
        write_json({"counts": counts, "total": dist.total}, None)
        return
    rows = [{"class": name, "count": n} for name, n in counts.items()]
    rows.append({"class": "total", "count": dist.total})
    if plain:
        display_simple_table(rows, ["class", "count"])
    else:
        display_table(rows, ["class", "count"], title="Class distribution")


@click.command()
@labels_option
@click.option("--target", type=int, default=None,
              help="Images per class after balancing (default: majority count)")
@click.option("--json", "as_json", is_flag=True, help="Emit the quota as JSON")
@handle_errors
def plan(labels, target, as_json):
    """Show how many images each class needs to reach the target"""
    dist = class_distribution(read_label_table(labels_path(labels)))
    quota = balance_plan(dist, target)
    if as_json:
        write_json({"quota": quota.as_dict(), "total": quota.total}, None)
        return
    display_stats_panel("Balance plan", {**quota.as_dict(), "total": quota.total})


@click.command()
@labels_option
@images_option
@click.option("--target", type=int, default=None, help="Images per class after balancing")
@seed_option
@click.option("--out", type=click.Path(path_type=Path), required=True,
              help="Directory for novel PNGs and their label table")
@click.option("--flip/--no-flip", default=True, show_default=True, help="Random horizontal flips")
@click.option("--rotate", multiple=True, type=click.Choice(["0", "90", "180", "270"]),
              help="Allowed rotations in degrees (repeatable; default 0 and 180)")
@click.option("--jitter", type=float, default=0.1, show_default=True,
              help="Brightness jitter amplitude")
@click.option("--generator-dir", type=click.Path(path_type=Path, file_okay=False), default=None,
              help="Serve pre-generated images from <dir>/<class>/*.png instead")
@click.option("--workers", type=int, default=None, help="Per-class worker threads")
@handle_errors
def synthesize(labels, images, target, seed, out, flip, rotate, jitter, generator_dir, workers):
    """
    Balance the corpus with novel images

    Example:
        fieldforge synthesize --seed 3 --out data/synthetic
    """
    records = read_label_table(labels_path(labels))
    pool = attach_store(records, ImageStore(images_path(images)))
    quota = balance_plan(class_distribution(records), target)
    if generator_dir is not None:
        gen = DirectoryGenerator(generator_dir)
    else:
        degrees = frozenset(int(r) for r in rotate) or frozenset({0, 180})
        gen = builtin_generator(GeneratorConfig(flip=flip, rotate_degrees=degrees,
                                                brightness_jitter=jitter))
    novel = synthesize_images(pool, quota, gen, resolve_seed(seed),
                              max_workers=workers or settings.max_workers)
    table = write_samples(novel, out)
    print_success(f"Synthesized {len(novel)} images ({table})")


@click.command()
@labels_option
@click.option("--test-fraction", type=click.FloatRange(0, 1), default=0.2, show_default=True)
@seed_option
@click.option("--out", type=click.Path(path_type=Path, file_okay=False), required=True,
              help="Directory for train.csv and test.csv")
@handle_errors
def split(labels, test_fraction, seed, out):
    """Write a seeded train/test split of a label table"""
    records = read_label_table(labels_path(labels))
    train, test = split_records(records, test_fraction, resolve_seed(seed))
    out.mkdir(parents=True, exist_ok=True)
    for name, part in (("train.csv", train), ("test.csv", test)):
        (out / name).write_text(write_label_table(part), encoding="utf-8", newline="")
    print_success(f"Split {len(records)} records: {len(train)} train, {len(test)} test")
