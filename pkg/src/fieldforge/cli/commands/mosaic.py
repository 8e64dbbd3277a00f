"""
Mosaic commands for the FieldForge CLI

``generate`` renders annotated field mosaics from the labeled corpus;
``augment`` applies CutMix and cutout to a folder of them.
"""

from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import click

from ...config import settings
from ...models.augment import CutMixConfig
from ...services.augment import CutMixDataset
from ...services.corpus import ImageStore, attach_store, read_label_table
from ...services.imaging import load_image
from ...services.mosaic import generate_mosaic, list_mosaic_pairs, mosaic_seed, read_mosaic, write_mosaic
from ...services.textures import procedural_soil
from ..utils import (
    build_spec,
    grid_options,
    handle_errors,
    images_option,
    images_path,
    labels_option,
    labels_path,
    print_success,
    resolve_seed,
    seed_option,
)


@click.command()
@labels_option
@images_option
@click.option("--count", type=click.IntRange(min=1), default=1, show_default=True,
              help="Number of mosaics to render")
@seed_option
@click.option("--out", type=click.Path(path_type=Path, file_okay=False), required=True,
              help="Directory for train_<k>.png/.csv pairs")
@click.option("--soil", type=click.FloatRange(0, 1), default=None,
              help="Soil probability per cell (default: 1 soil part to 5 leaf parts)")
@click.option("--soil-texture", type=click.Path(path_type=Path, dir_okay=False), default=None,
              help="Soil image to cut patches from (default: procedural texture)")
@click.option("--workers", type=click.IntRange(min=1), default=None,
              help="Mosaics rendered in parallel (default: settings.max_workers)")
@grid_options
@handle_errors
def generate(labels, images, count, seed, out, soil, soil_texture, workers, grid, tile):
    """
    Render annotated low-fidelity field mosaics

    Mosaic ``i`` uses its own stream derived from ``(seed, i)``, so the same
    seed always reproduces the same files.

    Example:
        fieldforge generate --count 4 --seed 7 --out data/mosaics
    """
    seed = resolve_seed(seed)
    pool = attach_store(read_label_table(labels_path(labels)), ImageStore(images_path(images)))
    base = build_spec(grid, tile, soil_probability_override=soil)
    texture = load_image(soil_texture) if soil_texture is not None else None

    def render(i: int) -> None:
        spec = base.model_copy(update={"rng_seed": mosaic_seed(seed, i)})
        soil_pixels = texture if texture is not None else procedural_soil(
            spec.tile_h * 8, spec.tile_w * 8, seed=spec.rng_seed)
        write_mosaic(generate_mosaic(pool, soil_pixels, spec), out, f"train_{i}")

    with ThreadPoolExecutor(max_workers=workers or settings.max_workers) as executor:
        list(executor.map(render, range(count)))
    print_success(f"Generated {count} mosaic(s) in {out}")


@click.command()
@click.option("--in", "in_dir", type=click.Path(path_type=Path, file_okay=False, exists=True),
              required=True, help="Directory of mosaic PNG+CSV pairs")
@click.option("--out", type=click.Path(path_type=Path, file_okay=False), required=True)
@click.option("--probability", type=click.FloatRange(0, 1), default=0.5, show_default=True,
              help="CutMix probability per mosaic")
@click.option("--cutout", "cutout_probability", type=click.FloatRange(0, 1), default=0.0,
              show_default=True, help="Cutout probability per mosaic")
@seed_option
@grid_options
@handle_errors
def augment(in_dir, out, probability, cutout_probability, seed, grid, tile):
    """Apply CutMix (and optionally cutout) to every mosaic in a folder"""
    spec = build_spec(grid, tile)
    pairs = list_mosaic_pairs(in_dir)
    if not pairs:
        raise click.BadParameter(f"no mosaic PNG+CSV pairs in {in_dir}", param_hint="--in")
    items = [read_mosaic(png, csv_path, spec) for png, csv_path in pairs]
    dataset = CutMixDataset(items, CutMixConfig(probability=probability,
                                                cutout_probability=cutout_probability,
                                                rng_seed=resolve_seed(seed)))
    for i, (png, _) in enumerate(pairs):
        write_mosaic(dataset[i], out, png.stem)
    print_success(f"Augmented {len(pairs)} mosaic(s) into {out}")
