"""Shared fixtures: a seven-row label table, solid-colour images and small mosaics."""

from pathlib import Path

import numpy as np
import pytest

from fieldforge.models.corpus import HighFidelityRecord, PlantClass
from fieldforge.models.mosaic import MosaicSpec
from fieldforge.services.corpus import HighFidelitySample, read_label_table
from fieldforge.services.imaging import save_png
from fieldforge.services.textures import procedural_soil

FIXTURES = Path(__file__).parent / "fixtures"

# one colour per class, each channel in a different histogram bin
CLASS_COLOURS = {
    PlantClass.HEALTHY: (40, 200, 40),
    PlantClass.MULTIPLE_DISEASES: (200, 200, 40),
    PlantClass.RUST: (200, 100, 30),
    PlantClass.SCAB: (90, 60, 40),
}


def solid(colour, width=12, height=8):
    image = np.empty((height, width, 3), dtype=np.uint8)
    image[:] = colour
    return image


def sample(image_id, label, pixels=None):
    record = HighFidelityRecord(image_id=image_id, label=label)
    return HighFidelitySample(record=record,
                              preloaded=solid(CLASS_COLOURS[label]) if pixels is None else pixels)


@pytest.fixture
def labels_csv() -> Path:
    return FIXTURES / "labels_small.csv"


@pytest.fixture
def all_classes_csv() -> Path:
    """Eight rows with every class present."""
    return FIXTURES / "labels_all_classes.csv"


@pytest.fixture
def image_root(tmp_path, labels_csv, all_classes_csv) -> Path:
    """Solid-colour PNGs saved under both fixture tables' ``.jpg`` names."""
    root = tmp_path / "images"
    for table in (labels_csv, all_classes_csv):
        for record in read_label_table(table):
            save_png(solid(CLASS_COLOURS[record.label]), root / record.image_id)
    return root


@pytest.fixture
def hf_pool():
    """Two in-memory samples per class."""
    return [sample(f"{c.value}_{k}.png", c) for c in PlantClass for k in range(2)]


@pytest.fixture
def small_spec() -> MosaicSpec:
    return MosaicSpec.from_grid(4, 3, 8, 6, rng_seed=1)


@pytest.fixture
def soil_texture() -> np.ndarray:
    return procedural_soil(48, 64, seed=3)
