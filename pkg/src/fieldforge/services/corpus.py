"""
High-fidelity corpus ingestion

Parses and writes the one-hot label table, counts classes, and resolves image
ids to pixels. Pixels are loaded lazily: metadata-only workflows never touch
the image root, and a missing file surfaces only when its pixels are read.
"""

import csv
import io
import logging
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..exceptions import (
    DuplicateImageError,
    ImageNotFoundError,
    LabelParseError,
    SchemaViolationError,
)
from ..models.corpus import LABEL_COLUMNS, ClassDistribution, HighFidelityRecord, PlantClass
from .imaging import load_image
from .seeding import seeded_rng

logger = logging.getLogger(__name__)

LABEL_HEADER = ("image_id", *LABEL_COLUMNS)


def parse_label_table(raw: str) -> List[HighFidelityRecord]:
    """
    Parse a one-hot label table

    The header must read exactly ``image_id,healthy,multiple_diseases,rust,scab``.
    LF and CRLF line endings are accepted and blank lines are skipped. Records
    come back in file order.

    Raises:
        LabelParseError: bad header, wrong column count or a flag other than 0/1
        SchemaViolationError: a row with zero or several flags set
        DuplicateImageError: an image_id seen earlier in the table
    """
    text = raw.lstrip("\ufeff")
    reader = csv.reader(io.StringIO(text, newline=""))
    try:
        header = next(reader)
    except StopIteration:
        raise LabelParseError("empty label table", line=1) from None
    if tuple(h.strip() for h in header) != LABEL_HEADER:
        raise LabelParseError(
            f"expected header {','.join(LABEL_HEADER)!r}, got {','.join(header)!r}", line=1)

    records: List[HighFidelityRecord] = []
    seen: set[str] = set()
    classes = PlantClass.ordered()
    for row in reader:
        line = reader.line_num
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(LABEL_HEADER):
            raise LabelParseError(
                f"expected {len(LABEL_HEADER)} columns, got {len(row)}", line=line)
        image_id = row[0].strip()
        if not image_id:
            raise LabelParseError("empty image_id", line=line)
        flags = []
        for name, cell in zip(LABEL_COLUMNS, row[1:]):
            value = cell.strip()
            if value not in ("0", "1"):
                raise LabelParseError(
                    f"{image_id}: flag {name}={value!r} is not 0 or 1", line=line)
            flags.append(value == "1")
        if sum(flags) != 1:
            raise SchemaViolationError(
                f"{image_id}: exactly one class flag must be 1, found {sum(flags)}", line=line)
        if image_id in seen:
            raise DuplicateImageError(f"duplicate image_id {image_id}", line=line)
        seen.add(image_id)
        records.append(HighFidelityRecord(image_id=image_id, label=classes[flags.index(True)]))

    logger.debug("parsed %d label rows", len(records))
    return records


def write_label_table(records: Iterable[HighFidelityRecord]) -> str:
    """Serialize records in the label-table schema (LF line endings)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(LABEL_HEADER)
    for record in records:
        writer.writerow([record.image_id,
                         *(int(record.label is c) for c in PlantClass)])
    return buf.getvalue()


def read_label_table(path: Union[str, Path]) -> List[HighFidelityRecord]:
    return parse_label_table(Path(path).read_text(encoding="utf-8"))


def class_distribution(records: Iterable[HighFidelityRecord]) -> ClassDistribution:
    counts = Counter(r.label for r in records)
    return ClassDistribution(counts={c: counts.get(c, 0) for c in PlantClass})


def binarize(record: HighFidelityRecord) -> int:
    """Sick flag: 0 for healthy, 1 for any disease."""
    return int(record.label.is_sick)


def split_records(records: Sequence[HighFidelityRecord], test_fraction: float,
                  seed: int) -> Tuple[List[HighFidelityRecord], List[HighFidelityRecord]]:
    """Seeded uniform train/test split; both parts keep input order."""
    if not 0 <= test_fraction <= 1:
        raise ValueError("test_fraction must lie in [0, 1]")
    n_test = int(round(len(records) * test_fraction))
    rng = seeded_rng(seed)
    test_idx = set(rng.permutation(len(records))[:n_test].tolist())
    train = [r for i, r in enumerate(records) if i not in test_idx]
    test = [r for i, r in enumerate(records) if i in test_idx]
    return train, test


class ImageStore:
    """Resolves image ids against an image root directory"""

    def __init__(self, root: Union[str, Path]):
        self.root = Path(root)

    def path_for(self, image_id: str) -> Path:
        return self.root / image_id

    def load(self, image_id: str) -> np.ndarray:
        path = self.path_for(image_id)
        if not path.is_file():
            raise ImageNotFoundError(f"image {image_id!r} not found under {self.root}")
        return load_image(path)

    def __repr__(self) -> str:
        return f"ImageStore({str(self.root)!r})"


@dataclass
class HighFidelitySample:
    """
    A record plus its pixels

    Pixels come either in-memory (synthesized images, tests) or from an
    ImageStore on first access.
    """

    record: HighFidelityRecord
    store: Optional[ImageStore] = None
    preloaded: Optional[np.ndarray] = field(default=None, repr=False)

    @cached_property
    def pixels(self) -> np.ndarray:
        if self.preloaded is not None:
            return self.preloaded
        if self.store is None:
            raise ImageNotFoundError(f"no pixels or image store for {self.record.image_id!r}")
        return self.store.load(self.record.image_id)

    @property
    def image_id(self) -> str:
        return self.record.image_id

    @property
    def label(self) -> PlantClass:
        return self.record.label


def attach_store(records: Iterable[HighFidelityRecord],
                 store: ImageStore) -> List[HighFidelitySample]:
    return [HighFidelitySample(record=r, store=store) for r in records]
