"""
Class rebalancing of the high-fidelity corpus

Plans per-class quotas and fills them with novel images from a pluggable
generator. Two generators ship in-repo: a classical flip/rotate/brightness
generator, and a directory adapter that serves images produced elsewhere
(for instance by per-class GANs) from ``<root>/<class>/<name>.png``.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Dict, List, Optional, Protocol, Sequence, Union, runtime_checkable

import numpy as np

from ..exceptions import DuplicateImageError, InsufficientSourceError, InvalidTargetError
from ..models.corpus import ClassDistribution, HighFidelityRecord, PlantClass
from ..models.rebalance import BalanceQuota, GeneratorConfig
from .corpus import HighFidelitySample, write_label_table
from .imaging import load_image, resize, save_png
from .seeding import seeded_rng

logger = logging.getLogger(__name__)


@runtime_checkable
class SyntheticImageGenerator(Protocol):
    """
    Produces a novel image of the same class and size as a seed image

    Implementations must be deterministic in ``(seed_image, rng_seed)``.
    """

    def generate(self, seed_image: np.ndarray, label: PlantClass,
                 rng_seed: int) -> np.ndarray: ...


class BuiltinGenerator:
    """Classical augmentation: one random flip/rotation/brightness combo per call"""

    def __init__(self, config: GeneratorConfig):
        self.config = config
        self.rotations = sorted(config.rotate_degrees)
        if config.is_identity:
            logger.warning("generator config has no transforms; novel images will copy their seeds")

    def generate(self, seed_image: np.ndarray, label: PlantClass,
                 rng_seed: int) -> np.ndarray:
        rng = seeded_rng(rng_seed)
        # all three draws happen every call so the stream layout never shifts
        do_flip = rng.random() < 0.5
        degrees = self.rotations[int(rng.integers(len(self.rotations)))]
        factor = 1.0 + rng.uniform(-1.0, 1.0) * self.config.brightness_jitter

        height, width = seed_image.shape[:2]
        out = seed_image
        if self.config.flip and do_flip:
            out = out[:, ::-1]
        if degrees:
            out = np.rot90(out, k=degrees // 90)
            if out.shape[:2] != (height, width):
                out = resize(out, width, height)
        if self.config.brightness_jitter:
            out = np.clip(np.rint(out.astype(np.float64) * factor), 0, 255)
        return np.array(out, dtype=np.uint8)


def builtin_generator(config: Optional[GeneratorConfig] = None, **kwargs) -> BuiltinGenerator:
    return BuiltinGenerator(config or GeneratorConfig(**kwargs))


class DirectoryGenerator:
    """Serves pre-generated images from ``<root>/<class>/*.png``"""

    def __init__(self, root: Union[str, Path]):
        self.root = Path(root)
        self._files: Dict[PlantClass, List[Path]] = {
            c: sorted((self.root / c.value).glob("*.png")) for c in PlantClass
        }
        logger.info("directory generator at %s: %s", self.root,
                    {c.value: len(f) for c, f in self._files.items()})

    def available(self, label: PlantClass) -> int:
        return len(self._files[label])

    def generate(self, seed_image: np.ndarray, label: PlantClass,
                 rng_seed: int) -> np.ndarray:
        files = self._files[label]
        if not files:
            raise InsufficientSourceError(f"no pre-generated images for {label.value} in {self.root}")
        rng = seeded_rng(rng_seed)
        picked = files[int(rng.integers(len(files)))]
        height, width = seed_image.shape[:2]
        return resize(load_image(picked), width, height)


def balance_plan(dist: ClassDistribution, target: Optional[int] = None) -> BalanceQuota:
    """
    Images to synthesize per class so every class reaches ``target``

    The target defaults to the majority class count.

    Raises:
        InvalidTargetError: target below the majority count
    """
    majority = dist.majority
    if target is None:
        target = majority
    if target < majority:
        raise InvalidTargetError(f"target {target} is below the majority class count {majority}")
    return BalanceQuota(per_class={c: target - n for c, n in dist.counts.items()})


def novel_image_id(label: PlantClass, k: int) -> str:
    return f"synth_{label.value}_{k}.png"


def _synthesize_class(label: PlantClass, sources: Sequence[HighFidelitySample], count: int,
                      gen: SyntheticImageGenerator, rng_seed: int) -> List[HighFidelitySample]:
    out = []
    for k in range(count):
        rng = seeded_rng(rng_seed, label.index, k)
        seed_sample = sources[int(rng.integers(len(sources)))]
        pixels = gen.generate(seed_sample.pixels, label, int(rng.integers(2**63 - 1)))
        if pixels.shape != seed_sample.pixels.shape:
            raise ValueError(
                f"generator changed image shape {seed_sample.pixels.shape} -> {pixels.shape}")
        record = HighFidelityRecord(image_id=novel_image_id(label, k), label=label)
        out.append(HighFidelitySample(record=record, preloaded=pixels))
    logger.debug("synthesized %d %s images", count, label.value)
    return out


def synthesize(pool: Sequence[HighFidelitySample], quota: BalanceQuota,
               gen: SyntheticImageGenerator, rng_seed: int,
               max_workers: int = 1) -> List[HighFidelitySample]:
    """
    Fill a quota with novel images

    Image ``k`` of class ``c`` draws from its own stream seeded by
    ``(rng_seed, c, k)``, so per-class parallelism cannot change the output.
    Results come back grouped by class in label order.

    Raises:
        InsufficientSourceError: a class with positive quota has no pool record
        DuplicateImageError: a novel id collides with an original id
    """
    by_class: Dict[PlantClass, List[HighFidelitySample]] = {c: [] for c in PlantClass}
    for sample in pool:
        by_class[sample.label].append(sample)
    for c in PlantClass:
        if quota[c] > 0 and not by_class[c]:
            raise InsufficientSourceError(
                f"class {c.value} needs {quota[c]} novel images but has no source images")

    original_ids = {s.image_id for s in pool}
    for c in PlantClass:
        for k in range(quota[c]):
            if novel_image_id(c, k) in original_ids:
                raise DuplicateImageError(f"novel id {novel_image_id(c, k)} already in the pool")

    todo = [c for c in PlantClass if quota[c] > 0]
    if max_workers > 1 and len(todo) > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as executor:
            futures = {c: executor.submit(_synthesize_class, c, by_class[c], quota[c], gen, rng_seed)
                       for c in todo}
            results = {c: f.result() for c, f in futures.items()}
    else:
        results = {c: _synthesize_class(c, by_class[c], quota[c], gen, rng_seed) for c in todo}

    novel = [s for c in todo for s in results[c]]
    logger.info("synthesized %d novel images %s", len(novel), quota.as_dict())
    return novel


def write_samples(samples: Sequence[HighFidelitySample], out_dir: Union[str, Path],
                  labels_name: str = "labels.csv") -> Path:
    """Write sample PNGs plus a label table in the corpus schema; returns the table path."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for sample in samples:
        save_png(sample.pixels, out_dir / sample.image_id)
    table = out_dir / labels_name
    table.write_text(write_label_table(s.record for s in samples), encoding="utf-8", newline="")
    logger.info("wrote %d samples and %s", len(samples), table)
    return table
