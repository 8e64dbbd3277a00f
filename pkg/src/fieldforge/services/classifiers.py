"""
Classifier models

A classifier maps a high-fidelity image to a probability vector over the four
classes in ``PlantClass`` order. Two implementations ship in-repo:

- ``OracleClassifier`` looks the true label up and corrupts it at a fixed rate
- ``CentroidClassifier`` is a nearest-centroid model on colour histograms

Random draws are keyed rather than streamed: the draw for a call depends only
on the seed and the call key, so results do not depend on call order or on
how many threads share the model.
"""

import logging
import zlib
from typing import Dict, Mapping, Optional, Protocol, Sequence, Tuple, runtime_checkable

import numpy as np

from ..exceptions import ModelInvocationError, TrainingError
from ..models.corpus import PlantClass
from .corpus import HighFidelitySample
from .seeding import seed_sequence

logger = logging.getLogger(__name__)

DrawKey = Tuple[int, ...]

CLASSIFIER_STREAM = 0xC1A5
IDENTIFIER_STREAM = 0x1DE7


@runtime_checkable
class ClassifierModel(Protocol):
    """
    Contract for classifiers

    ``key`` identifies the call site (for the pipeline: mosaic index, row and
    column); deterministic models ignore it. ``needs_pixels = False`` lets
    callers skip image loading for models that never look at pixels.
    """

    thread_safe: bool
    needs_pixels: bool

    def classify(self, pixels: Optional[np.ndarray], image_id: Optional[str] = None,
                 key: DrawKey = ()) -> np.ndarray: ...


def keyed_uniforms(seed: int, stream: int, key: Sequence[int], n: int = 2) -> np.ndarray:
    """``n`` uniforms in [0, 1) determined by ``(seed, stream, key)`` alone."""
    words = seed_sequence(seed, stream, *key).generate_state(n, dtype=np.uint64)
    return (words >> np.uint64(11)).astype(np.float64) * 2.0 ** -53


def id_key(image_id: str) -> DrawKey:
    return (zlib.crc32(image_id.encode("utf-8")),)


def one_hot(label: PlantClass) -> np.ndarray:
    probs = np.zeros(len(PlantClass), dtype=np.float64)
    probs[label.index] = 1.0
    return probs


def softmax(logits: np.ndarray) -> np.ndarray:
    shifted = np.exp(logits - logits.max())
    return shifted / shifted.sum()


def color_histogram(pixels: np.ndarray, bins: int = 8) -> np.ndarray:
    """Per-channel normalised histogram, concatenated into a ``3 * bins`` vector."""
    flat = np.asarray(pixels, dtype=np.uint8).reshape(-1, 3).astype(np.int64)
    hist = np.concatenate([
        np.bincount(flat[:, c] * bins // 256, minlength=bins) for c in range(3)
    ]).astype(np.float64)
    return hist / max(len(flat), 1)


class OracleClassifier:
    """
    Ground-truth-backed classifier

    Returns the one-hot true label with probability ``1 - error_rate`` and
    otherwise a one-hot over one of the three wrong classes, chosen uniformly.
    Calls with an empty key are keyed by the image id.
    """

    thread_safe = True
    needs_pixels = False

    def __init__(self, truth: Mapping[str, PlantClass], error_rate: float, rng_seed: int = 0,
                 stream: int = CLASSIFIER_STREAM):
        if not 0 <= error_rate <= 1:
            raise ValueError(f"error_rate must lie in [0, 1], got {error_rate}")
        self.truth = dict(truth)
        self.error_rate = error_rate
        self.rng_seed = rng_seed
        self.stream = stream

    def classify(self, pixels: Optional[np.ndarray], image_id: Optional[str] = None,
                 key: DrawKey = ()) -> np.ndarray:
        if image_id is None or image_id not in self.truth:
            raise ModelInvocationError("oracle classifier has no ground truth for this image",
                                       {"image_id": image_id})
        label = self.truth[image_id]
        u_err, u_pick = keyed_uniforms(self.rng_seed, self.stream, key or id_key(image_id))
        if u_err >= self.error_rate:
            return one_hot(label)
        wrong = [c for c in PlantClass if c is not label]
        return one_hot(wrong[min(int(u_pick * len(wrong)), len(wrong) - 1)])


def oracle_classifier(error_rate: float, rng_seed: int,
                      truth: Mapping[str, PlantClass]) -> OracleClassifier:
    return OracleClassifier(truth, error_rate, rng_seed)


def truth_from_samples(samples: Sequence[HighFidelitySample]) -> Dict[str, PlantClass]:
    return {s.image_id: s.label for s in samples}


class CentroidClassifier:
    """
    Nearest-centroid classifier on colour histograms

    Probabilities are a softmax over negative feature distances scaled by
    ``1 / temperature``; the arg-max is always the nearest centroid.
    """

    thread_safe = True
    needs_pixels = True

    def __init__(self, centroids: np.ndarray, bins: int = 8, temperature: float = 0.05):
        self.centroids = centroids
        self.bins = bins
        self.temperature = temperature

    def classify(self, pixels: Optional[np.ndarray], image_id: Optional[str] = None,
                 key: DrawKey = ()) -> np.ndarray:
        if pixels is None:
            raise ModelInvocationError("centroid classifier needs pixels", {"image_id": image_id})
        feature = color_histogram(pixels, self.bins)
        distances = np.linalg.norm(self.centroids - feature, axis=1)
        return softmax(-distances / self.temperature)


def baseline_classifier(training: Sequence[HighFidelitySample], bins: int = 8,
                        temperature: float = 0.05) -> CentroidClassifier:
    """
    Fit a nearest-centroid classifier

    Raises:
        TrainingError: some class has no training image
    """
    features: Dict[PlantClass, list] = {c: [] for c in PlantClass}
    for sample in training:
        features[sample.label].append(color_histogram(sample.pixels, bins))
    missing = [c.value for c, f in features.items() if not f]
    if missing:
        raise TrainingError(f"no training images for {', '.join(missing)}")
    centroids = np.stack([np.mean(features[c], axis=0) for c in PlantClass.ordered()])
    logger.info("baseline classifier fitted on %d images", len(training))
    return CentroidClassifier(centroids, bins=bins, temperature=temperature)
