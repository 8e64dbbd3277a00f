"""
Model bindings for the prediction service

Models are loaded once at startup and are read-only afterwards, so request
handlers can share them across threads. A model that fails to load is
recorded with the reason and reported as not ready; the service still starts.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from ..config import Settings
from ..schemas.predict import Algorithm, ModelStatus
from ..services.classifiers import ClassifierModel, baseline_classifier
from ..services.corpus import ImageStore, attach_store, read_label_table
from ..services.identifiers import IdentifierModel, train_tile_identifier
from ..services.mosaic import list_mosaic_pairs, read_mosaic

logger = logging.getLogger(__name__)


@dataclass
class ModelRegistry:
    """Identifier and classifier bound to the service, plus load failures"""

    classifier: Optional[ClassifierModel] = None
    identifier: Optional[IdentifierModel] = None
    errors: Dict[str, str] = field(default_factory=dict)

    def model_for(self, algorithm: Algorithm):
        return self.identifier if algorithm is Algorithm.IDENTIFIER else self.classifier

    def available(self) -> List[str]:
        return [a.value for a in Algorithm if self.model_for(a) is not None]

    def status(self) -> Dict[str, ModelStatus]:
        return {
            a.value: ModelStatus(ready=self.model_for(a) is not None,
                                 detail=self.errors.get(a.value))
            for a in Algorithm
        }

    @classmethod
    def load(cls, settings: Settings) -> "ModelRegistry":
        """
        Fit the baseline models from the configured data root

        The classifier trains on the label table and image folder; the
        identifier trains on the annotated mosaics folder.
        """
        registry = cls()
        try:
            records = read_label_table(settings.labels_path)
            samples = attach_store(records, ImageStore(settings.images_path))
            registry.classifier = baseline_classifier(samples)
        except Exception as e:
            logger.warning(f"Classifier not loaded: {e}")
            registry.errors[Algorithm.CLASSIFIER.value] = str(e)

        try:
            pairs = list_mosaic_pairs(settings.mosaics_path)
            if not pairs:
                raise FileNotFoundError(f"no mosaic PNG+CSV pairs in {settings.mosaics_path}")
            registry.identifier = train_tile_identifier([read_mosaic(p, c) for p, c in pairs])
        except Exception as e:
            logger.warning(f"Identifier not loaded: {e}")
            registry.errors[Algorithm.IDENTIFIER.value] = str(e)

        logger.info("Models ready: %s", registry.available() or "none")
        return registry
