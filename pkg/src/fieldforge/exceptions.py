"""
Error hierarchy for FieldForge

Every error raised on purpose by the library derives from FieldForgeError so
the CLI and the HTTP layer can tell domain failures from programming errors.
Most also derive from the builtin they specialise, so callers catching
ValueError or FileNotFoundError keep working.
"""

from typing import Any, Dict, Optional


class FieldForgeError(Exception):
    """Base class for all FieldForge errors"""


class LabelParseError(FieldForgeError, ValueError):
    """A label table could not be parsed"""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class SchemaViolationError(LabelParseError):
    """A row breaks the one-hot schema (zero or several flags set)"""


class DuplicateImageError(LabelParseError):
    """The same image_id appears twice in one table"""


class InvalidTargetError(FieldForgeError, ValueError):
    """A balance target is below the majority class count"""


class InsufficientSourceError(FieldForgeError, ValueError):
    """A class needs synthetic images but has no source images"""


class GridBoundsError(FieldForgeError, IndexError):
    """A grid cell index lies outside the mosaic grid"""


class NoSourceError(FieldForgeError, ValueError):
    """A mosaic was requested from an empty source pool"""


class TextureError(FieldForgeError, ValueError):
    """A soil texture is smaller than one tile"""


class IncompatibleSpecError(FieldForgeError, ValueError):
    """Two mosaics do not share the same grid geometry"""


class AlignmentError(FieldForgeError, ValueError):
    """A region is not aligned to the tile grid"""


class BoxBoundsError(FieldForgeError, ValueError):
    """A box lies outside the image it is transformed against"""


class MetricInputError(FieldForgeError, ValueError):
    """Predictions and ground truth cannot be compared"""


class EmptyMatrixError(FieldForgeError, ZeroDivisionError):
    """A metric was requested from a confusion matrix with no counts"""


class TrainingError(FieldForgeError, ValueError):
    """A baseline model cannot be fitted from the given samples"""


class ImageNotFoundError(FieldForgeError, FileNotFoundError):
    """An image id does not resolve to a file under the image root"""


class ModelInvocationError(FieldForgeError, RuntimeError):
    """An identifier or classifier failed; context says where"""

    def __init__(self, message: str, context: Optional[Dict[str, Any]] = None):
        self.message = message
        self.context = dict(context or {})
        super().__init__(message)

    def __str__(self) -> str:
        detail = ", ".join(f"{k}={v}" for k, v in self.context.items())
        return f"{self.message} ({detail})" if detail else self.message
