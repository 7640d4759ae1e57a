"""
Errors - Structured Failure Taxonomy 🚨

Every failure raised by neuron_resync carries a short machine-readable
category so the CLI can emit ``error: <category>: <detail>`` lines.
"""


class NwrsError(Exception):
    """Base class for all neuron_resync failures."""

    category = "internal"

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail

    def line(self) -> str:
        """Render the single-line CLI form of this error."""
        return f"error: {self.category}: {self.detail}"


class ShapeError(NwrsError, ValueError):
    """Tensor or layer dimensions do not agree."""

    category = "shape"


class PermutationError(NwrsError, ValueError):
    """A permutation map is not a bijection or has the wrong size."""

    category = "permutation"


class ValidationError(NwrsError, ValueError):
    """A parameter or file field is outside its allowed range."""

    category = "validation"


class DomainError(NwrsError, ValueError):
    """A closed-form expression is evaluated outside its domain."""

    category = "domain"


class TrainingDivergedError(NwrsError):
    """Training produced a non-finite loss."""

    category = "training"


class ArchitectureMismatchError(NwrsError):
    """Two bundles that must share an architecture do not."""

    category = "architecture"


class ContainerFormatError(NwrsError):
    """A container file has the wrong magic or an unsupported version."""

    category = "format"


class ContainerCorruptionError(NwrsError):
    """A container manifest disagrees with its payload."""

    category = "corruption"


class WatermarkError(NwrsError):
    """Watermark record does not fit the model it is applied to."""

    category = "watermark"


class UsageError(NwrsError):
    """Command-line arguments could not be parsed."""

    category = "usage"
