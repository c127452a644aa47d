"""Error types shared across the toolkit.

Every error carries a stable ``kind`` string so the CLI and HTTP layers can
report failures in a structured way without matching on messages.
"""


class LumisphereError(Exception):
    """Base class for all toolkit errors."""

    kind = "error"


class InvalidNormalError(LumisphereError):
    kind = "invalid-normal"


class OutsideDiskError(LumisphereError):
    kind = "outside-disk"


class NoEdgesError(LumisphereError):
    kind = "no-edges"


class DegenerateFitError(LumisphereError):
    kind = "degenerate-fit"


class InsufficientPointsError(LumisphereError):
    kind = "insufficient-points"


class DegenerateWeightsError(LumisphereError):
    kind = "degenerate-weights"


class InsufficientSamplesError(LumisphereError):
    kind = "insufficient-samples"


class IllConditionedError(LumisphereError):
    kind = "ill-conditioned"


class DegenerateEnvironmentError(LumisphereError):
    kind = "degenerate-environment"


class InvalidInputError(LumisphereError, ValueError):
    """Also a ValueError so callers outside the toolkit can catch it plainly."""

    kind = "invalid-input"


class InvalidSpecError(LumisphereError):
    kind = "invalid-spec"


class InvalidCropError(LumisphereError):
    kind = "invalid-crop"


class EmptyInputError(LumisphereError):
    kind = "empty-input"


class PackingError(LumisphereError):
    kind = "packing"


class WorkspaceIOError(LumisphereError):
    kind = "io"


class MissingAnnotationError(LumisphereError):
    kind = "missing-annotation"


class BusyError(LumisphereError):
    kind = "busy"
