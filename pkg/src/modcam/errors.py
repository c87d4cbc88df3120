"""Exception types shared across the package."""


class ModcamError(Exception):
    """Base class for all modcam errors."""


class InvalidImage(ModcamError):
    """Image data violates a precondition (non-finite, negative, too small)."""


class InvalidGain(ModcamError):
    """Exposure gain must be a positive finite number."""


class InvalidParam(ModcamError):
    """A numeric parameter is outside its allowed range."""


class ShapeError(ModcamError):
    """Array shapes are inconsistent."""


class ConfigError(ModcamError):
    """A configuration is incoherent or refers to missing inputs."""


class ParseError(ModcamError):
    """A label or data file could not be parsed."""


class EvalError(ModcamError):
    """Evaluation could not proceed (mismatched ids, missing detections)."""
