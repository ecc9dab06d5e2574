"""Exception hierarchy shared across the package."""


class BamcError(Exception):
    """Base class for all errors raised by bamc."""


class InvalidInputError(BamcError, ValueError):
    """An argument violates an operation's precondition."""


class ImageDecodeError(BamcError):
    """An image file could not be read or decoded."""


class ConfigError(BamcError, ValueError):
    """A pipeline configuration is malformed or out of range."""


class ChainNotAbsorbingError(BamcError):
    """Some transient state cannot reach an absorbing state."""


class DegeneratePriorError(BamcError):
    """The foreground prior is constant, so no prior nodes can be selected."""


class OptimizerError(BamcError):
    """The saliency fusion system is singular or failed to solve."""


class NoMatchesError(BamcError):
    """No saliency map could be paired with a ground-truth mask."""


class InvalidSpecError(InvalidInputError):
    """A synthetic corpus specification cannot be realized."""
