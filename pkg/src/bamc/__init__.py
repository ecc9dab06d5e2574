"""Salient object detection via bidirectional absorbing Markov chains."""

from .errors import (
    BamcError,
    ChainNotAbsorbingError,
    ConfigError,
    DegeneratePriorError,
    ImageDecodeError,
    InvalidInputError,
    OptimizerError,
)
from .pipeline import PipelineConfig, detect, run

__version__ = "0.1.0"

__all__ = [
    "BamcError",
    "ChainNotAbsorbingError",
    "ConfigError",
    "DegeneratePriorError",
    "ImageDecodeError",
    "InvalidInputError",
    "OptimizerError",
    "PipelineConfig",
    "detect",
    "run",
]
