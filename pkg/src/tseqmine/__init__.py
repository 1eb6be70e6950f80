"""Mining relevant frequent transformation subsequences from labeled graph sequences."""
from .kernels import BACKEND
from .model import (GraphSequence, Kind, LabeledGraph, TransformationRule,
                    TransformationSequence, is_relevant)
from .reverse import MinedPattern, MinerConfig, mine

__version__ = "0.1.0"

__all__ = ["BACKEND", "GraphSequence", "Kind", "LabeledGraph", "MinedPattern",
           "MinerConfig", "TransformationRule", "TransformationSequence",
           "is_relevant", "mine", "__version__"]
