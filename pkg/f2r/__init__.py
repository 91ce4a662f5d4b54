"""
F2R - turning user feedback into dialogue responses with adversarial style transfer
"""

__version__ = "0.1.0"
__author__ = "F2R Team"

from .converters import (
    BaseConverter,
    F2RConverter,
    HeuristicConverter,
    PassthroughConverter,
    heuristic_convert,
)

__all__ = [
    "BaseConverter",
    "F2RConverter",
    "HeuristicConverter",
    "PassthroughConverter",
    "heuristic_convert",
    "__version__",
]
