from .base_converter import BaseConverter
from .f2r_converter import F2RConverter
from .heuristic_converter import HeuristicConverter, heuristic_convert
from .passthrough_converter import PassthroughConverter

__all__ = [
    "BaseConverter",
    "F2RConverter",
    "HeuristicConverter",
    "PassthroughConverter",
    "heuristic_convert",
]
