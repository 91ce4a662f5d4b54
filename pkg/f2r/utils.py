import logging
import platform
from typing import Dict, Optional

import numpy as np
import torch
from transformers import set_seed

logger = logging.getLogger(__name__)


def seed_everything(seed: int) -> None:
    """Seed python, numpy and torch (CPU and CUDA)"""
    logger.debug(f"Seeding every random source with {seed}")
    set_seed(seed)


def resolve_device(name: Optional[str] = None) -> torch.device:
    if name:
        return torch.device(name)
    return torch.device("cuda" if torch.cuda.is_available() else "cpu")


def package_versions() -> Dict[str, str]:
    from . import __version__

    return {
        "python": platform.python_version(),
        "torch": torch.__version__,
        "numpy": np.__version__,
        "f2r": __version__,
    }
