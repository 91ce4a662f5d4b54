import math
from typing import Dict


class TrainingDivergedError(RuntimeError):
    """A training loss became non-finite; carries the step and loss values"""

    def __init__(self, step: int, losses: Dict[str, float]):
        detail = ", ".join(f"{k}={v}" for k, v in losses.items())
        super().__init__(f"Training diverged at step {step}: {detail}")
        self.step = step
        self.losses = dict(losses)


def check_finite(step: int, **losses: float) -> None:
    if not all(math.isfinite(v) for v in losses.values()):
        raise TrainingDivergedError(step, losses)
