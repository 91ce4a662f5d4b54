"""
Ranking examples: a context, 20 candidate responses and the correct index
"""

import json
import logging
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from .corpus import Conversation, CorpusFormatError, assemble_history

logger = logging.getLogger(__name__)

N_CANDIDATES = 20


@dataclass(frozen=True)
class RankingExample:
    context: str
    candidates: Tuple[str, ...]
    correct_index: int

    def __post_init__(self):
        if not 0 <= self.correct_index < len(self.candidates):
            raise ValueError(
                f"correct_index {self.correct_index} outside [0, {len(self.candidates)})"
            )
        correct = self.candidates[self.correct_index]
        if self.candidates.count(correct) != 1:
            raise ValueError(f"Correct candidate must appear exactly once: {correct!r}")

    @property
    def response(self) -> str:
        return self.candidates[self.correct_index]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "context": self.context,
            "candidates": list(self.candidates),
            "correct": self.correct_index,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RankingExample":
        return cls(str(data["context"]), tuple(data["candidates"]), int(data["correct"]))


def build_ranking_examples(
    conversations: Sequence[Conversation],
    n_candidates: int = N_CANDIDATES,
    seed: int = 0,
    n_turns: int = 2,
) -> List[RankingExample]:
    """
    Gold response plus distractors drawn from other conversations' responses;
    the gold position is uniform over the candidate slots
    """
    if n_candidates < 1:
        raise ValueError(f"n_candidates must be >= 1, got {n_candidates}")
    pool = sorted({c.final_response for c in conversations})
    if len(pool) < n_candidates:
        raise ValueError(
            f"Need at least {n_candidates} distinct responses for distractors, got {len(pool)}"
        )

    rng = random.Random(seed)
    examples = []
    for conv in conversations:
        gold = conv.final_response
        distractors: List[str] = []
        while len(distractors) < n_candidates - 1:
            pick = pool[rng.randrange(len(pool))]
            if pick != gold and pick not in distractors:
                distractors.append(pick)
        index = rng.randrange(n_candidates)
        candidates = distractors[:index] + [gold] + distractors[index:]
        examples.append(RankingExample(assemble_history(conv, n_turns), tuple(candidates), index))
    return examples


def write_ranking_examples(path: Union[str, Path], examples: Sequence[RankingExample]) -> None:
    with Path(path).open("w", encoding="utf-8") as f:
        for ex in examples:
            f.write(json.dumps(ex.to_dict(), ensure_ascii=False) + "\n")


def read_ranking_examples(
    path: Union[str, Path], n_candidates: Optional[int] = N_CANDIDATES
) -> List[RankingExample]:
    """
    Every example must carry exactly n_candidates candidates; None accepts
    any size
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Ranking file not found: {path}")
    examples = []
    with path.open(encoding="utf-8") as f:
        for line_number, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                example = RankingExample.from_dict(json.loads(line))
                if n_candidates is not None and len(example.candidates) != n_candidates:
                    raise ValueError(
                        f"expected {n_candidates} candidates, got {len(example.candidates)}"
                    )
                examples.append(example)
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
                raise CorpusFormatError(f"bad ranking example: {e}", path, line_number) from e
    logger.info(f"Loaded {len(examples)} ranking examples from {path}")
    return examples
