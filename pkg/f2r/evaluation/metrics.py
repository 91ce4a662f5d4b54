"""Ranking and text-overlap metrics"""

import json
from collections import Counter
from pathlib import Path
from typing import Callable, Dict, Sequence, Tuple, Union

import numpy as np

from ..data.ranking import RankingExample
from ..data.vocab import split_tokens

Scorer = Callable[[str, Sequence[str]], Sequence[float]]

HITS_KEY = "hits@1/20"


def rank_of_correct(scores: Sequence[float], correct_index: int) -> int:
    """
    0-based rank of the correct candidate; ties go to the lower index.
    Non-finite scores are rejected: NaN compares false with everything and
    would rank first.
    """
    scores = np.asarray(scores, dtype=np.float64)
    if not np.isfinite(scores).all():
        raise ValueError(f"Scorer returned non-finite scores: {scores.tolist()}")
    target = scores[correct_index]
    higher = int(np.sum(scores > target))
    tied_before = int(np.sum(scores[:correct_index] == target))
    return higher + tied_before


def hits_at_k(scorer: Scorer, examples: Sequence[RankingExample], k: int = 1) -> float:
    """Fraction of examples whose correct candidate ranks in the top k"""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if not examples:
        return 0.0
    hits = 0
    for ex in examples:
        if len(ex.candidates) < k:
            raise ValueError(f"Example has {len(ex.candidates)} candidates, fewer than k={k}")
        scores = scorer(ex.context, ex.candidates)
        if len(scores) != len(ex.candidates):
            raise ValueError(f"Scorer returned {len(scores)} scores for {len(ex.candidates)} candidates")
        hits += rank_of_correct(scores, ex.correct_index) < k
    return hits / len(examples)


def hits_report(hits: float, n: int, seed: int) -> Dict[str, Union[float, int]]:
    return {HITS_KEY: hits, "n": n, "seed": seed}


def write_metric_json(path: Union[str, Path], report: Dict) -> str:
    """Canonical JSON (sorted keys) so reruns are byte-identical"""
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    Path(path).write_text(text)
    return text


def token_f1(prediction: str, reference: str) -> float:
    """Bag-of-tokens F1 between two texts after tokenization"""
    pred = split_tokens(prediction)
    ref = split_tokens(reference)
    if not pred and not ref:
        return 1.0
    overlap = sum((Counter(pred) & Counter(ref)).values())
    if overlap == 0:
        return 0.0
    precision = overlap / len(pred)
    recall = overlap / len(ref)
    return 2 * precision * recall / (precision + recall)


def mean_and_variance(values: Sequence[float]) -> Tuple[float, float]:
    """Mean and population variance (ddof=0)"""
    if len(values) == 0:
        raise ValueError("No values to aggregate")
    arr = np.asarray(values, dtype=np.float64)
    return float(arr.mean()), float(arr.var(ddof=0))
