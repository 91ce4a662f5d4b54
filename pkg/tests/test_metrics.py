import json

import numpy as np
import pytest

from f2r.data.ranking import RankingExample
from f2r.evaluation.metrics import (
    HITS_KEY,
    hits_at_k,
    hits_report,
    mean_and_variance,
    rank_of_correct,
    token_f1,
    write_metric_json,
)

N_CANDIDATES = 20


def _examples(n, seed=0):
    rng = np.random.RandomState(seed)
    candidates = tuple(f"candidate {j}" for j in range(N_CANDIDATES))
    return [RankingExample(f"context {i}", candidates, int(rng.randint(N_CANDIDATES))) for i in range(n)]


def _random_scorer(seed):
    rng = np.random.RandomState(seed)
    return lambda context, candidates: rng.rand(len(candidates)).tolist()


def _oracle(examples):
    gold = {ex.context: ex.response for ex in examples}
    return lambda context, candidates: [1.0 if c == gold[context] else 0.0 for c in candidates]


def test_random_scorer_hits_one_in_twenty():
    assert hits_at_k(_random_scorer(1), _examples(10000)) == pytest.approx(0.05, abs=0.01)


def test_oracle_scorer_is_perfect():
    examples = _examples(200)
    assert hits_at_k(_oracle(examples), examples) == 1.0


def test_ties_resolve_to_lower_index():
    assert rank_of_correct([1.0, 1.0, 1.0], 0) == 0
    assert rank_of_correct([1.0, 1.0, 1.0], 2) == 2
    assert rank_of_correct([0.5, 2.0, 0.5], 2) == 2


@pytest.mark.parametrize("bad", [float("nan"), float("inf"), float("-inf")])
def test_non_finite_scores_rejected(bad):
    with pytest.raises(ValueError):
        rank_of_correct([bad, 1.0, 1.0], 0)


def test_nan_gold_score_is_not_a_hit():
    examples = _examples(5)
    gold = {ex.context: ex.response for ex in examples}

    def diverged(context, candidates):
        return [float("nan") if c == gold[context] else 1.0 for c in candidates]

    with pytest.raises(ValueError):
        hits_at_k(diverged, examples)


def test_constant_scorer_hits_only_first_slot():
    examples = [
        RankingExample("a", ("x", "y", "z"), 0),
        RankingExample("b", ("x", "y", "z"), 1),
    ]
    assert hits_at_k(lambda c, cands: [0.0] * len(cands), examples) == 0.5


def test_hits_monotone_in_k():
    examples = _examples(500)
    values = [hits_at_k(_random_scorer(3), examples, k) for k in (1, 5, 10, 20)]
    assert values == sorted(values)
    assert values[-1] == 1.0


def test_invariant_to_increasing_transform():
    examples = _examples(300)
    base = _random_scorer(4)
    raw = [base(ex.context, ex.candidates) for ex in examples]
    lookup = {ex.context: scores for ex, scores in zip(examples, raw)}
    plain = hits_at_k(lambda c, cands: lookup[c], examples)
    shifted = hits_at_k(lambda c, cands: [np.exp(3 * s) - 7 for s in lookup[c]], examples)
    assert plain == shifted


def test_argument_errors():
    examples = _examples(3)
    with pytest.raises(ValueError):
        hits_at_k(_oracle(examples), examples, k=0)
    with pytest.raises(ValueError):
        hits_at_k(_oracle(examples), examples, k=21)
    with pytest.raises(ValueError):
        hits_at_k(lambda c, cands: [0.0], examples)
    assert hits_at_k(_oracle(examples), []) == 0.0


def test_metric_json_is_canonical(tmp_path):
    path = tmp_path / "metrics.json"
    text = write_metric_json(path, hits_report(0.25, 4, 0))
    assert path.read_text() == text
    assert text.endswith("\n")
    assert json.loads(text) == {HITS_KEY: 0.25, "n": 4, "seed": 0}
    assert text == write_metric_json(tmp_path / "again.json", {"seed": 0, "n": 4, HITS_KEY: 0.25})


def test_token_f1():
    assert token_f1("i am 30", "i am 30") == 1.0
    assert token_f1("i am 30", "my dog") == 0.0
    assert token_f1("i am", "i am 30") == pytest.approx(0.8)
    assert token_f1("", "") == 1.0


def test_mean_and_variance():
    assert mean_and_variance([1.0, 3.0]) == (2.0, 1.0)
    with pytest.raises(ValueError):
        mean_and_variance([])
