from .metrics import (
    HITS_KEY,
    hits_at_k,
    hits_report,
    mean_and_variance,
    rank_of_correct,
    token_f1,
    write_metric_json,
)

__all__ = [
    "HITS_KEY",
    "hits_at_k",
    "hits_report",
    "mean_and_variance",
    "rank_of_correct",
    "token_f1",
    "write_metric_json",
]
