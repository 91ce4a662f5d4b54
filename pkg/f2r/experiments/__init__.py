from .settings import (
    ExperimentData,
    ExperimentSpec,
    Setting,
    SettingReport,
    build_setting_corpus,
    run_setting,
    synthetic_experiment_data,
    write_aggregate_csv,
)
from .synthetic import (
    FEEDBACK_TEMPLATES,
    TOPICS,
    FeedbackTemplate,
    SyntheticCorpus,
    SyntheticSpec,
    Topic,
    make_synthetic_corpus,
)

__all__ = [
    "ExperimentData",
    "ExperimentSpec",
    "Setting",
    "SettingReport",
    "build_setting_corpus",
    "run_setting",
    "synthetic_experiment_data",
    "write_aggregate_csv",
    "FEEDBACK_TEMPLATES",
    "TOPICS",
    "FeedbackTemplate",
    "SyntheticCorpus",
    "SyntheticSpec",
    "Topic",
    "make_synthetic_corpus",
]
