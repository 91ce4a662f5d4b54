"""
The four ranker training settings and multi-seed reporting

NOFEEDBACK: dialogue only
FEEDBACK: dialogue + raw feedback as gold responses
HEURISTIC: dialogue + regex-converted feedback
FEED2RESP: dialogue + generator-converted feedback
"""

import csv
import json
import logging
from dataclasses import asdict, dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from ..converters.base_converter import BaseConverter
from ..converters.heuristic_converter import HeuristicConverter
from ..converters.passthrough_converter import PassthroughConverter
from ..data.corpus import Conversation, assemble_history
from ..data.ranking import RankingExample, build_ranking_examples
from ..data.vocab import Vocab
from ..evaluation.metrics import hits_at_k, mean_and_variance
from ..models.ranker import Ranker, RankerConfig, RankerScorer
from ..training.ranker_training import RankerTrainConfig, train_ranker
from ..utils import seed_everything
from .synthetic import SyntheticCorpus

logger = logging.getLogger(__name__)


class Setting(str, Enum):
    NOFEEDBACK = "nofeedback"
    FEEDBACK = "feedback"
    HEURISTIC = "heuristic"
    FEED2RESP = "feed2resp"


@dataclass
class ExperimentSpec:
    """
    One setting trained with every seed; `ranker` holds RankerConfig fields
    other than vocab_size
    """

    setting: Setting
    seeds: Tuple[int, ...] = (0, 1, 2)
    ranker: Dict[str, Any] = field(default_factory=dict)
    ranker_training: RankerTrainConfig = field(default_factory=RankerTrainConfig)
    n_turns: int = 2
    converter_checkpoint: Optional[str] = None

    def __post_init__(self):
        self.setting = Setting(self.setting)
        self.seeds = tuple(int(s) for s in self.seeds)
        if not self.seeds:
            raise ValueError("ExperimentSpec needs at least one seed")

    def ranker_config(self, vocab_size: int) -> RankerConfig:
        return RankerConfig(vocab_size=vocab_size, **self.ranker)


@dataclass
class ExperimentData:
    dialogue: List[Conversation]
    feedback: List[Conversation]
    valid: List[RankingExample]
    test: List[RankingExample]


@dataclass
class SettingReport:
    setting: str
    architecture: str
    seeds: List[int]
    dev: List[float]
    test: List[float]
    n_train: int
    n_dev: int
    n_test: int

    def summary(self) -> Dict[str, Dict[str, float]]:
        result = {}
        for split, values in (("dev", self.dev), ("test", self.test)):
            mean, variance = mean_and_variance(values)
            result[split] = {"mean": mean, "variance": variance}
        return result

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["summary"] = self.summary()
        return data

    def save(self, path: Union[str, Path]) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")

    @classmethod
    def load(cls, path: Union[str, Path]) -> "SettingReport":
        data = json.loads(Path(path).read_text())
        names = cls.__dataclass_fields__.keys()
        return cls(**{k: v for k, v in data.items() if k in names})


def converter_for(setting: Setting, converter: Optional[BaseConverter] = None) -> Optional[BaseConverter]:
    """The feedback converter a setting uses; FEED2RESP needs one supplied"""
    setting = Setting(setting)
    if setting == Setting.NOFEEDBACK:
        return None
    if setting == Setting.FEEDBACK:
        return PassthroughConverter()
    if setting == Setting.HEURISTIC:
        return HeuristicConverter()
    if converter is None:
        raise ValueError("FEED2RESP setting needs a trained converter")
    return converter


def build_setting_corpus(
    setting: Setting,
    dialogue: Sequence[Conversation],
    feedback: Sequence[Conversation],
    converter: Optional[BaseConverter] = None,
    n_turns: int = 2,
) -> List[Conversation]:
    """Training conversations of a setting: dialogue plus converted feedback"""
    active = converter_for(setting, converter)
    corpus = list(dialogue)
    if active is not None:
        corpus.extend(active.convert_conversations(feedback, n_turns))
    return corpus


def to_training_examples(conversations: Sequence[Conversation], n_turns: int = 2) -> List[RankingExample]:
    """Single-candidate examples for in-batch negative training"""
    return [
        RankingExample(assemble_history(conv, n_turns), (conv.final_response,), 0)
        for conv in conversations
    ]


def build_vocab(conversations: Sequence[Conversation], n_turns: int = 2) -> Vocab:
    texts: List[str] = []
    for conv in conversations:
        texts.append(assemble_history(conv, n_turns))
        texts.append(conv.final_response)
    return Vocab.build(texts)


def run_setting(
    spec: ExperimentSpec,
    data: ExperimentData,
    converter: Optional[BaseConverter] = None,
    progress: bool = False,
) -> SettingReport:
    """Train one ranker per seed on the setting's corpus; HITS@1/20 on dev and test"""
    corpus = build_setting_corpus(spec.setting, data.dialogue, data.feedback, converter, spec.n_turns)
    vocab = build_vocab(corpus, spec.n_turns)
    examples = to_training_examples(corpus, spec.n_turns)
    train_cfg = spec.ranker_training

    logger.info(f"=== Setting {spec.setting.value}: {len(examples)} training examples ===")
    dev, test = [], []
    architecture = ""
    for seed in spec.seeds:
        seed_everything(seed)
        config = spec.ranker_config(len(vocab))
        architecture = config.architecture
        model = Ranker(config)
        train_ranker(model, examples, vocab, replace(train_cfg, seed=seed), progress=progress)

        scorer = RankerScorer(model, vocab, train_cfg.max_context_len, train_cfg.max_candidate_len)
        dev.append(hits_at_k(scorer, data.valid, 1))
        test.append(hits_at_k(scorer, data.test, 1))
        logger.info(f"{spec.setting.value} seed {seed}: dev={dev[-1]:.4f} test={test[-1]:.4f}")

    return SettingReport(
        setting=spec.setting.value,
        architecture=architecture,
        seeds=list(spec.seeds),
        dev=dev,
        test=test,
        n_train=len(examples),
        n_dev=len(data.valid),
        n_test=len(data.test),
    )


def write_aggregate_csv(reports: Sequence[SettingReport], path: Union[str, Path]) -> None:
    """Rows of setting, split, mean, variance"""
    with Path(path).open("w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["setting", "split", "mean", "variance"])
        for report in reports:
            for split, stats in report.summary().items():
                writer.writerow([report.setting, split, stats["mean"], stats["variance"]])


def synthetic_experiment_data(
    corpus: SyntheticCorpus, n_candidates: int = 20, seed: int = 0, n_turns: int = 2
) -> ExperimentData:
    """Dev and test ranking sets from the two halves of the held-out conversations"""
    half = len(corpus.heldout) // 2
    return ExperimentData(
        dialogue=list(corpus.dialogue),
        feedback=list(corpus.feedback),
        valid=build_ranking_examples(corpus.heldout[:half], n_candidates, seed, n_turns),
        test=build_ranking_examples(corpus.heldout[half:], n_candidates, seed + 1, n_turns),
    )
