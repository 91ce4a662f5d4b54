"""
Run configuration

A RunConfig is loaded from a JSON file with one object per section:

    {
      "corpus": {...},         CorpusConfig
      "generator": {...},      GeneratorConfig fields except vocab_size
      "discriminator": {...},  DiscriminatorConfig fields except vocab_size
      "pretrain": {...},       PretrainConfig
      "training": {...},       TrainConfig (adversarial)
      "ranker": {...},         RankerConfig fields except vocab_size
      "ranker_training": {...},RankerTrainConfig
      "experiment": {...},     ExperimentConfig
      "seed": 0
    }

Missing sections and keys take their dataclass defaults; unknown sections or
keys raise ValueError.
"""

import hashlib
import json
import logging
import os
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Type, Union

from .data.corpus import CorpusFormat, SplitSpec
from .experiments.settings import Setting
from .models.discriminator import DiscriminatorConfig
from .models.generator import GeneratorConfig
from .models.ranker import RankerConfig
from .training.adversarial import TrainConfig
from .training.pretrain import PretrainConfig
from .training.ranker_training import RankerTrainConfig

logger = logging.getLogger(__name__)

DATA_DIR_ENV = "F2R_DATA_DIR"


def data_dir() -> Path:
    """Directory relative corpus paths and outputs resolve against"""
    return Path(os.environ.get(DATA_DIR_ENV, "."))


def resolve_path(path: Union[str, Path]) -> Path:
    path = Path(path)
    return path if path.is_absolute() else data_dir() / path


def _check_keys(section: str, data: Dict[str, Any], allowed) -> None:
    unknown = sorted(set(data) - set(allowed))
    if unknown:
        raise ValueError(f"Unknown keys in config section '{section}': {', '.join(unknown)}")


def _build(section: str, cls: Type, data: Optional[Dict[str, Any]]):
    data = dict(data or {})
    _check_keys(section, data, (f.name for f in fields(cls)))
    return cls(**data)


def _model_section(section: str, cls: Type, data: Optional[Dict[str, Any]]) -> Dict[str, Any]:
    """Model sections hold every config field but vocab_size, which comes from the data"""
    data = dict(data or {})
    _check_keys(section, data, (f.name for f in fields(cls) if f.name != "vocab_size"))
    # placeholder size; bad values fail at load time
    cls(vocab_size=16, **data)
    return data


@dataclass
class CorpusConfig:
    """
    dialogue_path / feedback_path: train files of each style
    valid_path / test_path: ranking JSONL files for the experiments
    format: "jsonl" or "parlai_text"
    n_turns: history turns kept before the final response (2)
    split_ratios: style corpus train/valid/test split (0.8, 0.1, 0.1)
    vocab_min_freq / vocab_max_size: vocabulary cut-offs
    """

    dialogue_path: Optional[str] = None
    feedback_path: Optional[str] = None
    valid_path: Optional[str] = None
    test_path: Optional[str] = None
    format: str = "jsonl"
    n_turns: int = 2
    split_ratios: Tuple[float, float, float] = (0.8, 0.1, 0.1)
    vocab_min_freq: int = 1
    vocab_max_size: Optional[int] = None
    max_history_len: int = 64

    def __post_init__(self):
        self.format = CorpusFormat(self.format).value
        self.split_ratios = tuple(float(r) for r in self.split_ratios)  # type: ignore[assignment]
        if self.n_turns < 1:
            raise ValueError(f"n_turns must be >= 1, got {self.n_turns}")
        SplitSpec(self.split_ratios)

    def split_spec(self, seed: int) -> SplitSpec:
        return SplitSpec(self.split_ratios, seed)


@dataclass
class ExperimentConfig:
    """
    settings: ranker settings to run, in order
    seeds: one ranker per seed and setting (3 by default)
    n_candidates: candidates per ranking example (20)
    converter_checkpoint: generator checkpoint for the feed2resp setting
    synthetic_*: sizes of the template corpus used when no corpus paths are set
    """

    settings: Tuple[str, ...] = ("nofeedback", "feedback", "heuristic", "feed2resp")
    seeds: Tuple[int, ...] = (0, 1, 2)
    n_candidates: int = 20
    converter_checkpoint: Optional[str] = None
    synthetic_dialogue: int = 2000
    synthetic_feedback: int = 1000
    synthetic_heldout: int = 400

    def __post_init__(self):
        self.settings = tuple(Setting(s).value for s in self.settings)
        self.seeds = tuple(int(s) for s in self.seeds)
        if not self.seeds:
            raise ValueError("experiment.seeds must not be empty")
        if self.n_candidates < 2:
            raise ValueError(f"n_candidates must be >= 2, got {self.n_candidates}")


SECTIONS = (
    "corpus",
    "generator",
    "discriminator",
    "pretrain",
    "training",
    "ranker",
    "ranker_training",
    "experiment",
    "seed",
)


@dataclass
class RunConfig:
    corpus: CorpusConfig = field(default_factory=CorpusConfig)
    generator: Dict[str, Any] = field(default_factory=dict)
    discriminator: Dict[str, Any] = field(default_factory=dict)
    pretrain: PretrainConfig = field(default_factory=PretrainConfig)
    training: TrainConfig = field(default_factory=TrainConfig)
    ranker: Dict[str, Any] = field(default_factory=dict)
    ranker_training: RankerTrainConfig = field(default_factory=RankerTrainConfig)
    experiment: ExperimentConfig = field(default_factory=ExperimentConfig)
    seed: int = 0

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunConfig":
        if not isinstance(data, dict):
            raise ValueError("Config must be a JSON object")
        _check_keys("<root>", data, SECTIONS)
        return cls(
            corpus=_build("corpus", CorpusConfig, data.get("corpus")),
            generator=_model_section("generator", GeneratorConfig, data.get("generator")),
            discriminator=_model_section("discriminator", DiscriminatorConfig, data.get("discriminator")),
            pretrain=_build("pretrain", PretrainConfig, data.get("pretrain")),
            training=_build("training", TrainConfig, data.get("training")),
            ranker=_model_section("ranker", RankerConfig, data.get("ranker")),
            ranker_training=_build("ranker_training", RankerTrainConfig, data.get("ranker_training")),
            experiment=_build("experiment", ExperimentConfig, data.get("experiment")),
            seed=int(data.get("seed", 0)),
        )

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "RunConfig":
        path = Path(path)
        if not path.exists():
            raise FileNotFoundError(f"Config file not found: {path}")
        try:
            data = json.loads(path.read_text())
        except json.JSONDecodeError as e:
            raise ValueError(f"Invalid JSON in config {path}: {e}") from e
        logger.info(f"Loaded config from {path}")
        return cls.from_dict(data)

    def to_dict(self) -> Dict[str, Any]:
        return json.loads(json.dumps(asdict(self)))

    def config_hash(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    def with_seed(self, seed: int) -> "RunConfig":
        """Copy with every seed field set to `seed`"""
        return replace(
            self,
            seed=seed,
            pretrain=replace(self.pretrain, seed=seed),
            training=replace(self.training, seed=seed),
            ranker_training=replace(self.ranker_training, seed=seed),
        )

    def generator_config(self, vocab_size: int) -> GeneratorConfig:
        return GeneratorConfig(vocab_size=vocab_size, **self.generator)

    def discriminator_config(self, vocab_size: int) -> DiscriminatorConfig:
        return DiscriminatorConfig(vocab_size=vocab_size, **self.discriminator)

    def ranker_config(self, vocab_size: int) -> RankerConfig:
        return RankerConfig(vocab_size=vocab_size, **self.ranker)


def synthetic_preset() -> RunConfig:
    """
    Desk-scale settings for the template corpus: small models trained from
    scratch, so the learning rates are far above the ones meant for a
    pretrained large generator
    """
    return RunConfig.from_dict(
        {
            "generator": {"d_model": 64, "style_dim": 64, "pos_dim": 64, "ffn_dim": 256},
            "discriminator": {
                "d_model": 64,
                "style_dim": 64,
                "pos_dim": 64,
                "hidden_size": 64,
                "n_layers": 2,
            },
            "pretrain": {"epochs": 8, "lr": 1e-3, "disc_steps": 300, "disc_lr": 1e-3},
            "training": {
                "gen_lr": 3e-4,
                "disc_lr": 3e-4,
                "steps": 3000,
                "batch_size": 32,
                "w_cycle": 0.5,
                "log_every": 100,
            },
            "ranker": {"architecture": "poly", "n_codes": 4},
            "ranker_training": {"epochs": 8, "lr": 1e-3},
        }
    )
