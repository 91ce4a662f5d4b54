from .discriminator import DiscriminatorConfig, StyleDiscriminator, StylePrediction, attention_mass
from .generator import (
    GeneratorConfig,
    SoftSequence,
    StyleTransferGenerator,
    apply_repetition_penalty,
    get_lengths,
)
from .ranker import (
    Ranker,
    RankerArchitecture,
    RankerConfig,
    RankerScorer,
    score_bi,
    score_poly,
)

__all__ = [
    "DiscriminatorConfig",
    "StyleDiscriminator",
    "StylePrediction",
    "attention_mass",
    "GeneratorConfig",
    "SoftSequence",
    "StyleTransferGenerator",
    "apply_repetition_penalty",
    "get_lengths",
    "Ranker",
    "RankerArchitecture",
    "RankerConfig",
    "RankerScorer",
    "score_bi",
    "score_poly",
]
