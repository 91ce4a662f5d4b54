"""
Retrieval rankers: bi-encoder and poly-encoder scoring of candidate responses
"""

import logging
from dataclasses import asdict, dataclass
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence

import torch
import torch.nn as nn

from ..data.batching import pad_sequences
from ..data.vocab import PAD_ID, Vocab
from .layers import TransformerEncoder, check_capacity, masked_softmax, positions_from_mask

logger = logging.getLogger(__name__)


class RankerArchitecture(str, Enum):
    BI = "bi"
    POLY = "poly"


CONTEXT_POOLINGS = ("mean", "attention")

DEFAULT_RANKER_LR = {RankerArchitecture.BI: 2.5e-3, RankerArchitecture.POLY: 5e-5}


@dataclass
class RankerConfig:
    """
    Desk-scale defaults: 2 layers, 2 heads, 64 dims, 4 context codes.
    n_codes only matters for the poly-encoder; context_pooling only for the
    bi-encoder.
    """

    vocab_size: int
    architecture: str = "bi"
    d_model: int = 64
    ffn_dim: int = 256
    n_layers: int = 2
    n_heads: int = 2
    n_codes: int = 4
    max_positions: int = 256
    dropout: float = 0.1
    context_pooling: str = "mean"

    def __post_init__(self):
        self.architecture = RankerArchitecture(self.architecture).value
        if self.context_pooling not in CONTEXT_POOLINGS:
            raise ValueError(
                f"context_pooling must be one of {CONTEXT_POOLINGS}, got {self.context_pooling!r}"
            )
        for name in ("vocab_size", "d_model", "ffn_dim", "n_layers", "n_heads", "n_codes", "max_positions"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if self.d_model % self.n_heads != 0:
            raise ValueError(f"d_model {self.d_model} not divisible by n_heads {self.n_heads}")

    @property
    def default_lr(self) -> float:
        return DEFAULT_RANKER_LR[RankerArchitecture(self.architecture)]

    @classmethod
    def full_scale(cls, vocab_size: int, architecture: str) -> "RankerConfig":
        """BiEncoder 2 layers / 2 heads; PolyEncoder 12 layers / 12 heads"""
        if RankerArchitecture(architecture) == RankerArchitecture.BI:
            return cls(vocab_size, "bi", d_model=768, ffn_dim=3072, n_layers=2, n_heads=2)
        return cls(vocab_size, "poly", d_model=768, ffn_dim=3072, n_layers=12, n_heads=12, n_codes=64)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RankerConfig":
        return cls(**data)


class TextEncoder(nn.Module):
    """Transformer over token ids; the token embedding is owned by the caller"""

    def __init__(self, token_embedding: nn.Embedding, config: RankerConfig):
        super().__init__()
        self.token_embedding = token_embedding
        self.position_embedding = nn.Embedding(config.max_positions, config.d_model)
        self.encoder = TransformerEncoder(
            config.n_layers, config.d_model, config.n_heads, config.ffn_dim, config.dropout
        )
        self.dropout = nn.Dropout(config.dropout)
        self.max_positions = config.max_positions
        nn.init.normal_(self.position_embedding.weight, std=0.02)

    def forward(self, ids: torch.Tensor):
        """Returns hidden states (B, T, D) and the real-token mask (B, T)"""
        mask = ids != PAD_ID
        if not bool(mask.any(dim=1).all()):
            raise ValueError("Ranker inputs must be nonempty")
        check_capacity(int(mask.sum(dim=1).max()), self.max_positions)
        hidden = self.token_embedding(ids) + self.position_embedding(positions_from_mask(mask))
        states, _ = self.encoder(self.dropout(hidden), ~mask)
        return states, mask


def _mean_pool(states: torch.Tensor, mask: torch.Tensor) -> torch.Tensor:
    weights = mask.to(states.dtype)
    return (states * weights[..., None]).sum(dim=1) / weights.sum(dim=1, keepdim=True)


class Ranker(nn.Module):
    """
    Separate context and candidate encoders over a shared token embedding.

    BI: score = <context vector, candidate vector>
    POLY: m learned codes read the context; each candidate attends over the
    m code outputs to build its own context vector, then takes the dot product
    """

    def __init__(self, config: RankerConfig):
        super().__init__()
        self.config = config
        self.token_embedding = nn.Embedding(config.vocab_size, config.d_model)
        self.context_encoder = TextEncoder(self.token_embedding, config)
        self.candidate_encoder = TextEncoder(self.token_embedding, config)
        n_codes = config.n_codes if self.architecture == RankerArchitecture.POLY else 1
        self.codes = nn.Parameter(torch.randn(n_codes, config.d_model) * config.d_model**-0.5)
        nn.init.normal_(self.token_embedding.weight, std=config.d_model**-0.5)

    @property
    def architecture(self) -> RankerArchitecture:
        return RankerArchitecture(self.config.architecture)

    def encode_candidates(self, candidate_ids: torch.Tensor) -> torch.Tensor:
        """(N, T) ids -> (N, D) mean-pooled candidate vectors"""
        states, mask = self.candidate_encoder(candidate_ids)
        return _mean_pool(states, mask)

    def context_codes(self, context_ids: torch.Tensor) -> torch.Tensor:
        """(B, T) ids -> (B, m, D): each code's attention read of the context"""
        states, mask = self.context_encoder(context_ids)
        scores = torch.einsum("md,btd->bmt", self.codes, states)
        weights = masked_softmax(scores, ~mask[:, None, :])
        return weights @ states

    def encode_context(self, context_ids: torch.Tensor) -> torch.Tensor:
        """Bi-encoder context vector (B, D)"""
        if self.config.context_pooling == "attention":
            return self.context_codes(context_ids)[:, 0]
        states, mask = self.context_encoder(context_ids)
        return _mean_pool(states, mask)

    def forward(self, context_ids: torch.Tensor, candidate_ids: torch.Tensor) -> torch.Tensor:
        """
        Score every candidate against every context

        Args:
            context_ids: (B, Tc)
            candidate_ids: (N, Tn)

        Returns:
            (B, N) scores
        """
        candidates = self.encode_candidates(candidate_ids)
        if self.architecture == RankerArchitecture.BI:
            return self.encode_context(context_ids) @ candidates.t()

        codes = self.context_codes(context_ids)
        attn = torch.softmax(torch.einsum("nd,bmd->bnm", candidates, codes), dim=-1)
        contexts = attn @ codes
        return (contexts * candidates[None]).sum(dim=-1)


class RankerScorer:
    """Callable (context, candidates) -> scores over text, for hits_at_k"""

    def __init__(
        self,
        model: Ranker,
        vocab: Vocab,
        max_context_len: Optional[int] = None,
        max_candidate_len: Optional[int] = None,
    ):
        self.model = model
        self.vocab = vocab
        self.max_context_len = max_context_len
        self.max_candidate_len = max_candidate_len

    def _encode(self, texts: Sequence[str], limit: Optional[int], keep_tail: bool) -> torch.Tensor:
        seqs = []
        for text in texts:
            ids = self.vocab.encode(text)
            if not ids:
                raise ValueError(f"Empty ranker input: {text!r}")
            if limit is not None:
                ids = ids[-limit:] if keep_tail else ids[:limit]
            seqs.append(ids)
        return pad_sequences(seqs).to(self.model.codes.device)

    @torch.no_grad()
    def score(self, context: str, candidates: Sequence[str]) -> List[float]:
        if not candidates:
            raise ValueError("Need at least one candidate")
        was_training = self.model.training
        self.model.eval()
        try:
            ctx = self._encode([context], self.max_context_len, keep_tail=True)
            cands = self._encode(candidates, self.max_candidate_len, keep_tail=False)
            return self.model(ctx, cands)[0].tolist()
        finally:
            self.model.train(was_training)

    def __call__(self, context: str, candidates: Sequence[str]) -> List[float]:
        return self.score(context, candidates)


def score_bi(model: Ranker, vocab: Vocab, context: str, candidate: str) -> float:
    """Bi-encoder similarity of one context and one candidate"""
    if model.architecture != RankerArchitecture.BI:
        raise ValueError(f"score_bi needs a bi-encoder, got {model.architecture.value}")
    return RankerScorer(model, vocab).score(context, [candidate])[0]


def score_poly(model: Ranker, vocab: Vocab, context: str, candidates: Sequence[str]) -> List[float]:
    """Poly-encoder scores of every candidate for one context"""
    if model.architecture != RankerArchitecture.POLY:
        raise ValueError(f"score_poly needs a poly-encoder, got {model.architecture.value}")
    return RankerScorer(model, vocab).score(context, candidates)
