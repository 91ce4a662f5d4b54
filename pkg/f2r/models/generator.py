"""
Style-conditioned encoder-decoder: (x, h, target style) -> response

Two decoding paths share the same weights:
- generate(): greedy hard decoding with a repetition penalty, for inference
- forward_soft(): per-step softmax distributions fed back as expected
  embeddings, so losses on generated text stay differentiable
"""

import logging
from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Optional, Tuple

import torch
import torch.nn as nn
import torch.nn.functional as F

from ..data.vocab import (
    BOS_ID,
    EOS_ID,
    FEEDBACK_ID,
    NATURAL_ID,
    P1_ID,
    P2_ID,
    PAD_ID,
    RES_ID,
)
from .layers import (
    TransformerDecoder,
    TransformerEncoder,
    check_capacity,
    embed_tokens,
    positions_from_mask,
)

logger = logging.getLogger(__name__)

STYLE_INJECTIONS = ("add", "prepend", "both")

# Never emitted by either decoding path
_BLOCKED_IDS = (PAD_ID, BOS_ID, P1_ID, P2_ID, RES_ID, NATURAL_ID, FEEDBACK_ID)


@dataclass
class GeneratorConfig:
    """
    Generator sizes. d_model is the token embedding size; style and
    positional embeddings are added to it, so all three must match.
    """

    vocab_size: int
    d_model: int = 64
    style_dim: int = 64
    pos_dim: int = 64
    ffn_dim: int = 256
    n_encoder_layers: int = 2
    n_decoder_layers: int = 2
    n_heads: int = 4
    max_positions: int = 256
    dropout: float = 0.1
    style_injection: str = "add"

    def __post_init__(self):
        sizes = {
            "vocab_size": self.vocab_size,
            "d_model": self.d_model,
            "style_dim": self.style_dim,
            "pos_dim": self.pos_dim,
            "ffn_dim": self.ffn_dim,
            "n_encoder_layers": self.n_encoder_layers,
            "n_decoder_layers": self.n_decoder_layers,
            "n_heads": self.n_heads,
            "max_positions": self.max_positions,
        }
        for name, value in sizes.items():
            if value <= 0:
                raise ValueError(f"{name} must be positive, got {value}")
        if not (self.style_dim == self.pos_dim == self.d_model):
            raise ValueError(
                f"style_dim ({self.style_dim}) and pos_dim ({self.pos_dim}) must equal "
                f"d_model ({self.d_model})"
            )
        if self.d_model % self.n_heads != 0:
            raise ValueError(f"d_model {self.d_model} not divisible by n_heads {self.n_heads}")
        if self.style_injection not in STYLE_INJECTIONS:
            raise ValueError(
                f"style_injection must be one of {STYLE_INJECTIONS}, got {self.style_injection!r}"
            )
        if not 0.0 <= self.dropout < 1.0:
            raise ValueError(f"dropout must be in [0, 1), got {self.dropout}")

    @classmethod
    def full_scale(cls, vocab_size: int) -> "GeneratorConfig":
        """BART-large sized layout (12 + 12 layers, 16 heads, 1024 dims)"""
        return cls(
            vocab_size=vocab_size,
            d_model=1024,
            style_dim=1024,
            pos_dim=1024,
            ffn_dim=4096,
            n_encoder_layers=12,
            n_decoder_layers=12,
            n_heads=16,
            max_positions=1024,
        )

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "GeneratorConfig":
        return cls(**data)


@dataclass
class SoftSequence:
    """
    Differentiable sentence: probs (B, T, V), each row a distribution, plus
    per-example lengths (first EOS of the argmax chain, inclusive)
    """

    probs: torch.Tensor
    lengths: torch.Tensor

    @property
    def mask(self) -> torch.Tensor:
        """(B, T), True at positions inside each sequence"""
        steps = torch.arange(self.probs.size(1), device=self.probs.device)
        return steps[None, :] < self.lengths[:, None]

    def argmax(self) -> torch.Tensor:
        return self.probs.argmax(dim=-1)

    @classmethod
    def from_ids(
        cls, ids: torch.Tensor, vocab_size: int, dtype: torch.dtype = torch.float32
    ) -> "SoftSequence":
        """One-hot rendering of hard ids; padding is excluded from the lengths"""
        probs = F.one_hot(ids, vocab_size).to(dtype)
        return cls(probs, (ids != PAD_ID).sum(dim=1))


def get_lengths(tokens: torch.Tensor, eos_id: int = EOS_ID) -> torch.Tensor:
    """Length up to and including the first EOS, or the full width without one"""
    seen_eos = (tokens == eos_id).long().cumsum(dim=1)
    lengths = (seen_eos == 0).long().sum(dim=1) + 1
    return lengths.clamp(max=tokens.size(1))


def apply_repetition_penalty(
    logits: torch.Tensor, previous: torch.Tensor, penalty: float
) -> torch.Tensor:
    """
    Penalize tokens already emitted: a positive logit is divided by the
    penalty, a negative one multiplied by it

    Args:
        logits: (B, V) next-token logits
        previous: (B, T) ids generated so far
        penalty: >= 1.0; 1.0 disables the penalty
    """
    if penalty == 1.0 or previous.numel() == 0:
        return logits
    seen = torch.zeros_like(logits, dtype=torch.bool).scatter_(1, previous, True)
    penalized = torch.where(logits > 0, logits / penalty, logits * penalty)
    return torch.where(seen, penalized, logits)


class StyleTransferGenerator(nn.Module):
    """
    Transformer encoder-decoder conditioned on a style label

    The encoder reads "[h] [RES] [x]"; the target style enters as an
    embedding added to every encoder position (and/or as a prepended style
    token, see GeneratorConfig.style_injection). Output projection is tied to
    the token embedding.
    """

    def __init__(self, config: GeneratorConfig):
        super().__init__()
        self.config = config
        d = config.d_model

        self.token_embedding = nn.Embedding(config.vocab_size, d)
        self.position_embedding = nn.Embedding(config.max_positions, config.pos_dim)
        self.style_embedding = nn.Embedding(2, config.style_dim)
        self.encoder = TransformerEncoder(
            config.n_encoder_layers, d, config.n_heads, config.ffn_dim, config.dropout
        )
        self.decoder = TransformerDecoder(
            config.n_decoder_layers, d, config.n_heads, config.ffn_dim, config.dropout
        )
        self.dropout = nn.Dropout(config.dropout)
        self.register_buffer(
            "style_token_ids", torch.tensor([NATURAL_ID, FEEDBACK_ID]), persistent=False
        )

        nn.init.normal_(self.token_embedding.weight, std=d**-0.5)
        nn.init.normal_(self.position_embedding.weight, std=0.02)
        nn.init.normal_(self.style_embedding.weight, std=0.02)

    @property
    def vocab_size(self) -> int:
        return self.config.vocab_size

    def encode(
        self,
        history: torch.Tensor,
        x: torch.Tensor,
        styles: torch.Tensor,
        x_mask: Optional[torch.Tensor] = None,
    ) -> Tuple[torch.Tensor, torch.Tensor]:
        """
        Args:
            history: (B, Lh) ids, PAD allowed
            x: (B, Lx) ids or (B, Lx, V) distributions
            styles: (B,) target style labels
            x_mask: (B, Lx) True on real positions; required for soft x

        Returns:
            memory (B, L, D) and its padding mask (True = pad)
        """
        batch = styles.size(0)
        emb = self.token_embedding.weight

        if x_mask is None:
            if torch.is_floating_point(x):
                raise ValueError("Soft inputs need an explicit x_mask")
            x_mask = x != PAD_ID
        if not bool(x_mask.any(dim=1).all()):
            raise ValueError("Every response x must be nonempty")

        pieces = [
            self.token_embedding(history),
            emb[RES_ID].expand(batch, 1, -1),
            embed_tokens(self.token_embedding, x),
        ]
        masks = [
            history != PAD_ID,
            torch.ones(batch, 1, dtype=torch.bool, device=styles.device),
            x_mask.bool(),
        ]
        if self.config.style_injection in ("prepend", "both"):
            pieces.insert(0, self.token_embedding(self.style_token_ids[styles])[:, None, :])
            masks.insert(0, torch.ones(batch, 1, dtype=torch.bool, device=styles.device))

        hidden = torch.cat(pieces, dim=1)
        mask = torch.cat(masks, dim=1)
        check_capacity(int(mask.sum(dim=1).max()), self.config.max_positions)

        hidden = hidden + self.position_embedding(positions_from_mask(mask))
        if self.config.style_injection in ("add", "both"):
            hidden = hidden + self.style_embedding(styles)[:, None, :]

        memory, _ = self.encoder(self.dropout(hidden), ~mask)
        return memory, ~mask

    def decode(
        self,
        memory: torch.Tensor,
        memory_pad_mask: torch.Tensor,
        decoder_embeddings: torch.Tensor,
    ) -> torch.Tensor:
        """Logits (B, T, V) for every decoder position"""
        steps = decoder_embeddings.size(1)
        check_capacity(steps, self.config.max_positions)
        positions = torch.arange(steps, device=decoder_embeddings.device)
        hidden = decoder_embeddings + self.position_embedding(positions)[None]
        hidden = self.decoder(self.dropout(hidden), memory, memory_pad_mask)
        return hidden @ self.token_embedding.weight.t()

    def teacher_forced_logits(
        self,
        history: torch.Tensor,
        x: torch.Tensor,
        styles: torch.Tensor,
        decoder_input: torch.Tensor,
        x_mask: Optional[torch.Tensor] = None,
    ) -> torch.Tensor:
        """Logits (B, T, V) given the gold prefix decoder_input ([BOS] + y)"""
        memory, memory_pad_mask = self.encode(history, x, styles, x_mask)
        return self.decode(memory, memory_pad_mask, self.token_embedding(decoder_input))

    def _mask_logits(self, logits: torch.Tensor, step: int) -> torch.Tensor:
        blocked = torch.zeros(logits.size(-1), dtype=torch.bool, device=logits.device)
        blocked[list(_BLOCKED_IDS)] = True
        if step == 0:
            blocked[EOS_ID] = True
        return logits.masked_fill(blocked, float("-inf"))

    def forward_soft(
        self,
        history: torch.Tensor,
        x: torch.Tensor,
        styles: torch.Tensor,
        max_len: int = 50,
        temperature: float = 1.0,
        x_mask: Optional[torch.Tensor] = None,
    ) -> SoftSequence:
        """
        Decode max_len steps of softmax distributions; each step feeds back
        the expected embedding of the previous distribution
        """
        if max_len < 1:
            raise ValueError(f"max_len must be >= 1, got {max_len}")
        if temperature <= 0:
            raise ValueError(f"temperature must be positive, got {temperature}")

        memory, memory_pad_mask = self.encode(history, x, styles, x_mask)
        batch = styles.size(0)
        table = self.token_embedding.weight

        inputs = [table[BOS_ID].expand(batch, 1, -1)]
        probs = []
        for step in range(max_len):
            logits = self.decode(memory, memory_pad_mask, torch.cat(inputs, dim=1))[:, -1]
            p = F.softmax(self._mask_logits(logits, step) / temperature, dim=-1)
            probs.append(p)
            inputs.append((p @ table)[:, None, :])

        stacked = torch.stack(probs, dim=1)
        return SoftSequence(stacked, get_lengths(stacked.argmax(dim=-1)))

    @torch.no_grad()
    def generate(
        self,
        history: torch.Tensor,
        x: torch.Tensor,
        styles: torch.Tensor,
        max_len: int = 50,
        repetition_penalty: float = 2.0,
    ) -> List[List[int]]:
        """
        Greedy decoding over penalized logits

        Returns:
            one id list per example, EOS excluded, at most max_len ids
        """
        if max_len < 1:
            raise ValueError(f"max_len must be >= 1, got {max_len}")
        if repetition_penalty < 1.0:
            raise ValueError(f"repetition_penalty must be >= 1, got {repetition_penalty}")

        memory, memory_pad_mask = self.encode(history, x, styles)
        batch = styles.size(0)
        ys = torch.full((batch, 1), BOS_ID, dtype=torch.long, device=styles.device)
        finished = [False] * batch
        outputs: List[List[int]] = [[] for _ in range(batch)]

        for step in range(max_len):
            logits = self.decode(memory, memory_pad_mask, self.token_embedding(ys))[:, -1]
            logits = self._mask_logits(logits, step)
            logits = apply_repetition_penalty(logits, ys[:, 1:], repetition_penalty)
            next_ids = logits.argmax(dim=-1)

            for i, tok in enumerate(next_ids.tolist()):
                if finished[i]:
                    continue
                if tok == EOS_ID:
                    finished[i] = True
                else:
                    outputs[i].append(tok)
            if all(finished):
                break
            ys = torch.cat([ys, next_ids[:, None]], dim=1)

        return outputs
