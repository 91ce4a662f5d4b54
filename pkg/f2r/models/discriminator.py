"""
Transformer style classifier over (x, h) with exportable attention maps
"""

import json
import logging
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import torch
import torch.nn as nn
import torch.nn.functional as F

from ..data.vocab import PAD_ID, RES_ID, Vocab
from .layers import EncoderLayer, QueryPooling, check_capacity, embed_tokens, positions_from_mask

logger = logging.getLogger(__name__)


@dataclass
class DiscriminatorConfig:
    """Defaults: 4 layers, 4 heads, 256 for every embedding and hidden size"""

    vocab_size: int
    d_model: int = 256
    style_dim: int = 256
    pos_dim: int = 256
    hidden_size: int = 256
    n_layers: int = 4
    n_heads: int = 4
    max_positions: int = 256
    dropout: float = 0.1
    use_history: bool = True
    num_classes: int = 2

    def __post_init__(self):
        for name in ("vocab_size", "d_model", "hidden_size", "n_layers", "n_heads", "max_positions"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if self.num_classes != 2:
            raise ValueError(f"Discriminator is binary, got num_classes={self.num_classes}")
        if not (self.style_dim == self.pos_dim == self.d_model):
            raise ValueError("style_dim and pos_dim must equal d_model")
        if self.d_model % self.n_heads != 0:
            raise ValueError(f"d_model {self.d_model} not divisible by n_heads {self.n_heads}")

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "DiscriminatorConfig":
        return cls(**data)


@dataclass
class StylePrediction:
    probs: torch.Tensor  # (B, 2)
    predicted: torch.Tensor  # (B,)


class StyleDiscriminator(nn.Module):
    """
    Encoder layers over "[h] [RES] [x]" (or x alone), read at every layer
    by a learned decision query. The query attends over input tokens only
    and its final state is scored against one prototype vector per style.
    """

    def __init__(self, config: DiscriminatorConfig):
        super().__init__()
        self.config = config
        d = config.d_model

        self.token_embedding = nn.Embedding(config.vocab_size, d)
        self.position_embedding = nn.Embedding(config.max_positions, config.pos_dim)
        self.layers = nn.ModuleList(
            EncoderLayer(d, config.n_heads, config.hidden_size, config.dropout)
            for _ in range(config.n_layers)
        )
        self.pooling = nn.ModuleList(
            QueryPooling(d, config.n_heads, config.hidden_size, config.dropout)
            for _ in range(config.n_layers)
        )
        self.query = nn.Parameter(torch.randn(d) * 0.02)
        self.final_norm = nn.LayerNorm(d)
        self.dropout = nn.Dropout(config.dropout)
        # class prototypes; zero so an untrained model predicts (0.5, 0.5)
        self.style_embedding = nn.Embedding(config.num_classes, config.style_dim)

        nn.init.normal_(self.token_embedding.weight, std=d**-0.5)
        nn.init.normal_(self.position_embedding.weight, std=0.02)
        nn.init.zeros_(self.style_embedding.weight)

    def _inputs(
        self,
        x: torch.Tensor,
        history: Optional[torch.Tensor],
        x_mask: Optional[torch.Tensor],
    ) -> Tuple[torch.Tensor, torch.Tensor]:
        if x_mask is None:
            if torch.is_floating_point(x):
                raise ValueError("Soft inputs need an explicit x_mask")
            x_mask = x != PAD_ID
        if not bool(x_mask.any(dim=1).all()):
            raise ValueError("Every response x must be nonempty")

        x_emb = embed_tokens(self.token_embedding, x)
        if not self.config.use_history or history is None:
            return x_emb, x_mask.bool()

        batch = x_emb.size(0)
        res = self.token_embedding.weight[RES_ID].expand(batch, 1, -1)
        emb = torch.cat([self.token_embedding(history), res, x_emb], dim=1)
        mask = torch.cat(
            [
                history != PAD_ID,
                torch.ones(batch, 1, dtype=torch.bool, device=x_emb.device),
                x_mask.bool(),
            ],
            dim=1,
        )
        return emb, mask

    def forward(
        self,
        x: torch.Tensor,
        history: Optional[torch.Tensor] = None,
        x_mask: Optional[torch.Tensor] = None,
        return_attention: bool = False,
    ):
        """
        Args:
            x: (B, Lx) ids or (B, Lx, V) distributions
            history: (B, Lh) ids; ignored when use_history is off
            x_mask: (B, Lx) True on real positions; required for soft x

        Returns:
            logits (B, 2), plus per-layer pooling weights (B, H, L) when
            return_attention is set
        """
        emb, mask = self._inputs(x, history, x_mask)
        check_capacity(int(mask.sum(dim=1).max()), self.config.max_positions)

        tokens = self.dropout(emb + self.position_embedding(positions_from_mask(mask)))
        pad_mask = ~mask
        query = self.query.expand(tokens.size(0), 1, -1)

        attention = []
        for layer, pool in zip(self.layers, self.pooling):
            tokens, _ = layer(tokens, pad_mask)
            query, weights = pool(query, tokens, pad_mask)
            attention.append(weights)

        pooled = self.final_norm(query[:, 0])
        logits = pooled @ self.style_embedding.weight.t()
        if return_attention:
            return logits, attention
        return logits

    def classify(
        self,
        x: torch.Tensor,
        history: Optional[torch.Tensor] = None,
        x_mask: Optional[torch.Tensor] = None,
    ) -> StylePrediction:
        probs = F.softmax(self.forward(x, history, x_mask), dim=-1)
        return StylePrediction(probs=probs, predicted=probs.argmax(dim=-1))

    @torch.no_grad()
    def attention_map(
        self, x_ids: Sequence[int], history_ids: Optional[Sequence[int]] = None
    ) -> Tuple[List[int], List[List[List[List[float]]]], List[float]]:
        """
        Pooling attention for a single example

        Returns:
            input ids in model order, weights [layer][head][query][token]
            (one decision query, so each head is a 1 x L row-stochastic
            matrix), class probs
        """
        device = self.query.device
        x = torch.tensor([list(x_ids)], dtype=torch.long, device=device)
        use_history = self.config.use_history and history_ids is not None and len(history_ids) > 0
        history = (
            torch.tensor([list(history_ids)], dtype=torch.long, device=device)
            if use_history
            else None
        )
        logits, attention = self.forward(x, history, return_attention=True)

        ids = list(x_ids)
        if history is not None:
            ids = list(history_ids) + [RES_ID] + ids  # type: ignore[arg-type]
        layers = [[[head] for head in w[0].tolist()] for w in attention]
        return ids, layers, F.softmax(logits, dim=-1)[0].tolist()

    def export_attention(
        self,
        x_ids: Sequence[int],
        history_ids: Optional[Sequence[int]],
        vocab: Vocab,
        out_path: Union[str, Path],
    ) -> Dict[str, Any]:
        """
        Write the heatmap JSON {"tokens", "layers", ...}; layers[l][h] is a
        row-stochastic matrix with one row per query over the tokens
        """
        was_training = self.training
        self.eval()
        try:
            ids, layers, probs = self.attention_map(x_ids, history_ids)
        finally:
            self.train(was_training)

        tokens = [vocab.id_to_token(i) for i in ids]
        doc = {
            "tokens": tokens,
            "layers": layers,
            "response_start": len(tokens) - len(x_ids),
            "probabilities": probs,
            "predicted": int(max(range(len(probs)), key=probs.__getitem__)),
        }
        Path(out_path).write_text(json.dumps(doc, indent=2))
        logger.info(f"Wrote attention map over {len(tokens)} tokens to {out_path}")
        return doc


def attention_mass(
    layers: Sequence[Sequence[Sequence[Sequence[float]]]], positions: Sequence[int]
) -> float:
    """Mean (over layers, heads and query rows) attention mass on the given token positions"""
    totals = [sum(row[i] for i in positions) for layer in layers for head in layer for row in head]
    return sum(totals) / len(totals)
