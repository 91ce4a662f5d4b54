"""
Transformer building blocks shared by the generator, discriminator and rankers

Every block returns its attention weights so callers can export them. Inputs
may be token ids or per-position distributions over the vocabulary (soft
sequences); see embed_tokens.
"""

import math
from typing import List, Optional, Tuple

import torch
import torch.nn as nn
import torch.nn.functional as F


def embed_tokens(embedding: nn.Embedding, tokens: torch.Tensor) -> torch.Tensor:
    """
    Lookup for ids (B, T); expected embedding for distributions (B, T, V)
    """
    if not torch.is_floating_point(tokens):
        return embedding(tokens)
    return tokens.to(embedding.weight.dtype) @ embedding.weight


def positions_from_mask(mask: torch.Tensor) -> torch.Tensor:
    """Position index of every real token, skipping padding"""
    return (mask.long().cumsum(dim=1) - 1).clamp(min=0)


def check_capacity(n_positions: int, max_positions: int) -> None:
    if n_positions > max_positions:
        raise ValueError(
            f"Sequence of length {n_positions} exceeds positional capacity {max_positions}"
        )


def causal_mask(size: int, device: Optional[torch.device] = None) -> torch.Tensor:
    """True above the diagonal, i.e. where a query may not look"""
    return torch.triu(torch.ones(size, size, dtype=torch.bool, device=device), diagonal=1)


def masked_softmax(scores: torch.Tensor, pad_mask: Optional[torch.Tensor]) -> torch.Tensor:
    """Softmax over the last dim with pad_mask (broadcastable, True = pad) excluded"""
    if pad_mask is not None:
        scores = scores.masked_fill(pad_mask, float("-inf"))
    return F.softmax(scores, dim=-1)


class MultiHeadAttention(nn.Module):
    def __init__(self, d_model: int, n_heads: int, dropout: float = 0.0):
        super().__init__()
        if d_model % n_heads != 0:
            raise ValueError(f"d_model {d_model} not divisible by n_heads {n_heads}")
        self.n_heads = n_heads
        self.d_k = d_model // n_heads
        self.q_proj = nn.Linear(d_model, d_model)
        self.k_proj = nn.Linear(d_model, d_model)
        self.v_proj = nn.Linear(d_model, d_model)
        self.out_proj = nn.Linear(d_model, d_model)
        self.dropout = nn.Dropout(dropout)

    def forward(
        self,
        query: torch.Tensor,
        key: torch.Tensor,
        value: torch.Tensor,
        key_padding_mask: Optional[torch.Tensor] = None,
        attn_mask: Optional[torch.Tensor] = None,
    ) -> Tuple[torch.Tensor, torch.Tensor]:
        """
        Args:
            query: (B, Tq, D); key/value: (B, Tk, D)
            key_padding_mask: (B, Tk), True at padding
            attn_mask: (Tq, Tk), True where attention is blocked

        Returns:
            output (B, Tq, D) and weights (B, H, Tq, Tk)
        """
        batch, tq, _ = query.shape
        tk = key.size(1)

        q = self.q_proj(query).view(batch, tq, self.n_heads, self.d_k).transpose(1, 2)
        k = self.k_proj(key).view(batch, tk, self.n_heads, self.d_k).transpose(1, 2)
        v = self.v_proj(value).view(batch, tk, self.n_heads, self.d_k).transpose(1, 2)

        scores = q @ k.transpose(-2, -1) / math.sqrt(self.d_k)
        if attn_mask is not None:
            scores = scores.masked_fill(attn_mask, float("-inf"))
        pad = key_padding_mask[:, None, None, :] if key_padding_mask is not None else None
        weights = masked_softmax(scores, pad)

        out = (self.dropout(weights) @ v).transpose(1, 2).reshape(batch, tq, -1)
        return self.out_proj(out), weights


class FeedForward(nn.Module):
    def __init__(self, d_model: int, hidden: int, dropout: float = 0.0):
        super().__init__()
        self.net = nn.Sequential(
            nn.Linear(d_model, hidden),
            nn.GELU(),
            nn.Dropout(dropout),
            nn.Linear(hidden, d_model),
        )

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.net(x)


class EncoderLayer(nn.Module):
    """Pre-norm self-attention block"""

    def __init__(self, d_model: int, n_heads: int, hidden: int, dropout: float = 0.0):
        super().__init__()
        self.norm1 = nn.LayerNorm(d_model)
        self.self_attn = MultiHeadAttention(d_model, n_heads, dropout)
        self.norm2 = nn.LayerNorm(d_model)
        self.ffn = FeedForward(d_model, hidden, dropout)
        self.dropout = nn.Dropout(dropout)

    def forward(
        self, x: torch.Tensor, pad_mask: Optional[torch.Tensor] = None
    ) -> Tuple[torch.Tensor, torch.Tensor]:
        h = self.norm1(x)
        attn, weights = self.self_attn(h, h, h, key_padding_mask=pad_mask)
        x = x + self.dropout(attn)
        x = x + self.dropout(self.ffn(self.norm2(x)))
        return x, weights


class DecoderLayer(nn.Module):
    """Pre-norm causal self-attention, cross-attention and feed-forward"""

    def __init__(self, d_model: int, n_heads: int, hidden: int, dropout: float = 0.0):
        super().__init__()
        self.norm1 = nn.LayerNorm(d_model)
        self.self_attn = MultiHeadAttention(d_model, n_heads, dropout)
        self.norm2 = nn.LayerNorm(d_model)
        self.cross_attn = MultiHeadAttention(d_model, n_heads, dropout)
        self.norm3 = nn.LayerNorm(d_model)
        self.ffn = FeedForward(d_model, hidden, dropout)
        self.dropout = nn.Dropout(dropout)

    def forward(
        self,
        x: torch.Tensor,
        memory: torch.Tensor,
        memory_pad_mask: Optional[torch.Tensor],
        self_mask: torch.Tensor,
    ) -> torch.Tensor:
        h = self.norm1(x)
        attn, _ = self.self_attn(h, h, h, attn_mask=self_mask)
        x = x + self.dropout(attn)
        attn, _ = self.cross_attn(self.norm2(x), memory, memory, key_padding_mask=memory_pad_mask)
        x = x + self.dropout(attn)
        return x + self.dropout(self.ffn(self.norm3(x)))


class TransformerEncoder(nn.Module):
    def __init__(
        self, n_layers: int, d_model: int, n_heads: int, hidden: int, dropout: float = 0.0
    ):
        super().__init__()
        self.layers = nn.ModuleList(
            EncoderLayer(d_model, n_heads, hidden, dropout) for _ in range(n_layers)
        )
        self.norm = nn.LayerNorm(d_model)

    def forward(
        self, x: torch.Tensor, pad_mask: Optional[torch.Tensor] = None
    ) -> Tuple[torch.Tensor, List[torch.Tensor]]:
        weights = []
        for layer in self.layers:
            x, w = layer(x, pad_mask)
            weights.append(w)
        return self.norm(x), weights


class TransformerDecoder(nn.Module):
    def __init__(
        self, n_layers: int, d_model: int, n_heads: int, hidden: int, dropout: float = 0.0
    ):
        super().__init__()
        self.layers = nn.ModuleList(
            DecoderLayer(d_model, n_heads, hidden, dropout) for _ in range(n_layers)
        )
        self.norm = nn.LayerNorm(d_model)

    def forward(
        self,
        x: torch.Tensor,
        memory: torch.Tensor,
        memory_pad_mask: Optional[torch.Tensor] = None,
    ) -> torch.Tensor:
        self_mask = causal_mask(x.size(1), device=x.device)
        for layer in self.layers:
            x = layer(x, memory, memory_pad_mask, self_mask)
        return self.norm(x)


class QueryPooling(nn.Module):
    """
    A single query vector that reads a token sequence with multi-head
    attention; the query never becomes a key, so its weights cover input
    tokens only
    """

    def __init__(self, d_model: int, n_heads: int, hidden: int, dropout: float = 0.0):
        super().__init__()
        self.norm_q = nn.LayerNorm(d_model)
        self.norm_kv = nn.LayerNorm(d_model)
        self.attn = MultiHeadAttention(d_model, n_heads, dropout)
        self.norm_ffn = nn.LayerNorm(d_model)
        self.ffn = FeedForward(d_model, hidden, dropout)
        self.dropout = nn.Dropout(dropout)

    def forward(
        self,
        query: torch.Tensor,
        tokens: torch.Tensor,
        pad_mask: Optional[torch.Tensor] = None,
    ) -> Tuple[torch.Tensor, torch.Tensor]:
        kv = self.norm_kv(tokens)
        attn, weights = self.attn(self.norm_q(query), kv, kv, key_padding_mask=pad_mask)
        query = query + self.dropout(attn)
        query = query + self.dropout(self.ffn(self.norm_ffn(query)))
        return query, weights[:, :, 0, :]
