"""
Tensor collation for style-transfer examples
"""

import random
from dataclasses import dataclass
from typing import Iterator, List, Optional, Sequence

import torch

from .corpus import StyleTransferExample
from .vocab import BOS_ID, EOS_ID, PAD_ID, Vocab


@dataclass
class StyleBatch:
    history: torch.Tensor  # (B, Lh) history ids, right-padded
    response: torch.Tensor  # (B, Lx) response ids x, right-padded
    decoder_input: torch.Tensor  # (B, Lx + 1) [BOS] + x
    target: torch.Tensor  # (B, Lx + 1) x + [EOS]
    styles: torch.Tensor  # (B,) source style labels

    def __len__(self) -> int:
        return self.styles.size(0)

    def to(self, device: torch.device) -> "StyleBatch":
        return StyleBatch(
            history=self.history.to(device),
            response=self.response.to(device),
            decoder_input=self.decoder_input.to(device),
            target=self.target.to(device),
            styles=self.styles.to(device),
        )

    def select(self, mask: torch.Tensor) -> "StyleBatch":
        """Rows where mask is true"""
        return StyleBatch(
            history=self.history[mask],
            response=self.response[mask],
            decoder_input=self.decoder_input[mask],
            target=self.target[mask],
            styles=self.styles[mask],
        )


def pad_sequences(seqs: Sequence[Sequence[int]], pad_id: int = PAD_ID) -> torch.Tensor:
    width = max((len(s) for s in seqs), default=0)
    out = torch.full((len(seqs), width), pad_id, dtype=torch.long)
    for i, seq in enumerate(seqs):
        if seq:
            out[i, : len(seq)] = torch.tensor(list(seq), dtype=torch.long)
    return out


def encode_pair(
    history: str,
    response: str,
    vocab: Vocab,
    max_history_len: int = 64,
    max_response_len: int = 50,
):
    """Ids for one (h, x) pair; history keeps its most recent tokens"""
    h = vocab.encode(history)[-max_history_len:] if max_history_len > 0 else []
    x = vocab.encode(response)[:max_response_len]
    if not x:
        raise ValueError(f"Response encodes to an empty sequence: {response!r}")
    return h, x


def collate_style_batch(
    examples: Sequence[StyleTransferExample],
    vocab: Vocab,
    max_history_len: int = 64,
    max_response_len: int = 50,
    device: Optional[torch.device] = None,
) -> StyleBatch:
    histories, responses = [], []
    for ex in examples:
        h, x = encode_pair(ex.history, ex.response, vocab, max_history_len, max_response_len)
        histories.append(h)
        responses.append(x)

    batch = StyleBatch(
        history=pad_sequences(histories),
        response=pad_sequences(responses),
        decoder_input=pad_sequences([[BOS_ID] + x for x in responses]),
        target=pad_sequences([x + [EOS_ID] for x in responses]),
        styles=torch.tensor([int(ex.style) for ex in examples], dtype=torch.long),
    )
    return batch.to(device) if device is not None else batch


def iterate_batches(
    examples: Sequence[StyleTransferExample],
    batch_size: int,
    rng: Optional[random.Random] = None,
) -> Iterator[List[StyleTransferExample]]:
    """One pass over the examples, shuffled when an rng is given"""
    order = list(range(len(examples)))
    if rng is not None:
        rng.shuffle(order)
    for start in range(0, len(order), batch_size):
        yield [examples[i] for i in order[start : start + batch_size]]


def infinite_batches(
    examples: Sequence[StyleTransferExample], batch_size: int, rng: random.Random
) -> Iterator[List[StyleTransferExample]]:
    while True:
        yield from iterate_batches(examples, batch_size, rng)
