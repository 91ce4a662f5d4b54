"""
Warm-up stages run before adversarial training

- denoising pretraining of the generator: (h, noised x) -> x
- supervised pretraining of the discriminator on real data
"""

import logging
import random
from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Optional, Sequence

import torch
from torch.nn.utils import clip_grad_norm_
from tqdm import tqdm

from ..data.batching import (
    StyleBatch,
    collate_style_batch,
    encode_pair,
    infinite_batches,
    iterate_batches,
    pad_sequences,
)
from ..data.corpus import StyleTransferExample
from ..data.vocab import BOS_ID, EOS_ID, UNK_ID, Vocab
from ..models.discriminator import StyleDiscriminator
from ..models.generator import StyleTransferGenerator
from .guards import check_finite
from .losses import discriminator_loss, sequence_nll

logger = logging.getLogger(__name__)


@dataclass
class PretrainConfig:
    """
    Generator: `epochs` of denoising (mask_prob UNK masking, tokens moved at
    most shuffle_window positions). Discriminator: `disc_steps` batches of
    real-data cross-entropy.
    """

    epochs: int = 1
    lr: float = 5e-4
    batch_size: int = 32
    mask_prob: float = 0.15
    shuffle_window: int = 3
    disc_steps: int = 0
    disc_lr: float = 1e-4
    grad_clip: float = 5.0
    max_history_len: int = 64
    max_response_len: int = 50
    seed: int = 0

    def __post_init__(self):
        if self.epochs < 0 or self.disc_steps < 0:
            raise ValueError("epochs and disc_steps must be >= 0")
        if not 0.0 <= self.mask_prob < 1.0:
            raise ValueError(f"mask_prob must be in [0, 1), got {self.mask_prob}")
        if self.shuffle_window < 0:
            raise ValueError(f"shuffle_window must be >= 0, got {self.shuffle_window}")
        if self.lr <= 0 or self.disc_lr <= 0 or self.batch_size <= 0:
            raise ValueError("lr, disc_lr and batch_size must be positive")

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def add_noise(
    ids: Sequence[int], mask_prob: float, shuffle_window: int, rng: random.Random
) -> List[int]:
    """Mask tokens with UNK, then shuffle locally (noisy-sort permutation)"""
    noised = [UNK_ID if rng.random() < mask_prob else t for t in ids]
    if shuffle_window > 0:
        keys = [i + rng.uniform(0, shuffle_window + 1) for i in range(len(noised))]
        noised = [t for _, t in sorted(zip(keys, noised), key=lambda kv: kv[0])]
    return noised


def _noised_batch(
    examples: Sequence[StyleTransferExample],
    vocab: Vocab,
    config: PretrainConfig,
    rng: random.Random,
) -> StyleBatch:
    histories, clean, noisy = [], [], []
    for ex in examples:
        h, x = encode_pair(
            ex.history, ex.response, vocab, config.max_history_len, config.max_response_len
        )
        histories.append(h)
        clean.append(x)
        noisy.append(add_noise(x, config.mask_prob, config.shuffle_window, rng))
    return StyleBatch(
        history=pad_sequences(histories),
        response=pad_sequences(noisy),
        decoder_input=pad_sequences([[BOS_ID] + x for x in clean]),
        target=pad_sequences([x + [EOS_ID] for x in clean]),
        styles=torch.tensor([int(ex.style) for ex in examples], dtype=torch.long),
    )


def pretrain_generator(
    gen: StyleTransferGenerator,
    examples: Sequence[StyleTransferExample],
    vocab: Vocab,
    config: PretrainConfig,
    device: Optional[torch.device] = None,
    progress: bool = False,
) -> List[float]:
    """
    Denoising pretraining in place

    Returns:
        mean per-sequence NLL of every epoch
    """
    if not examples:
        raise ValueError("Pretraining corpus is empty")
    if config.epochs == 0:
        return []

    rng = random.Random(config.seed)
    optimizer = torch.optim.AdamW(gen.parameters(), lr=config.lr)
    gen.train()

    epoch_losses = []
    for epoch in tqdm(range(config.epochs), desc="pretrain", disable=not progress):
        total, count = 0.0, 0
        for chunk in iterate_batches(examples, config.batch_size, rng):
            batch = _noised_batch(chunk, vocab, config, rng)
            if device is not None:
                batch = batch.to(device)
            logits = gen.teacher_forced_logits(
                batch.history, batch.response, batch.styles, batch.decoder_input
            )
            loss = sequence_nll(logits, batch.target).mean()
            check_finite(epoch, loss_self=loss.item())

            optimizer.zero_grad()
            loss.backward()
            clip_grad_norm_(gen.parameters(), config.grad_clip)
            optimizer.step()

            total += loss.item() * len(chunk)
            count += len(chunk)
        epoch_losses.append(total / count)
        logger.debug(f"pretrain epoch {epoch + 1}: nll={epoch_losses[-1]:.4f}")

    logger.info(f"Generator pretraining done: final nll={epoch_losses[-1]:.4f}")
    return epoch_losses


@torch.no_grad()
def reconstruction_nll(
    gen: StyleTransferGenerator,
    examples: Sequence[StyleTransferExample],
    vocab: Vocab,
    batch_size: int = 64,
    max_history_len: int = 64,
    max_response_len: int = 50,
) -> float:
    """Mean per-sequence NLL of reproducing each clean response in its own style"""
    if not examples:
        raise ValueError("No examples to evaluate")
    was_training = gen.training
    gen.eval()
    device = gen.token_embedding.weight.device
    total = 0.0
    for chunk in iterate_batches(examples, batch_size):
        batch = collate_style_batch(chunk, vocab, max_history_len, max_response_len, device)
        logits = gen.teacher_forced_logits(
            batch.history, batch.response, batch.styles, batch.decoder_input
        )
        total += sequence_nll(logits, batch.target).sum().item()
    gen.train(was_training)
    return total / len(examples)


def pretrain_discriminator(
    disc: StyleDiscriminator,
    examples: Sequence[StyleTransferExample],
    vocab: Vocab,
    steps: int,
    lr: float = 1e-4,
    batch_size: int = 32,
    seed: int = 0,
    max_history_len: int = 64,
    max_response_len: int = 50,
    progress: bool = False,
) -> List[float]:
    """Supervised style classification on real examples; returns per-step losses"""
    if not examples:
        raise ValueError("Discriminator corpus is empty")
    if steps == 0:
        return []

    batches = infinite_batches(examples, batch_size, random.Random(seed))
    optimizer = torch.optim.AdamW(disc.parameters(), lr=lr)
    device = disc.query.device
    disc.train()

    losses = []
    for step in tqdm(range(1, steps + 1), desc="disc-pretrain", disable=not progress):
        batch = collate_style_batch(
            next(batches), vocab, max_history_len, max_response_len, device
        )
        loss = discriminator_loss(disc(batch.response, batch.history), batch.styles)
        check_finite(step, disc_loss=loss.item())
        optimizer.zero_grad()
        loss.backward()
        clip_grad_norm_(disc.parameters(), 5.0)
        optimizer.step()
        losses.append(loss.item())

    logger.info(f"Discriminator pretraining done: last loss={losses[-1]:.4f}")
    return losses


@torch.no_grad()
def accuracy(
    disc: StyleDiscriminator,
    examples: Sequence[StyleTransferExample],
    vocab: Vocab,
    batch_size: int = 64,
    max_history_len: int = 64,
    max_response_len: int = 50,
) -> float:
    """Held-out classification accuracy on real examples"""
    if not examples:
        raise ValueError("No examples to evaluate")
    was_training = disc.training
    disc.eval()
    device = disc.query.device
    correct = 0
    for chunk in iterate_batches(examples, batch_size):
        batch = collate_style_batch(chunk, vocab, max_history_len, max_response_len, device)
        predicted = disc.classify(batch.response, batch.history).predicted
        correct += int((predicted == batch.styles).sum())
    disc.train(was_training)
    return correct / len(examples)
