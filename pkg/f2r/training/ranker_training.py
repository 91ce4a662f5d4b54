"""
Ranker training: cross-entropy of the gold response against negatives
"""

import logging
import random
from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import torch
import torch.nn.functional as F
from torch.nn.utils import clip_grad_norm_
from tqdm import tqdm

from ..data.batching import pad_sequences
from ..data.ranking import RankingExample
from ..data.vocab import UNK_ID, Vocab
from ..models.ranker import Ranker
from ..utils import seed_everything
from .guards import check_finite

logger = logging.getLogger(__name__)

NEGATIVE_MODES = ("batch", "provided")


@dataclass
class RankerTrainConfig:
    """
    lr: Adamax learning rate; None picks the architecture default
        (2.5e-3 bi-encoder, 5e-5 poly-encoder)
    negatives: "batch" (other gold responses in the batch, needs
        batch_size >= 2) or "provided" (each example's own candidate list)
    steps: optimizer steps; None runs `epochs` passes instead
    """

    lr: Optional[float] = None
    batch_size: int = 32
    epochs: int = 10
    steps: Optional[int] = None
    negatives: str = "batch"
    max_context_len: int = 128
    max_candidate_len: int = 50
    grad_clip: float = 1.0
    log_every: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.negatives not in NEGATIVE_MODES:
            raise ValueError(f"negatives must be one of {NEGATIVE_MODES}, got {self.negatives!r}")
        if self.lr is not None and self.lr <= 0:
            raise ValueError(f"lr must be positive, got {self.lr}")
        if self.batch_size < 1 or self.epochs < 0 or (self.steps is not None and self.steps < 0):
            raise ValueError("batch_size must be >= 1, epochs and steps >= 0")
        if self.negatives == "batch" and self.batch_size < 2:
            raise ValueError("In-batch negatives need batch_size >= 2")

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _encode(vocab: Vocab, texts: Sequence[str], limit: int, keep_tail: bool) -> torch.Tensor:
    seqs = []
    for text in texts:
        ids = vocab.encode(text) or [UNK_ID]
        seqs.append(ids[-limit:] if keep_tail else ids[:limit])
    return pad_sequences(seqs)


def _batch_loss(
    model: Ranker,
    vocab: Vocab,
    batch: Sequence[RankingExample],
    config: RankerTrainConfig,
    device: torch.device,
) -> torch.Tensor:
    contexts = _encode(vocab, [ex.context for ex in batch], config.max_context_len, True).to(device)

    if config.negatives == "batch":
        golds = [ex.response for ex in batch]
        candidates = _encode(vocab, golds, config.max_candidate_len, False).to(device)
        scores = model(contexts, candidates)
        # repeated gold responses are not negatives for each other
        same = torch.tensor(
            [[a == b and i != j for j, b in enumerate(golds)] for i, a in enumerate(golds)],
            device=device,
        )
        scores = scores.masked_fill(same, float("-inf"))
        labels = torch.arange(len(batch), device=device)
        return F.cross_entropy(scores, labels)

    losses = []
    for i, ex in enumerate(batch):
        candidates = _encode(vocab, ex.candidates, config.max_candidate_len, False).to(device)
        scores = model(contexts[i : i + 1], candidates)
        losses.append(F.cross_entropy(scores, torch.tensor([ex.correct_index], device=device)))
    return torch.stack(losses).mean()


def train_ranker(
    model: Ranker,
    examples: Sequence[RankingExample],
    vocab: Vocab,
    config: RankerTrainConfig,
    progress: bool = False,
) -> Tuple[Ranker, List[float]]:
    """
    Train in place with Adamax

    Returns:
        the model and its per-step losses
    """
    if not examples:
        raise ValueError("Ranker training corpus is empty")
    if config.negatives == "batch" and len(examples) < 2:
        raise ValueError("In-batch negatives need at least 2 training examples")

    seed_everything(config.seed)
    rng = random.Random(config.seed)
    lr = config.lr if config.lr is not None else model.config.default_lr
    optimizer = torch.optim.Adamax(model.parameters(), lr=lr)
    device = model.codes.device

    per_epoch = (len(examples) + config.batch_size - 1) // config.batch_size
    total_steps = config.steps if config.steps is not None else config.epochs * per_epoch

    order: List[int] = []
    losses: List[float] = []
    model.train()
    for step in tqdm(range(1, total_steps + 1), desc="ranker", disable=not progress):
        if len(order) < config.batch_size:
            fresh = list(range(len(examples)))
            rng.shuffle(fresh)
            order.extend(fresh)
        batch = [examples[i] for i in order[: config.batch_size]]
        del order[: config.batch_size]

        loss = _batch_loss(model, vocab, batch, config, device)
        check_finite(step, ranker_loss=loss.item())
        optimizer.zero_grad()
        loss.backward()
        clip_grad_norm_(model.parameters(), config.grad_clip)
        optimizer.step()
        losses.append(loss.item())

        if config.log_every and step % config.log_every == 0:
            logger.info(f"ranker step {step}/{total_steps}: loss={loss.item():.4f}")

    if losses:
        logger.info(f"Ranker training done: {total_steps} steps, final loss={losses[-1]:.4f}")
    return model, losses
