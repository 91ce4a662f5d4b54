"""
Adversarial feedback-to-response training

Alternates discriminator updates (real data plus detached transfers labeled
with their source style) with generator updates on the weighted sum of the
self-reconstruction, cycle and style losses.
"""

import csv
import json
import logging
import random
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import TYPE_CHECKING, Any, Dict, List, Optional, Sequence, Tuple, Union

import torch
from torch.nn.utils import clip_grad_norm_
from tqdm import tqdm
from transformers import get_linear_schedule_with_warmup

from ..data.batching import StyleBatch, collate_style_batch, infinite_batches, iterate_batches, pad_sequences
from ..data.corpus import StyleLabel, StyleTransferExample
from ..data.vocab import Vocab
from ..evaluation.metrics import token_f1
from ..models.discriminator import StyleDiscriminator
from ..models.generator import StyleTransferGenerator
from ..utils import seed_everything
from .guards import check_finite
from .losses import (
    STYLE_LOSS_FORMS,
    discriminator_loss,
    loss_cycle,
    loss_self,
    style_loss_from_probs,
    target_style_probability,
    transfer,
    transfer_length,
)

if TYPE_CHECKING:
    from ..checkpoints import CheckpointManager

logger = logging.getLogger(__name__)


@dataclass
class TrainConfig:
    """
    Adversarial training settings

    gen_lr / disc_lr: AdamW learning rates (5e-6 / 1e-4)
    w_self, w_cycle, w_style: loss weights (1.0 each)
    disc_steps_per_gen_step: discriminator updates before each generator update
    eps: probability floor of the log-form style loss
    style_loss_form: "log" (-log p) or "literal" (-p)
    detach_cycle: stop gradients through the first pass of the cycle
    length_slack / max_len: soft transfers decode longest(x) + slack steps, capped
    checkpoint_every: save every K steps (0 = only at the end)
    """

    gen_lr: float = 5e-6
    disc_lr: float = 1e-4
    weight_decay: float = 0.01
    w_self: float = 1.0
    w_cycle: float = 1.0
    w_style: float = 1.0
    batch_size: int = 32
    steps: int = 2000
    disc_steps_per_gen_step: int = 1
    eps: float = 1e-8
    style_loss_form: str = "log"
    detach_cycle: bool = False
    temperature: float = 1.0
    length_slack: int = 5
    max_len: int = 50
    warmup_steps: int = 0
    grad_clip: float = 5.0
    checkpoint_every: int = 0
    log_every: int = 50
    max_history_len: int = 64
    seed: int = 0

    def __post_init__(self):
        if self.gen_lr <= 0 or self.disc_lr <= 0:
            raise ValueError(f"Learning rates must be positive: {self.gen_lr}, {self.disc_lr}")
        if min(self.w_self, self.w_cycle, self.w_style) < 0:
            raise ValueError("Loss weights must be >= 0")
        if not 0 < self.eps <= 1e-4:
            raise ValueError(f"eps must be in (0, 1e-4], got {self.eps}")
        if self.style_loss_form not in STYLE_LOSS_FORMS:
            raise ValueError(
                f"style_loss_form must be one of {STYLE_LOSS_FORMS}, got {self.style_loss_form!r}"
            )
        if self.disc_steps_per_gen_step < 1:
            raise ValueError("disc_steps_per_gen_step must be >= 1")
        if self.steps < 0 or self.batch_size < 1 or self.max_len < 1:
            raise ValueError("steps must be >= 0, batch_size and max_len >= 1")

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class LossBreakdown:
    step: int
    loss_self: float
    loss_cycle: float
    loss_style: float
    total: float
    disc_loss: float
    fooling_rate: float


HISTORY_FIELDS = ("step", "loss_self", "loss_cycle", "loss_style", "disc_loss", "fooling_rate")


@dataclass
class ConverterReport:
    fooling_rate: float
    token_f1: Optional[float]
    n: int
    outputs: List[str]

    def to_dict(self) -> Dict[str, Any]:
        return {"fooling_rate": self.fooling_rate, "token_f1": self.token_f1, "n": self.n}


class F2RTrainer:
    """Owns the two models, their optimizers and the loss history"""

    def __init__(
        self,
        generator: StyleTransferGenerator,
        discriminator: StyleDiscriminator,
        vocab: Vocab,
        config: TrainConfig,
        checkpoint_manager: Optional["CheckpointManager"] = None,
        run_name: str = "f2r",
    ):
        self.generator = generator
        self.discriminator = discriminator
        self.vocab = vocab
        self.config = config
        self.checkpoint_manager = checkpoint_manager
        self.run_name = run_name

        self.gen_optimizer = torch.optim.AdamW(
            generator.parameters(), lr=config.gen_lr, weight_decay=config.weight_decay
        )
        self.disc_optimizer = torch.optim.AdamW(
            discriminator.parameters(), lr=config.disc_lr, weight_decay=config.weight_decay
        )
        self.scheduler = get_linear_schedule_with_warmup(
            self.gen_optimizer, config.warmup_steps, max(1, config.steps)
        )
        self.history: List[LossBreakdown] = []

    @property
    def device(self) -> torch.device:
        return self.generator.token_embedding.weight.device

    def collate(self, examples: Sequence[StyleTransferExample]) -> StyleBatch:
        return collate_style_batch(
            examples, self.vocab, self.config.max_history_len, self.config.max_len, self.device
        )

    def _max_len(self, batch: StyleBatch) -> int:
        return transfer_length(batch, self.config.length_slack, self.config.max_len)

    def discriminator_step(self, batch: StyleBatch) -> float:
        """
        One update on real responses (their own labels) and detached
        transfers labeled with their source style
        """
        gen, disc = self.generator, self.discriminator
        gen.eval()
        disc.train()
        with torch.no_grad():
            soft = transfer(gen, batch, 1 - batch.styles, self._max_len(batch), self.config.temperature)

        real_logits = disc(batch.response, batch.history)
        fake_logits = disc(soft.probs, batch.history, x_mask=soft.mask)
        loss = discriminator_loss(
            torch.cat([real_logits, fake_logits]), torch.cat([batch.styles, batch.styles])
        )

        self.disc_optimizer.zero_grad()
        loss.backward()
        clip_grad_norm_(disc.parameters(), self.config.grad_clip)
        self.disc_optimizer.step()
        gen.train()
        return loss.item()

    def generator_step(self, batch: StyleBatch, step: int) -> Tuple[float, float, float, float, float]:
        """
        One update on w_self * self + w_cycle * cycle + w_style * style

        Returns:
            (loss_self, loss_cycle, loss_style, total, fooling_rate)
        """
        cfg = self.config
        gen, disc = self.generator, self.discriminator
        gen.train()
        disc.eval()

        target = 1 - batch.styles
        l_self = loss_self(gen, batch)
        soft = transfer(gen, batch, target, self._max_len(batch), cfg.temperature)
        l_cycle = loss_cycle(gen, batch, target, soft=soft, detach=cfg.detach_cycle)
        p_target = target_style_probability(disc, batch, soft, target)
        l_style = style_loss_from_probs(p_target, cfg.eps, cfg.style_loss_form).mean()
        total = cfg.w_self * l_self + cfg.w_cycle * l_cycle + cfg.w_style * l_style

        check_finite(
            step,
            loss_self=l_self.item(),
            loss_cycle=l_cycle.item(),
            loss_style=l_style.item(),
            total=total.item(),
        )

        self.gen_optimizer.zero_grad()
        total.backward()
        clip_grad_norm_(gen.parameters(), cfg.grad_clip)
        self.gen_optimizer.step()
        self.scheduler.step()
        disc.train()

        fooling = float((p_target > 0.5).float().mean())
        return l_self.item(), l_cycle.item(), l_style.item(), total.item(), fooling

    def train(
        self, examples: Sequence[StyleTransferExample], progress: bool = False
    ) -> List[LossBreakdown]:
        """Run config.steps alternating updates over the style corpus"""
        cfg = self.config
        styles = {ex.style for ex in examples}
        if styles != {StyleLabel.NATURAL, StyleLabel.FEEDBACK}:
            raise ValueError("Adversarial training needs examples of both styles")

        seed_everything(cfg.seed)
        batches = infinite_batches(examples, cfg.batch_size, random.Random(cfg.seed))

        for step in tqdm(range(1, cfg.steps + 1), desc="f2r", disable=not progress):
            disc_losses = [
                self.discriminator_step(self.collate(next(batches)))
                for _ in range(cfg.disc_steps_per_gen_step)
            ]
            l_self, l_cycle, l_style, total, fooling = self.generator_step(
                self.collate(next(batches)), step
            )
            record = LossBreakdown(
                step=step,
                loss_self=l_self,
                loss_cycle=l_cycle,
                loss_style=l_style,
                total=total,
                disc_loss=sum(disc_losses) / len(disc_losses),
                fooling_rate=fooling,
            )
            self.history.append(record)

            if cfg.log_every and step % cfg.log_every == 0:
                logger.info(
                    f"step {step}: self={l_self:.4f} cycle={l_cycle:.4f} style={l_style:.4f} "
                    f"total={total:.4f} disc={record.disc_loss:.4f} fool={fooling:.3f}"
                )
            if cfg.checkpoint_every and step % cfg.checkpoint_every == 0:
                self.save_checkpoints(f"{self.run_name}-step{step}")

        if cfg.steps and self.checkpoint_manager is not None:
            self.save_checkpoints(self.run_name)
        return self.history

    def save_checkpoints(self, name: str) -> None:
        if self.checkpoint_manager is None:
            return
        extra = {"steps": len(self.history), "train_config": self.config.to_dict()}
        self.checkpoint_manager.save(f"{name}-generator", self.generator, self.vocab, extra)
        self.checkpoint_manager.save(f"{name}-discriminator", self.discriminator, self.vocab, extra)

    def save_history(self, path: Union[str, Path]) -> None:
        """Loss history as CSV plus a JSON copy beside it"""
        write_loss_history(path, self.history)


def write_loss_history(path: Union[str, Path], history: Sequence[LossBreakdown]) -> None:
    path = Path(path)
    with path.open("w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(HISTORY_FIELDS)
        for record in history:
            writer.writerow([getattr(record, name) for name in HISTORY_FIELDS])
    path.with_suffix(".json").write_text(
        json.dumps([asdict(r) for r in history], indent=2) + "\n"
    )


def read_loss_history(path: Union[str, Path]) -> List[LossBreakdown]:
    """Read the JSON copy written by write_loss_history"""
    records = json.loads(Path(path).with_suffix(".json").read_text())
    names = {f.name for f in fields(LossBreakdown)}
    return [LossBreakdown(**{k: v for k, v in r.items() if k in names}) for r in records]


def train(
    gen: StyleTransferGenerator,
    disc: StyleDiscriminator,
    corpus: Sequence[StyleTransferExample],
    vocab: Vocab,
    config: TrainConfig,
    checkpoint_manager: Optional["CheckpointManager"] = None,
    progress: bool = False,
) -> Tuple[StyleTransferGenerator, StyleDiscriminator, List[LossBreakdown]]:
    trainer = F2RTrainer(gen, disc, vocab, config, checkpoint_manager)
    history = trainer.train(corpus, progress=progress)
    return gen, disc, history


@torch.no_grad()
def evaluate_converter(
    gen: StyleTransferGenerator,
    disc: StyleDiscriminator,
    examples: Sequence[StyleTransferExample],
    vocab: Vocab,
    references: Optional[Sequence[str]] = None,
    max_len: int = 50,
    repetition_penalty: float = 2.0,
    max_history_len: int = 64,
    batch_size: int = 64,
) -> ConverterReport:
    """
    Hard-convert feedback examples to natural responses and measure how often
    the discriminator takes them for natural ones; token F1 against references
    when given (aligned with examples)
    """
    if any(ex.style != StyleLabel.FEEDBACK for ex in examples):
        raise ValueError("evaluate_converter expects feedback examples only")
    if references is not None and len(references) != len(examples):
        raise ValueError("references must align with examples")
    if not examples:
        raise ValueError("No examples to evaluate")

    gen_mode, disc_mode = gen.training, disc.training
    gen.eval()
    disc.eval()
    device = gen.token_embedding.weight.device

    outputs: List[str] = []
    fooled = 0
    for chunk in iterate_batches(examples, batch_size):
        batch = collate_style_batch(chunk, vocab, max_history_len, max_len, device)
        natural = torch.full_like(batch.styles, int(StyleLabel.NATURAL))
        ids = gen.generate(batch.history, batch.response, natural, max_len, repetition_penalty)
        converted = pad_sequences(ids).to(device)
        predicted = disc.classify(converted, batch.history).predicted
        fooled += int((predicted == int(StyleLabel.NATURAL)).sum())
        outputs.extend(vocab.decode(seq) for seq in ids)

    gen.train(gen_mode)
    disc.train(disc_mode)

    f1 = None
    if references is not None:
        f1 = sum(token_f1(o, r) for o, r in zip(outputs, references)) / len(outputs)
    return ConverterReport(fooling_rate=fooled / len(examples), token_f1=f1, n=len(examples), outputs=outputs)
