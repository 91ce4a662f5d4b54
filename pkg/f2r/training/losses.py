"""
Objectives of adversarial style transfer

loss_self: teacher-forced NLL of reproducing x in its own style
loss_cycle: x -> soft transfer to the other style -> reconstruct x
loss_style: discriminator confidence that the transfer has the target style
"""

from typing import Optional

import torch
import torch.nn.functional as F

from ..data.batching import StyleBatch
from ..data.vocab import PAD_ID
from ..models.discriminator import StyleDiscriminator
from ..models.generator import SoftSequence, StyleTransferGenerator

STYLE_LOSS_FORMS = ("log", "literal")


def sequence_nll(logits: torch.Tensor, target: torch.Tensor, pad_id: int = PAD_ID) -> torch.Tensor:
    """
    Summed token NLL per sequence

    Args:
        logits: (B, T, V)
        target: (B, T) gold ids; pad_id positions are ignored

    Returns:
        (B,) NLL of each sequence
    """
    log_probs = F.log_softmax(logits, dim=-1)
    nll = -log_probs.gather(-1, target.unsqueeze(-1)).squeeze(-1)
    return (nll * (target != pad_id).to(nll.dtype)).sum(dim=1)


def _check_responses(batch: StyleBatch) -> None:
    if batch.response.size(1) == 0 or not bool((batch.response != PAD_ID).any(dim=1).all()):
        raise ValueError("Every response x must be nonempty")


def _target_styles(batch: StyleBatch, target_styles: Optional[torch.Tensor]) -> torch.Tensor:
    if target_styles is None:
        return 1 - batch.styles
    if bool((target_styles == batch.styles).any()):
        raise ValueError("Target style must differ from the source style")
    return target_styles


def transfer_length(batch: StyleBatch, slack: int = 5, cap: int = 50) -> int:
    """Decode budget for a batch: its longest real response plus slack, capped"""
    longest = int((batch.response != PAD_ID).sum(dim=1).max())
    return max(1, min(cap, longest + slack))


def transfer(
    gen: StyleTransferGenerator,
    batch: StyleBatch,
    target_styles: Optional[torch.Tensor] = None,
    max_len: Optional[int] = None,
    temperature: float = 1.0,
) -> SoftSequence:
    """Soft transfer of every response in the batch to its target style"""
    target_styles = _target_styles(batch, target_styles)
    return gen.forward_soft(
        batch.history,
        batch.response,
        target_styles,
        max_len=max_len or transfer_length(batch),
        temperature=temperature,
    )


def loss_self(gen: StyleTransferGenerator, batch: StyleBatch) -> torch.Tensor:
    _check_responses(batch)
    logits = gen.teacher_forced_logits(
        batch.history, batch.response, batch.styles, batch.decoder_input
    )
    return sequence_nll(logits, batch.target).mean()


def loss_cycle(
    gen: StyleTransferGenerator,
    batch: StyleBatch,
    target_styles: Optional[torch.Tensor] = None,
    soft: Optional[SoftSequence] = None,
    max_len: Optional[int] = None,
    temperature: float = 1.0,
    detach: bool = False,
) -> torch.Tensor:
    """
    Reconstruct x in its source style from the soft transfer; with detach the
    first pass is treated as a constant
    """
    _check_responses(batch)
    if soft is None:
        soft = transfer(gen, batch, target_styles, max_len, temperature)
    probs = soft.probs.detach() if detach else soft.probs
    logits = gen.teacher_forced_logits(
        batch.history, probs, batch.styles, batch.decoder_input, x_mask=soft.mask
    )
    return sequence_nll(logits, batch.target).mean()


def target_style_probability(
    disc: StyleDiscriminator,
    batch: StyleBatch,
    soft: SoftSequence,
    target_styles: torch.Tensor,
) -> torch.Tensor:
    """(B,) discriminator probability of the target style for each transfer"""
    probs = disc.classify(soft.probs, batch.history, x_mask=soft.mask).probs
    return probs.gather(1, target_styles.unsqueeze(1)).squeeze(1)


def style_loss_from_probs(p: torch.Tensor, eps: float = 1e-8, form: str = "log") -> torch.Tensor:
    """-log(max(p, eps)) in log form, -p in literal form; elementwise"""
    if form == "log":
        return -torch.log(p.clamp(min=eps))
    if form == "literal":
        return -p
    raise ValueError(f"style loss form must be one of {STYLE_LOSS_FORMS}, got {form!r}")


def loss_style(
    gen: StyleTransferGenerator,
    disc: StyleDiscriminator,
    batch: StyleBatch,
    target_styles: Optional[torch.Tensor] = None,
    soft: Optional[SoftSequence] = None,
    eps: float = 1e-8,
    form: str = "log",
    max_len: Optional[int] = None,
    temperature: float = 1.0,
) -> torch.Tensor:
    target_styles = _target_styles(batch, target_styles)
    if soft is None:
        soft = transfer(gen, batch, target_styles, max_len, temperature)
    p = target_style_probability(disc, batch, soft, target_styles)
    return style_loss_from_probs(p, eps, form).mean()


def discriminator_loss(logits: torch.Tensor, labels: torch.Tensor) -> torch.Tensor:
    """Mean cross-entropy of (B, 2) logits against style labels"""
    return F.cross_entropy(logits, labels)
