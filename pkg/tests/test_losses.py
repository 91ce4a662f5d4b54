import math

import pytest
import torch

from f2r.data.batching import collate_style_batch
from f2r.models.generator import SoftSequence
from f2r.training.losses import (
    discriminator_loss,
    loss_cycle,
    loss_self,
    loss_style,
    sequence_nll,
    style_loss_from_probs,
    transfer_length,
)


def test_uniform_nll_is_length_times_log_vocab():
    logits = torch.zeros(1, 3, 10, dtype=torch.float64)
    target = torch.tensor([[5, 6, 7]])
    assert float(sequence_nll(logits, target)) == pytest.approx(3 * math.log(10), abs=1e-9)


def test_nll_ignores_padding():
    logits = torch.zeros(1, 3, 10, dtype=torch.float64)
    target = torch.tensor([[5, 6, 0]])
    assert float(sequence_nll(logits, target)) == pytest.approx(2 * math.log(10), abs=1e-9)


def test_style_loss_at_half():
    assert float(style_loss_from_probs(torch.tensor(0.5))) == pytest.approx(math.log(2))


def test_style_loss_eps_floor():
    assert float(style_loss_from_probs(torch.tensor(0.0, dtype=torch.float64))) == pytest.approx(
        18.420680743952367
    )


def test_style_loss_literal_form():
    p = torch.tensor([0.2, 0.9])
    assert style_loss_from_probs(p, form="literal").tolist() == pytest.approx([-0.2, -0.9])
    with pytest.raises(ValueError):
        style_loss_from_probs(p, form="square")


def test_discriminator_loss_uniform():
    logits = torch.zeros(4, 2)
    labels = torch.tensor([0, 1, 0, 1])
    assert float(discriminator_loss(logits, labels)) == pytest.approx(math.log(2))


def test_untrained_discriminator_style_loss(tiny_generator, tiny_discriminator, style_examples, vocab):
    batch = collate_style_batch(style_examples, vocab)
    loss = loss_style(tiny_generator, tiny_discriminator, batch, max_len=3)
    assert float(loss) == pytest.approx(math.log(2), abs=1e-6)


def test_cycle_with_copy_transfer_equals_self(tiny_generator, style_examples, vocab):
    batch = collate_style_batch(style_examples, vocab)
    copy = SoftSequence.from_ids(batch.response, len(vocab))
    cycle = loss_cycle(tiny_generator, batch, soft=copy)
    torch.testing.assert_close(cycle, loss_self(tiny_generator, batch), rtol=1e-5, atol=1e-5)


def test_self_loss_is_padding_invariant(tiny_generator, style_examples, vocab):
    short, long = style_examples[0], style_examples[5]
    both = loss_self(tiny_generator, collate_style_batch([short, long], vocab))
    alone = (
        loss_self(tiny_generator, collate_style_batch([short], vocab))
        + loss_self(tiny_generator, collate_style_batch([long], vocab))
    ) / 2
    torch.testing.assert_close(both, alone, rtol=1e-5, atol=1e-5)


def test_target_style_must_differ(tiny_generator, tiny_discriminator, style_examples, vocab):
    batch = collate_style_batch(style_examples, vocab)
    with pytest.raises(ValueError):
        loss_style(tiny_generator, tiny_discriminator, batch, target_styles=batch.styles)
    with pytest.raises(ValueError):
        loss_cycle(tiny_generator, batch, target_styles=batch.styles)


def test_transfer_length(style_examples, vocab):
    batch = collate_style_batch(style_examples, vocab)
    longest = int((batch.response != 0).sum(dim=1).max())
    assert transfer_length(batch) == longest + 5
    assert transfer_length(batch, slack=100, cap=9) == 9


def test_detached_cycle_keeps_gradient_on_reconstruction(tiny_generator, style_examples, vocab):
    batch = collate_style_batch(style_examples, vocab)
    loss = loss_cycle(tiny_generator, batch, max_len=3, detach=True)
    loss.backward()
    grad = tiny_generator.token_embedding.weight.grad
    assert grad is not None and float(grad.abs().sum()) > 0
