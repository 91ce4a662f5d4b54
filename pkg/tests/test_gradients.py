"""Central-difference checks of the training objectives in float64"""

import numpy as np
import pytest
import torch

from f2r.data.batching import collate_style_batch
from f2r.data.vocab import Vocab
from f2r.models.discriminator import DiscriminatorConfig, StyleDiscriminator
from f2r.models.generator import GeneratorConfig, StyleTransferGenerator
from f2r.training.losses import loss_cycle, loss_self, loss_style

EPS = 1e-6
REL_TOL = 1e-4
N_DRAWS = 20
VOCAB_SIZE = 20


def compare(numeric, analytic, rel_tol=REL_TOL, floor=1e-3):
    err = abs(numeric - analytic) / max(abs(numeric), abs(analytic), floor)
    assert err < rel_tol, f"numeric={numeric} analytic={analytic} rel_err={err}"


@pytest.fixture
def small_vocab(style_examples):
    texts = [ex.history for ex in style_examples] + [ex.response for ex in style_examples]
    vocab = Vocab.build(texts, max_size=VOCAB_SIZE)
    assert len(vocab) == VOCAB_SIZE
    return vocab


@pytest.fixture
def models(small_vocab, randomize_parameters):
    gen = StyleTransferGenerator(
        GeneratorConfig(
            vocab_size=VOCAB_SIZE,
            d_model=16,
            style_dim=16,
            pos_dim=16,
            ffn_dim=16,
            n_encoder_layers=2,
            n_decoder_layers=2,
            n_heads=2,
            max_positions=64,
            dropout=0.0,
        )
    )
    disc = StyleDiscriminator(
        DiscriminatorConfig(
            vocab_size=VOCAB_SIZE,
            d_model=16,
            style_dim=16,
            pos_dim=16,
            hidden_size=16,
            n_layers=2,
            n_heads=2,
            max_positions=64,
            dropout=0.0,
        )
    )
    randomize_parameters(gen, seed=11, scale=0.3)
    randomize_parameters(disc, seed=12, scale=0.3)
    return gen.double().eval(), disc.double().eval()


@pytest.fixture
def batch(style_examples, small_vocab):
    return collate_style_batch(style_examples[:2] + style_examples[4:6], small_vocab)


def _draws(module, n, seed):
    """n (parameter, flat index) pairs, parameters picked proportionally to size"""
    params = [p for p in module.parameters() if p.requires_grad]
    sizes = np.array([p.numel() for p in params], dtype=np.float64)
    rng = np.random.RandomState(seed)
    picks = rng.choice(len(params), size=n, p=sizes / sizes.sum())
    return [(params[i], int(rng.randint(params[i].numel()))) for i in picks]


def check_gradients(module, loss_fn, seed):
    module.zero_grad()
    loss_fn().backward()
    for param, index in _draws(module, N_DRAWS, seed):
        analytic = 0.0 if param.grad is None else float(param.grad.view(-1)[index])
        flat = param.data.view(-1)
        original = float(flat[index])
        with torch.no_grad():
            flat[index] = original + EPS
            plus = float(loss_fn())
            flat[index] = original - EPS
            minus = float(loss_fn())
            flat[index] = original
        compare((plus - minus) / (2 * EPS), analytic)


def test_self_loss_gradients(models, batch):
    gen, _ = models
    check_gradients(gen, lambda: loss_self(gen, batch), seed=0)


def test_cycle_loss_gradients(models, batch):
    gen, _ = models
    check_gradients(gen, lambda: loss_cycle(gen, batch, max_len=4), seed=1)


def test_style_loss_gradients(models, batch):
    gen, disc = models
    check_gradients(gen, lambda: loss_style(gen, disc, batch, max_len=4), seed=2)


def test_style_loss_gradients_reach_discriminator(models, batch):
    gen, disc = models
    check_gradients(disc, lambda: loss_style(gen, disc, batch, max_len=4), seed=3)
