import csv
import math
import random

import pytest
import torch

from f2r.checkpoints import CheckpointManager
from f2r.data.corpus import StyleLabel
from f2r.models.discriminator import DiscriminatorConfig, StyleDiscriminator
from f2r.models.generator import GeneratorConfig, StyleTransferGenerator
from f2r.training.adversarial import (
    HISTORY_FIELDS,
    F2RTrainer,
    LossBreakdown,
    TrainConfig,
    evaluate_converter,
    read_loss_history,
    write_loss_history,
)
from f2r.training.guards import TrainingDivergedError, check_finite
from f2r.training.pretrain import (
    PretrainConfig,
    accuracy,
    add_noise,
    pretrain_discriminator,
    pretrain_generator,
)


def _models(vocab, seed=0):
    torch.manual_seed(seed)
    gen = StyleTransferGenerator(
        GeneratorConfig(
            vocab_size=len(vocab),
            d_model=16,
            style_dim=16,
            pos_dim=16,
            ffn_dim=32,
            n_encoder_layers=1,
            n_decoder_layers=1,
            n_heads=2,
            dropout=0.0,
        )
    )
    disc = StyleDiscriminator(
        DiscriminatorConfig(
            vocab_size=len(vocab),
            d_model=16,
            style_dim=16,
            pos_dim=16,
            hidden_size=16,
            n_layers=1,
            n_heads=2,
            dropout=0.0,
        )
    )
    return gen, disc


def _config(**overrides):
    base = dict(gen_lr=1e-3, disc_lr=1e-3, batch_size=4, steps=3, max_len=8, log_every=0, seed=7)
    base.update(overrides)
    return TrainConfig(**base)


def test_train_config_validation():
    with pytest.raises(ValueError):
        TrainConfig(eps=0.1)
    with pytest.raises(ValueError):
        TrainConfig(style_loss_form="square")
    with pytest.raises(ValueError):
        TrainConfig(w_style=-1.0)
    with pytest.raises(ValueError):
        TrainConfig(disc_steps_per_gen_step=0)


def test_history_has_one_record_per_step(style_examples, vocab):
    gen, disc = _models(vocab)
    history = F2RTrainer(gen, disc, vocab, _config()).train(style_examples)
    assert [r.step for r in history] == [1, 2, 3]
    for record in history:
        assert all(math.isfinite(v) for v in (record.loss_self, record.loss_cycle, record.loss_style))
        assert 0.0 <= record.fooling_rate <= 1.0
        assert record.total == pytest.approx(record.loss_self + record.loss_cycle + record.loss_style)


def test_same_seed_same_history(style_examples, vocab):
    first = F2RTrainer(*_models(vocab), vocab, _config()).train(style_examples)
    second = F2RTrainer(*_models(vocab), vocab, _config()).train(style_examples)
    assert first == second


def test_zero_steps_leaves_models_unchanged(style_examples, vocab):
    gen, disc = _models(vocab)
    before = {k: v.clone() for k, v in gen.state_dict().items()}
    history = F2RTrainer(gen, disc, vocab, _config(steps=0)).train(style_examples)
    assert history == []
    assert all(torch.equal(before[k], v) for k, v in gen.state_dict().items())


def test_needs_both_styles(style_examples, vocab):
    natural = [ex for ex in style_examples if ex.style == StyleLabel.NATURAL]
    with pytest.raises(ValueError):
        F2RTrainer(*_models(vocab), vocab, _config()).train(natural)


def test_checkpoints_written(tmp_path, style_examples, vocab):
    manager = CheckpointManager(tmp_path)
    trainer = F2RTrainer(*_models(vocab), vocab, _config(checkpoint_every=2), manager, run_name="run")
    trainer.train(style_examples)
    assert manager.list_checkpoints() == [
        "run-discriminator",
        "run-generator",
        "run-step2-discriminator",
        "run-step2-generator",
    ]
    gen, loaded_vocab = manager.load_generator("run-generator")
    assert loaded_vocab == vocab
    assert isinstance(gen, StyleTransferGenerator)


def test_loss_history_files(tmp_path):
    history = [
        LossBreakdown(
            step=1,
            loss_self=2.0,
            loss_cycle=3.0,
            loss_style=0.5,
            total=5.5,
            disc_loss=0.7,
            fooling_rate=0.25,
        )
    ]
    path = tmp_path / "losses.csv"
    write_loss_history(path, history)
    with path.open() as f:
        rows = list(csv.reader(f))
    assert tuple(rows[0]) == HISTORY_FIELDS
    assert rows[1][0] == "1"
    assert read_loss_history(path) == history


def test_evaluate_converter(style_examples, vocab):
    gen, disc = _models(vocab)
    feedback = [ex for ex in style_examples if ex.style == StyleLabel.FEEDBACK]
    references = ["i am 30"] * len(feedback)
    report = evaluate_converter(gen.eval(), disc.eval(), feedback, vocab, references=references, max_len=5)
    assert report.n == 4
    assert len(report.outputs) == 4
    assert 0.0 <= report.fooling_rate <= 1.0
    assert 0.0 <= report.token_f1 <= 1.0
    assert set(report.to_dict()) == {"fooling_rate", "token_f1", "n"}


def test_evaluate_converter_rejects_natural(style_examples, vocab):
    gen, disc = _models(vocab)
    with pytest.raises(ValueError):
        evaluate_converter(gen, disc, style_examples, vocab)
    with pytest.raises(ValueError):
        evaluate_converter(gen, disc, [], vocab)


def test_check_finite():
    check_finite(3, loss_self=1.0)
    with pytest.raises(TrainingDivergedError) as err:
        check_finite(3, loss_self=float("nan"), loss_cycle=1.0)
    assert err.value.step == 3
    assert "loss_self" in err.value.losses


class TestPretraining:
    def test_add_noise_is_a_permutation_without_masking(self):
        ids = list(range(10, 30))
        noised = add_noise(ids, 0.0, 3, random.Random(0))
        assert sorted(noised) == ids
        for original_pos, token in enumerate(ids):
            assert abs(noised.index(token) - original_pos) <= 3

    def test_add_noise_identity(self):
        assert add_noise([5, 6, 7], 0.0, 0, random.Random(0)) == [5, 6, 7]

    def test_generator_pretraining_lowers_nll(self, style_examples, vocab):
        gen, _ = _models(vocab)
        config = PretrainConfig(epochs=15, lr=3e-3, batch_size=8, mask_prob=0.0, shuffle_window=0)
        losses = pretrain_generator(gen, style_examples, vocab, config)
        assert len(losses) == 15
        assert losses[-1] < losses[0]

    def test_zero_epochs(self, style_examples, vocab):
        gen, _ = _models(vocab)
        assert pretrain_generator(gen, style_examples, vocab, PretrainConfig(epochs=0)) == []

    def test_discriminator_pretraining(self, style_examples, vocab):
        _, disc = _models(vocab)
        losses = pretrain_discriminator(disc, style_examples, vocab, steps=40, lr=3e-3, batch_size=8)
        assert len(losses) == 40
        assert accuracy(disc, style_examples, vocab) >= 0.75
