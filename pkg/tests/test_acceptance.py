"""Desk-scale runs on the template corpus; deselected unless run with -m slow"""

import json

import pytest

from f2r.checkpoints import CheckpointManager
from f2r.cli import STYLE_FILES, main
from f2r.data.corpus import StyleLabel, read_style_examples
from f2r.data.vocab import split_tokens
from f2r.models.discriminator import attention_mass

pytestmark = pytest.mark.slow

FILLERS = (("you", "should", "have"), ("you", "could", "have"), ("you", "should"), ("you", "could"))


@pytest.fixture(scope="module")
def trained(tmp_path_factory):
    root = tmp_path_factory.mktemp("e2e")
    data, models = root / "synth", root / "models"
    assert main(["make-synthetic", "--out", str(data), "--synthetic-preset", "--seed", "0"]) == 0
    argv = ["train-f2r", "--data", str(data), "--out", str(models), "--synthetic-preset", "--seed", "0"]
    assert main(argv) == 0
    metrics = json.loads((models / "f2r-metrics.json").read_text())
    return root, data, models, metrics


def test_discriminator_separates_styles(trained):
    *_, metrics = trained
    assert metrics["disc_accuracy"] > 0.95


def test_generator_fools_discriminator(trained):
    *_, metrics = trained
    assert metrics["fooling_rate"] > 0.8


def test_converted_feedback_matches_oracle(trained):
    *_, metrics = trained
    assert metrics["token_f1"] >= 0.7


def test_feed2resp_beats_raw_feedback(trained):
    root, data, models, _ = trained
    out = root / "results"
    argv = ["run-experiment", "--data", str(data), "--out", str(out), "--synthetic-preset", "--seed", "0"]
    argv += ["--settings", "feedback", "feed2resp", "--ckpt", str(models / "f2r-generator.pt")]
    assert main(argv + ["--models-dir", str(models)]) == 0

    feedback = json.loads((out / "report_feedback.json").read_text())
    feed2resp = json.loads((out / "report_feed2resp.json").read_text())
    assert len(feed2resp["test"]) == 3
    assert feed2resp["summary"]["test"]["mean"] >= feedback["summary"]["test"]["mean"]


def _filler_positions(tokens, start):
    response = tokens[start:]
    for filler in FILLERS:
        n = len(filler)
        for i in range(len(response) - n + 1):
            if tuple(response[i : i + n]) == filler:
                return [start + i + j for j in range(n)]
    return []


def test_attention_concentrates_on_filler(trained):
    root, data, models, _ = trained
    disc, vocab = CheckpointManager(models).load_discriminator("f2r-discriminator")
    examples = [
        ex for ex in read_style_examples(data / STYLE_FILES["valid"]) if ex.style == StyleLabel.FEEDBACK
    ]

    checked = above = 0
    for i, ex in enumerate(examples):
        if not _filler_positions(split_tokens(ex.response), 0):
            continue
        doc = disc.export_attention(
            vocab.encode(ex.response), vocab.encode(ex.history), vocab, root / f"attn-{i}.json"
        )
        positions = _filler_positions(doc["tokens"], doc["response_start"])
        checked += 1
        above += attention_mass(doc["layers"], positions) > len(positions) / len(doc["tokens"])

    assert checked > 0
    assert above / checked >= 0.8


def test_training_is_reproducible(trained, tmp_path):
    _, data, models, _ = trained
    argv = ["train-f2r", "--data", str(data), "--out", str(tmp_path), "--synthetic-preset", "--seed", "0"]
    assert main(argv) == 0
    assert (tmp_path / "f2r-metrics.json").read_bytes() == (models / "f2r-metrics.json").read_bytes()
