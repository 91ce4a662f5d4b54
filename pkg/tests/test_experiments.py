import csv

import pytest
import torch

from f2r.converters.f2r_converter import F2RConverter
from f2r.converters.heuristic_converter import HeuristicConverter
from f2r.converters.passthrough_converter import PassthroughConverter
from f2r.experiments.settings import (
    ExperimentSpec,
    Setting,
    SettingReport,
    build_setting_corpus,
    build_vocab,
    converter_for,
    run_setting,
    synthetic_experiment_data,
    to_training_examples,
    write_aggregate_csv,
)
from f2r.experiments.synthetic import SyntheticSpec, make_synthetic_corpus
from f2r.training.ranker_training import RankerTrainConfig

TINY_RANKER = dict(architecture="bi", d_model=16, ffn_dim=32, n_layers=1, n_heads=2, dropout=0.0)


@pytest.fixture(scope="module")
def experiment_data():
    corpus = make_synthetic_corpus(SyntheticSpec(n_dialogue=120, n_feedback=60, n_heldout=200, seed=1))
    return synthetic_experiment_data(corpus, n_candidates=20, seed=0)


def _spec(setting, seeds=(0,)):
    return ExperimentSpec(
        setting=setting,
        seeds=seeds,
        ranker=TINY_RANKER,
        ranker_training=RankerTrainConfig(lr=1e-3, batch_size=16, steps=3, log_every=0),
    )


def test_converter_for_each_setting(tiny_generator, vocab):
    assert converter_for(Setting.NOFEEDBACK) is None
    assert isinstance(converter_for(Setting.FEEDBACK), PassthroughConverter)
    assert isinstance(converter_for("heuristic"), HeuristicConverter)
    with pytest.raises(ValueError):
        converter_for(Setting.FEED2RESP)
    converter = F2RConverter(tiny_generator, vocab, max_len=4)
    assert converter_for(Setting.FEED2RESP, converter) is converter


def test_build_setting_corpus(dialogue, feedback):
    assert build_setting_corpus(Setting.NOFEEDBACK, dialogue, feedback) == dialogue
    raw = build_setting_corpus(Setting.FEEDBACK, dialogue, feedback)
    assert raw[len(dialogue) :] == feedback
    converted = build_setting_corpus(Setting.HEURISTIC, dialogue, feedback)
    assert [c.final_response for c in converted[len(dialogue) :]] == [
        "i am 30",
        "my favorite food is pizza",
        "i have a dog",
        "i live in paris",
    ]
    assert [c.turns for c in converted[len(dialogue) :]] == [c.turns for c in feedback]


def test_training_examples_and_vocab(dialogue):
    examples = to_training_examples(dialogue)
    assert [ex.response for ex in examples] == [c.final_response for c in dialogue]
    assert all(len(ex.candidates) == 1 for ex in examples)
    vocab = build_vocab(dialogue)
    assert "paris" in vocab and "[P1]" in vocab


def test_experiment_data_halves(experiment_data):
    assert len(experiment_data.valid) == 100
    assert len(experiment_data.test) == 100
    assert all(len(ex.candidates) == 20 for ex in experiment_data.valid)


def test_spec_needs_seeds():
    with pytest.raises(ValueError):
        ExperimentSpec(setting="heuristic", seeds=())
    with pytest.raises(ValueError):
        ExperimentSpec(setting="unknown")


def test_run_setting_report(experiment_data):
    report = run_setting(_spec(Setting.HEURISTIC, seeds=(0, 1)), experiment_data)
    assert report.setting == "heuristic"
    assert report.architecture == "bi"
    assert report.seeds == [0, 1]
    assert len(report.dev) == len(report.test) == 2
    assert all(0.0 <= v <= 1.0 for v in report.dev + report.test)
    assert report.n_train == len(experiment_data.dialogue) + len(experiment_data.feedback)
    data = report.to_dict()
    assert data["dev"] == report.dev
    assert set(data["summary"]) == {"dev", "test"}
    assert set(data["summary"]["dev"]) == {"mean", "variance"}


def test_same_seed_identical_reports(experiment_data):
    first = run_setting(_spec(Setting.NOFEEDBACK), experiment_data)
    second = run_setting(_spec(Setting.NOFEEDBACK), experiment_data)
    assert first == second


def test_feed2resp_requires_converter(experiment_data):
    with pytest.raises(ValueError):
        run_setting(_spec(Setting.FEED2RESP), experiment_data)


def test_report_save_load(tmp_path):
    report = SettingReport("feedback", "bi", [0, 1], [0.1, 0.3], [0.2, 0.2], 10, 5, 5)
    path = tmp_path / "report.json"
    report.save(path)
    assert SettingReport.load(path) == report
    summary = report.summary()
    assert summary["dev"]["mean"] == pytest.approx(0.2)
    assert summary["dev"]["variance"] == pytest.approx(0.01)
    assert summary["test"]["variance"] == 0.0


def test_aggregate_csv(tmp_path):
    reports = [
        SettingReport("nofeedback", "bi", [0], [0.1], [0.2], 10, 5, 5),
        SettingReport("heuristic", "bi", [0], [0.3], [0.4], 12, 5, 5),
    ]
    path = tmp_path / "results.csv"
    write_aggregate_csv(reports, path)
    with path.open() as f:
        rows = list(csv.reader(f))
    assert rows[0] == ["setting", "split", "mean", "variance"]
    assert [r[:2] for r in rows[1:]] == [
        ["nofeedback", "dev"],
        ["nofeedback", "test"],
        ["heuristic", "dev"],
        ["heuristic", "test"],
    ]
    assert float(rows[3][2]) == pytest.approx(0.3)


class TestF2RConverter:
    def test_vocab_mismatch(self, tiny_generator, dialogue):
        with pytest.raises(ValueError):
            F2RConverter(tiny_generator, build_vocab(dialogue[:1]))

    def test_outputs_nonempty_and_histories_kept(self, tiny_generator, vocab, feedback):
        converted = F2RConverter(tiny_generator, vocab, max_len=4).convert_conversations(feedback)
        assert len(converted) == len(feedback)
        assert all(c.final_response for c in converted)
        assert [c.turns for c in converted] == [c.turns for c in feedback]

    def test_deterministic(self, tiny_generator, vocab):
        converter = F2RConverter(tiny_generator, vocab, max_len=5)
        assert converter.convert("you should have said i am 30") == converter.convert(
            "you should have said i am 30"
        )

    def test_from_checkpoint(self, tmp_path, tiny_generator, vocab):
        from f2r.checkpoints import CheckpointManager

        CheckpointManager(tmp_path).save("gen", tiny_generator, vocab)
        converter = F2RConverter.from_checkpoint("gen", models_dir=tmp_path, max_len=4)
        for name, tensor in tiny_generator.state_dict().items():
            assert torch.equal(converter.generator.state_dict()[name], tensor)
