"""
Command Line Interface for F2R
"""

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from dotenv import load_dotenv

from .checkpoints import CheckpointManager, checkpoints_command
from .config import RunConfig, data_dir, resolve_path, synthetic_preset
from .converters.base_converter import BaseConverter
from .converters.f2r_converter import F2RConverter
from .converters.heuristic_converter import HeuristicConverter
from .converters.passthrough_converter import PassthroughConverter
from .data.corpus import (
    CorpusFormat,
    StyleLabel,
    StyleTransferExample,
    blank_line_indices,
    build_style_corpus,
    check_expected_size,
    corpus_statistics,
    load_dialogue_corpus,
    read_style_examples,
    write_dialogue_corpus,
    write_style_examples,
)
from .data.ranking import read_ranking_examples, write_ranking_examples
from .data.vocab import Vocab
from .evaluation.metrics import hits_at_k, hits_report, write_metric_json
from .experiments.settings import (
    ExperimentData,
    ExperimentSpec,
    Setting,
    build_vocab,
    run_setting,
    synthetic_experiment_data,
    to_training_examples,
    write_aggregate_csv,
)
from .experiments.synthetic import SyntheticSpec, make_synthetic_corpus
from .models.discriminator import StyleDiscriminator
from .models.generator import StyleTransferGenerator
from .models.ranker import Ranker, RankerScorer
from .training.adversarial import F2RTrainer, evaluate_converter
from .training.pretrain import accuracy, pretrain_discriminator, pretrain_generator
from .training.ranker_training import train_ranker
from .utils import package_versions, resolve_device, seed_everything

# Set up logging
logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

CONVERTER_MODES = ["heuristic", "f2r", "feedback"]

# Files shared by make-synthetic, ingest, train-f2r and run-experiment
DIALOGUE_FILE = "dialogue.jsonl"
FEEDBACK_FILE = "feedback.jsonl"
ORACLE_FILE = "oracle.jsonl"
STYLE_FILES = {"train": "style_train.jsonl", "valid": "style_valid.jsonl", "test": "style_test.jsonl"}
RANKING_FILES = {"valid": "ranking_valid.jsonl", "test": "ranking_test.jsonl"}
MANIFEST_FILE = "manifest.json"


def create_converter(
    mode: str, checkpoint: Optional[str] = None, models_dir: str = "models"
) -> BaseConverter:
    """Create converter based on mode"""
    mode = mode.lower()

    if mode == "heuristic":
        return HeuristicConverter()
    elif mode == "feedback":
        return PassthroughConverter()
    elif mode == "f2r":
        if not checkpoint:
            raise ValueError("--mode f2r needs a generator checkpoint (--ckpt)")
        return F2RConverter.from_checkpoint(checkpoint, models_dir)
    else:
        logger.warning(f"Unknown converter mode: {mode}, using heuristic")
        return HeuristicConverter()


def load_environment_variables():
    """Load environment variables from .env file"""
    env_file = Path.cwd() / ".env"
    if env_file.exists():
        logger.info(f"Loading environment variables from {env_file}")
        load_dotenv(env_file)
    else:
        load_dotenv()


def load_config(args) -> RunConfig:
    """Config file (or defaults), with --seed applied to every seed field"""
    if args.config:
        config = RunConfig.from_file(resolve_path(args.config))
    elif getattr(args, "synthetic_preset", False):
        config = synthetic_preset()
    else:
        config = RunConfig()
    if args.seed is not None:
        config = config.with_seed(args.seed)
    return config


def write_manifest(out_dir: Path, command: str, config: RunConfig, outputs: Sequence[str]) -> Path:
    """manifest.json beside the outputs; no timestamps so reruns are byte-identical"""
    manifest = {
        "command": command,
        "config_hash": config.config_hash(),
        "seed": config.seed,
        "versions": package_versions(),
        "outputs": sorted(outputs),
    }
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / MANIFEST_FILE
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


def _progress() -> bool:
    return sys.stderr.isatty()


def _load_oracle(path: Path) -> Dict[str, str]:
    if not path.exists():
        return {}
    oracle = {}
    for line in path.read_text(encoding="utf-8").splitlines():
        if line.strip():
            record = json.loads(line)
            oracle[record["feedback"]] = record["response"]
    return oracle


def _write_style_splits(out_dir: Path, splits) -> List[str]:
    names = []
    for split, examples in zip(("train", "valid", "test"), splits):
        write_style_examples(out_dir / STYLE_FILES[split], examples)
        names.append(STYLE_FILES[split])
    return names


def run_make_synthetic(args, config: RunConfig) -> int:
    """Write the template corpus in the layout the other subcommands read"""
    out_dir = resolve_path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    logger.info(f"=== Synthetic corpus -> {out_dir} ===")

    exp = config.experiment
    corpus = make_synthetic_corpus(
        SyntheticSpec(
            n_dialogue=exp.synthetic_dialogue,
            n_feedback=exp.synthetic_feedback,
            n_heldout=exp.synthetic_heldout,
            seed=config.seed,
        )
    )
    write_dialogue_corpus(out_dir / DIALOGUE_FILE, corpus.dialogue)
    write_dialogue_corpus(out_dir / FEEDBACK_FILE, corpus.feedback)
    with (out_dir / ORACLE_FILE).open("w", encoding="utf-8") as f:
        for conv, response in zip(corpus.feedback, corpus.oracle):
            f.write(json.dumps({"feedback": conv.final_response, "response": response}) + "\n")

    outputs = [DIALOGUE_FILE, FEEDBACK_FILE, ORACLE_FILE]
    outputs += _write_style_splits(
        out_dir, corpus.style_corpus(config.corpus.split_spec(config.seed), config.corpus.n_turns)
    )

    data = synthetic_experiment_data(corpus, exp.n_candidates, config.seed, config.corpus.n_turns)
    for split, examples in (("valid", data.valid), ("test", data.test)):
        write_ranking_examples(out_dir / RANKING_FILES[split], examples)
        outputs.append(RANKING_FILES[split])

    write_manifest(out_dir, "make-synthetic", config, outputs)
    logger.info(f"Wrote {len(outputs)} files")
    return 0


def run_ingest(args, config: RunConfig) -> int:
    """Load both train files, report statistics and write the balanced style splits"""
    fmt = CorpusFormat(args.format or config.corpus.format)
    dialogue_path = args.dialogue or config.corpus.dialogue_path
    feedback_path = args.feedback or config.corpus.feedback_path
    if not dialogue_path or not feedback_path:
        raise ValueError("ingest needs --dialogue and --feedback (or corpus paths in the config)")

    out_dir = resolve_path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    logger.info(f"=== Ingest -> {out_dir} ===")

    dialogue = load_dialogue_corpus(resolve_path(dialogue_path), fmt, StyleLabel.NATURAL)
    feedback = load_dialogue_corpus(resolve_path(feedback_path), fmt, StyleLabel.FEEDBACK)
    if args.check_sizes:
        check_expected_size(dialogue, "dialogue")
        check_expected_size(feedback, "feedback")

    stats = {"dialogue": corpus_statistics(dialogue), "feedback": corpus_statistics(feedback)}
    for kind, values in stats.items():
        logger.info(f"{kind}: " + ", ".join(f"{k}={v:.2f}" for k, v in values.items()))

    write_dialogue_corpus(out_dir / DIALOGUE_FILE, dialogue)
    write_dialogue_corpus(out_dir / FEEDBACK_FILE, feedback)
    (out_dir / "statistics.json").write_text(json.dumps(stats, indent=2, sort_keys=True) + "\n")

    outputs = [DIALOGUE_FILE, FEEDBACK_FILE, "statistics.json"]
    splits = build_style_corpus(
        dialogue, feedback, config.corpus.split_spec(config.seed), config.corpus.n_turns
    )
    outputs += _write_style_splits(out_dir, splits)
    write_manifest(out_dir, "ingest", config, outputs)
    return 0


def run_convert(args, config: RunConfig) -> int:
    """Rewrite the final response of every conversation in --in"""
    in_path = resolve_path(args.input)
    out_path = resolve_path(args.out)
    if in_path.resolve() == out_path.resolve():
        raise ValueError("--out must differ from --in")

    converter = create_converter(args.mode, args.ckpt, args.models_dir)
    logger.info(f"=== Convert {in_path} with {converter.name} ===")

    conversations = load_dialogue_corpus(in_path, CorpusFormat(config.corpus.format), StyleLabel.FEEDBACK)
    converted = converter.convert_conversations(conversations, config.corpus.n_turns)

    # output stays line-aligned with the input
    out_path.parent.mkdir(parents=True, exist_ok=True)
    write_dialogue_corpus(out_path, converted, blank_line_indices(in_path))
    write_manifest(out_path.parent, "convert", config, [out_path.name])
    logger.info(f"Wrote {len(converted)} conversations to {out_path}")
    return 0


def _style_data(
    args, config: RunConfig
) -> Tuple[List[StyleTransferExample], List[StyleTransferExample], Dict[str, str]]:
    """Train / valid style examples and the feedback oracle, if any"""
    data = resolve_path(args.data) if args.data else data_dir()
    train_file = data / STYLE_FILES["train"]
    if train_file.exists():
        train = read_style_examples(train_file)
        valid = read_style_examples(data / STYLE_FILES["valid"])
        return train, valid, _load_oracle(data / ORACLE_FILE)

    corpus_cfg = config.corpus
    if corpus_cfg.dialogue_path and corpus_cfg.feedback_path:
        fmt = CorpusFormat(corpus_cfg.format)
        dialogue = load_dialogue_corpus(resolve_path(corpus_cfg.dialogue_path), fmt, StyleLabel.NATURAL)
        feedback = load_dialogue_corpus(resolve_path(corpus_cfg.feedback_path), fmt, StyleLabel.FEEDBACK)
        train, valid, _ = build_style_corpus(
            dialogue, feedback, corpus_cfg.split_spec(config.seed), corpus_cfg.n_turns
        )
        return train, valid, {}

    raise FileNotFoundError(
        f"No style corpus in {data}; run make-synthetic or ingest first, or set corpus paths"
    )


def run_train_f2r(args, config: RunConfig) -> int:
    """Pretrain, then adversarially train the generator and discriminator"""
    training = config.training
    if args.steps is not None:
        training = replace(training, steps=args.steps)

    train, valid, oracle = _style_data(args, config)
    out_dir = resolve_path(args.out)
    manager = CheckpointManager(out_dir)
    device = resolve_device(args.device)
    progress = _progress()
    seed_everything(config.seed)

    logger.info(f"=== F2R training: {len(train)} examples, {training.steps} steps ===")
    vocab = Vocab.build(
        (text for ex in train for text in (ex.history, ex.response)),
        config.corpus.vocab_min_freq,
        config.corpus.vocab_max_size,
    )
    gen = StyleTransferGenerator(config.generator_config(len(vocab))).to(device)
    disc = StyleDiscriminator(config.discriminator_config(len(vocab))).to(device)

    pre = config.pretrain
    pretrain_generator(gen, train, vocab, pre, device=device, progress=progress)
    pretrain_discriminator(
        disc, train, vocab, pre.disc_steps, pre.disc_lr, pre.batch_size, pre.seed, progress=progress
    )

    trainer = F2RTrainer(gen, disc, vocab, training, manager, run_name=args.name)
    trainer.train(train, progress=progress)
    trainer.save_checkpoints(args.name)
    history_path = out_dir / f"{args.name}-losses.csv"
    trainer.save_history(history_path)

    held_out = [ex for ex in valid if ex.style == StyleLabel.FEEDBACK]
    references = [oracle[ex.response] for ex in held_out] if oracle and all(
        ex.response in oracle for ex in held_out
    ) else None
    report = evaluate_converter(gen, disc, held_out, vocab, references, training.max_len)
    metrics = report.to_dict()
    metrics["disc_accuracy"] = accuracy(disc, valid, vocab)
    metrics["seed"] = config.seed
    metrics_name = f"{args.name}-metrics.json"
    print(write_metric_json(out_dir / metrics_name, metrics), end="")

    outputs = [
        f"{args.name}-generator.pt",
        f"{args.name}-discriminator.pt",
        history_path.name,
        history_path.with_suffix(".json").name,
        metrics_name,
    ]
    write_manifest(out_dir, "train-f2r", config, outputs)
    logger.info("=== F2R training finished ===")
    return 0


def run_train_ranker(args, config: RunConfig) -> int:
    """Train one ranker on the conversations of every --in file"""
    ranker_training = config.ranker_training
    if args.steps is not None:
        ranker_training = replace(ranker_training, steps=args.steps)

    fmt = CorpusFormat(config.corpus.format)
    conversations = []
    for path in args.input:
        conversations.extend(load_dialogue_corpus(resolve_path(path), fmt, StyleLabel.NATURAL))

    n_turns = config.corpus.n_turns
    vocab = build_vocab(conversations, n_turns)
    examples = to_training_examples(conversations, n_turns)
    seed_everything(config.seed)
    model = Ranker(config.ranker_config(len(vocab))).to(resolve_device(args.device))

    logger.info(f"=== Ranker training: {model.config.architecture}, {len(examples)} examples ===")
    _, losses = train_ranker(model, examples, vocab, ranker_training, progress=_progress())

    out_dir = resolve_path(args.out)
    manager = CheckpointManager(out_dir)
    extra = {"losses": losses, "train_config": ranker_training.to_dict()}
    ckpt = manager.save(args.name, model, vocab, extra)
    write_manifest(out_dir, "train-ranker", config, [ckpt.name])
    return 0


def run_evaluate(args, config: RunConfig) -> int:
    """HITS@1/20 of a ranker checkpoint on a ranking JSONL file"""
    ckpt = args.ranker or args.ckpt
    if not ckpt:
        raise ValueError("evaluate needs a ranker checkpoint (--ranker)")
    model, vocab = CheckpointManager(args.models_dir).load_ranker(ckpt)
    model.to(resolve_device(args.device))

    examples = read_ranking_examples(resolve_path(args.data), config.experiment.n_candidates)
    rt = config.ranker_training
    scorer = RankerScorer(model, vocab, rt.max_context_len, rt.max_candidate_len)
    report = hits_report(hits_at_k(scorer, examples, args.k), len(examples), config.seed)

    if args.out:
        out_path = resolve_path(args.out)
        out_path.parent.mkdir(parents=True, exist_ok=True)
        text = write_metric_json(out_path, report)
        write_manifest(out_path.parent, "evaluate", config, [out_path.name])
    else:
        text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    print(text, end="")
    return 0


def _experiment_data(args, config: RunConfig) -> ExperimentData:
    n_turns = config.corpus.n_turns
    fmt = CorpusFormat(config.corpus.format)
    corpus_cfg = config.corpus

    if args.data:
        data = resolve_path(args.data)
        paths = {
            "dialogue": data / DIALOGUE_FILE,
            "feedback": data / FEEDBACK_FILE,
            "valid": data / RANKING_FILES["valid"],
            "test": data / RANKING_FILES["test"],
        }
    elif all(getattr(corpus_cfg, f"{key}_path") for key in ("dialogue", "feedback", "valid", "test")):
        paths = {
            key: resolve_path(getattr(corpus_cfg, f"{key}_path"))
            for key in ("dialogue", "feedback", "valid", "test")
        }
    else:
        exp = config.experiment
        logger.info("No corpus given, generating the synthetic corpus")
        corpus = make_synthetic_corpus(
            SyntheticSpec(
                n_dialogue=exp.synthetic_dialogue,
                n_feedback=exp.synthetic_feedback,
                n_heldout=exp.synthetic_heldout,
                seed=config.seed,
            )
        )
        return synthetic_experiment_data(corpus, exp.n_candidates, config.seed, n_turns)

    return ExperimentData(
        dialogue=load_dialogue_corpus(paths["dialogue"], fmt, StyleLabel.NATURAL),
        feedback=load_dialogue_corpus(paths["feedback"], fmt, StyleLabel.FEEDBACK),
        valid=read_ranking_examples(paths["valid"], config.experiment.n_candidates),
        test=read_ranking_examples(paths["test"], config.experiment.n_candidates),
    )


def run_experiment(args, config: RunConfig) -> int:
    """Every requested setting, one ranker per seed; JSON report per setting plus the CSV table"""
    exp = config.experiment
    settings = [Setting(s) for s in (args.settings or exp.settings)]
    checkpoint = args.ckpt or exp.converter_checkpoint
    data = _experiment_data(args, config)

    ranker_training = config.ranker_training
    if args.steps is not None:
        ranker_training = replace(ranker_training, steps=args.steps)

    # one converter shared by every feed2resp run
    converter = None
    if Setting.FEED2RESP in settings and checkpoint:
        converter = create_converter("f2r", checkpoint, args.models_dir)

    out_dir = resolve_path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    logger.info(f"=== Experiment: {', '.join(s.value for s in settings)} ===")

    reports, outputs = [], []
    for setting in settings:
        spec = ExperimentSpec(
            setting=setting,
            seeds=exp.seeds,
            ranker=dict(config.ranker),
            ranker_training=ranker_training,
            n_turns=config.corpus.n_turns,
            converter_checkpoint=checkpoint,
        )
        report = run_setting(spec, data, converter, progress=_progress())
        name = f"report_{setting.value}.json"
        report.save(out_dir / name)
        reports.append(report)
        outputs.append(name)

    write_aggregate_csv(reports, out_dir / "results.csv")
    outputs.append("results.csv")
    write_manifest(out_dir, "run-experiment", config, outputs)

    logger.info("=== Results (HITS@1/20) ===")
    for report in reports:
        summary = report.summary()
        logger.info(
            f"{report.setting}: dev={summary['dev']['mean']:.4f} (var {summary['dev']['variance']:.6f}) "
            f"test={summary['test']['mean']:.4f} (var {summary['test']['variance']:.6f})"
        )
    return 0


def run_export_attention(args, config: RunConfig) -> int:
    """Discriminator pooling attention over one (history, response) pair"""
    disc, vocab = CheckpointManager(args.models_dir).load_discriminator(args.ckpt)
    x_ids = vocab.encode(args.text)
    if not x_ids:
        raise ValueError("--text must contain at least one token")
    history_ids = vocab.encode(args.history) if args.history else None

    out_path = resolve_path(args.out)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    doc = disc.export_attention(x_ids, history_ids, vocab, out_path)
    write_manifest(out_path.parent, "export-attention", config, [out_path.name])
    logger.info(f"Predicted style: {StyleLabel(doc['predicted']).name.lower()}")
    return 0


COMMANDS: Dict[str, Callable[..., int]] = {
    "make-synthetic": run_make_synthetic,
    "ingest": run_ingest,
    "convert": run_convert,
    "train-f2r": run_train_f2r,
    "train-ranker": run_train_ranker,
    "evaluate": run_evaluate,
    "run-experiment": run_experiment,
    "export-attention": run_export_attention,
}


def create_parser() -> argparse.ArgumentParser:
    """Create command line argument parser"""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", "-c", type=str, help="JSON run config (default: built-in defaults)")
    common.add_argument("--seed", type=int, help="Seed for every random source (overrides the config)")
    common.add_argument(
        "--synthetic-preset",
        action="store_true",
        help="Use the desk-scale preset instead of the defaults when no --config is given",
    )
    common.add_argument(
        "--models-dir", type=str, default="models", help="Checkpoint directory (default: models)"
    )
    common.add_argument("--device", type=str, help="torch device (default: cuda if available)")
    common.add_argument(
        "--log-level",
        type=str,
        default="INFO",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="Logging level (default: INFO)",
    )

    parser = argparse.ArgumentParser(
        prog="f2r",
        description="F2R - turn user feedback into dialogue responses",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  f2r make-synthetic --out data/synth --seed 0
  f2r convert --mode heuristic --in feedback.jsonl --out responses.jsonl
  f2r train-f2r --data data/synth --out models --synthetic-preset
  f2r convert --mode f2r --ckpt models/f2r-generator.pt --in feedback.jsonl --out responses.jsonl
  f2r run-experiment --data data/synth --ckpt models/f2r-generator.pt --out results
  f2r evaluate --ranker models/ranker.pt --data data/synth/ranking_test.jsonl

  # Inspect checkpoints
  f2r checkpoints --list
  f2r checkpoints f2r-generator
        """,
    )

    subparsers = parser.add_subparsers(dest="command", help="Available commands")

    # Make-synthetic command
    synth_parser = subparsers.add_parser("make-synthetic", parents=[common], help="Write the template corpus")
    synth_parser.add_argument("--out", "-o", type=str, required=True, help="Output directory")

    # Ingest command
    ingest_parser = subparsers.add_parser(
        "ingest", parents=[common], help="Load dialogue and feedback files and build style splits"
    )
    ingest_parser.add_argument("--dialogue", type=str, help="Dialogue (natural response) train file")
    ingest_parser.add_argument("--feedback", type=str, help="Feedback train file")
    ingest_parser.add_argument(
        "--format",
        "-f",
        type=str,
        choices=[f.value for f in CorpusFormat],
        help="Corpus file format (default: from config, jsonl)",
    )
    ingest_parser.add_argument(
        "--check-sizes", action="store_true", help="Warn when train files differ from the release sizes"
    )
    ingest_parser.add_argument("--out", "-o", type=str, required=True, help="Output directory")

    # Convert command
    convert_parser = subparsers.add_parser(
        "convert", parents=[common], help="Convert feedback responses to natural responses"
    )
    convert_parser.add_argument(
        "--mode",
        "-m",
        type=str,
        default="heuristic",
        choices=CONVERTER_MODES,
        help="Converter to use (default: heuristic)",
    )
    convert_parser.add_argument(
        "--in", dest="input", type=str, required=True, help="Input conversations JSONL"
    )
    convert_parser.add_argument("--out", "-o", type=str, required=True, help="Output conversations JSONL")
    convert_parser.add_argument("--ckpt", type=str, help="Generator checkpoint for --mode f2r")

    # Train-f2r command
    f2r_parser = subparsers.add_parser(
        "train-f2r", parents=[common], help="Train the feedback-to-response generator"
    )
    f2r_parser.add_argument("--data", type=str, help="Directory with style splits (default: $F2R_DATA_DIR)")
    f2r_parser.add_argument(
        "--out", "-o", type=str, default="models", help="Checkpoint directory (default: models)"
    )
    f2r_parser.add_argument("--name", type=str, default="f2r", help="Run name (default: f2r)")
    f2r_parser.add_argument("--steps", type=int, help="Adversarial steps (overrides the config)")

    # Train-ranker command
    ranker_parser = subparsers.add_parser("train-ranker", parents=[common], help="Train a retrieval ranker")
    ranker_parser.add_argument(
        "--in", dest="input", type=str, nargs="+", required=True, help="Conversation JSONL file(s)"
    )
    ranker_parser.add_argument(
        "--out", "-o", type=str, default="models", help="Checkpoint directory (default: models)"
    )
    ranker_parser.add_argument("--name", type=str, default="ranker", help="Checkpoint name (default: ranker)")
    ranker_parser.add_argument("--steps", type=int, help="Optimizer steps (overrides epochs)")

    # Evaluate command
    eval_parser = subparsers.add_parser("evaluate", parents=[common], help="HITS@k of a ranker")
    eval_parser.add_argument("--ranker", type=str, help="Ranker checkpoint")
    eval_parser.add_argument("--ckpt", type=str, help="Alias of --ranker")
    eval_parser.add_argument("--data", type=str, required=True, help="Ranking JSONL file")
    eval_parser.add_argument("--k", type=int, default=1, help="Top-k cut-off (default: 1)")
    eval_parser.add_argument("--out", "-o", type=str, help="Also write the metric JSON here")

    # Run-experiment command
    exp_parser = subparsers.add_parser(
        "run-experiment", parents=[common], help="Compare ranker training settings over several seeds"
    )
    exp_parser.add_argument("--data", type=str, help="Corpus directory (default: config paths or synthetic)")
    exp_parser.add_argument(
        "--settings", type=str, nargs="+", choices=[s.value for s in Setting], help="Settings to run"
    )
    exp_parser.add_argument("--ckpt", type=str, help="Generator checkpoint for feed2resp")
    exp_parser.add_argument("--steps", type=int, help="Ranker optimizer steps (overrides epochs)")
    exp_parser.add_argument("--out", "-o", type=str, required=True, help="Report directory")

    # Export-attention command
    attn_parser = subparsers.add_parser(
        "export-attention", parents=[common], help="Dump discriminator attention as JSON"
    )
    attn_parser.add_argument("--ckpt", type=str, required=True, help="Discriminator checkpoint")
    attn_parser.add_argument("--text", type=str, required=True, help="Response to classify")
    attn_parser.add_argument("--history", type=str, default="", help="Assembled history ([P1] ... [P2] ...)")
    attn_parser.add_argument("--out", "-o", type=str, required=True, help="Output JSON file")

    # Checkpoints command
    ckpt_parser = subparsers.add_parser("checkpoints", help="List or inspect saved checkpoints")
    ckpt_parser.add_argument("name", nargs="?", help="Checkpoint to inspect")
    ckpt_parser.add_argument("--list", action="store_true", help="Only print checkpoint names")
    ckpt_parser.add_argument(
        "--models-dir", type=str, default="models", help="Checkpoint directory (default: models)"
    )

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main entry point"""
    parser = create_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    if not args.command:
        parser.print_help()
        return 2

    load_environment_variables()

    # Checkpoints command doesn't need a run config
    if args.command == "checkpoints":
        checkpoints_command(args)
        return 0

    logging.getLogger().setLevel(args.log_level)
    try:
        config = load_config(args)
        return COMMANDS[args.command](args, config)
    except Exception as e:
        logger.error(f"{args.command} failed: {e}")
        logger.debug("Traceback", exc_info=True)
        return 1


if __name__ == "__main__":
    sys.exit(main())
