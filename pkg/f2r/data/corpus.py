"""
Dialogue / feedback corpora: data model, ingestion, context assembly and splits
"""

import json
import logging
import random
from dataclasses import dataclass
from enum import Enum, IntEnum
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .vocab import DELIMITERS, P1, P2, RES, SPECIAL_TOKENS

logger = logging.getLogger(__name__)

# Train-file sizes of the public self-feeding chatbot release
EXPECTED_TRAIN_SIZES = {"dialogue": 131438, "feedback": 60000}

_PERSONA_PREFIXES = ("your persona:", "partner's persona:")


class Speaker(str, Enum):
    HUMAN = "human"
    BOT = "bot"


class StyleLabel(IntEnum):
    NATURAL = 0
    FEEDBACK = 1

    @property
    def flipped(self) -> "StyleLabel":
        return StyleLabel(1 - int(self))


class CorpusFormat(str, Enum):
    JSONL = "jsonl"
    PARLAI_TEXT = "parlai_text"


class CorpusFormatError(ValueError):
    """Malformed corpus file; carries the offending path and line number"""

    def __init__(self, message: str, path: Union[str, Path], line_number: int):
        super().__init__(f"{path}:{line_number}: {message}")
        self.path = str(path)
        self.line_number = line_number


def sanitize_text(text: str) -> str:
    """
    Trim, collapse whitespace and escape reserved tokens ("[P1]" -> "[_P1_]")
    """
    text = " ".join(text.split())
    for token in SPECIAL_TOKENS:
        if token in text:
            text = text.replace(token, f"{token[0]}_{token[1:-1]}_{token[-1]}")
    return text


@dataclass(frozen=True)
class Turn:
    speaker: Speaker
    text: str

    def __post_init__(self):
        if not self.text.strip():
            raise ValueError("Turn text must be nonempty")
        if any(d in self.text for d in DELIMITERS):
            raise ValueError(f"Turn text contains a reserved delimiter: {self.text!r}")


@dataclass(frozen=True)
class Conversation:
    turns: Tuple[Turn, ...]
    final_response: str
    style: StyleLabel = StyleLabel.NATURAL

    def __post_init__(self):
        if len(self.turns) < 1:
            raise ValueError("Conversation needs at least one turn")
        if not self.final_response.strip():
            raise ValueError("Conversation final_response must be nonempty")

    def with_response(self, response: str) -> "Conversation":
        """Same history, different final response"""
        return Conversation(self.turns, response, self.style)

    @classmethod
    def from_texts(
        cls,
        turns: Sequence[str],
        response: str,
        style: StyleLabel = StyleLabel.NATURAL,
    ) -> "Conversation":
        """Sanitize plain strings and assign alternating speakers"""
        texts = [sanitize_text(t) for t in turns]
        return cls(
            turns=tuple(
                Turn(speaker, text) for speaker, text in zip(_speakers(len(texts)), texts)
            ),
            final_response=sanitize_text(response),
            style=StyleLabel(style),
        )


@dataclass(frozen=True)
class StyleTransferExample:
    history: str
    response: str
    style: StyleLabel

    def to_dict(self) -> Dict[str, Any]:
        return {"history": self.history, "response": self.response, "style": int(self.style)}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "StyleTransferExample":
        return cls(data["history"], data["response"], StyleLabel(int(data["style"])))


@dataclass(frozen=True)
class SplitSpec:
    ratios: Tuple[float, float, float] = (0.8, 0.1, 0.1)
    seed: int = 0

    def __post_init__(self):
        if len(self.ratios) != 3 or any(r <= 0 for r in self.ratios):
            raise ValueError(f"Split ratios must be three positive reals: {self.ratios}")
        if abs(sum(self.ratios) - 1.0) > 1e-9:
            raise ValueError(f"Split ratios must sum to 1: {self.ratios}")


def _speakers(n: int) -> List[Speaker]:
    # The turn right before the final response is the human's; alternate backwards.
    return [Speaker.HUMAN if (n - 1 - i) % 2 == 0 else Speaker.BOT for i in range(n)]


def _parse_jsonl_record(
    record: Any, path: Path, line_number: int, style: Optional[int]
) -> Conversation:
    if not isinstance(record, dict):
        raise CorpusFormatError("record is not a JSON object", path, line_number)
    if "turns" not in record or "response" not in record:
        raise CorpusFormatError("record needs 'turns' and 'response'", path, line_number)

    raw_turns = record["turns"]
    if not isinstance(raw_turns, list) or not raw_turns:
        raise CorpusFormatError("'turns' must be a nonempty list", path, line_number)

    label = record.get("style", style)
    if label not in (0, 1):
        raise CorpusFormatError(f"style must be 0 or 1, got {label!r}", path, line_number)

    try:
        if all(isinstance(t, str) for t in raw_turns):
            return Conversation.from_texts(raw_turns, str(record["response"]), label)
        turns = tuple(
            Turn(Speaker(str(t["speaker"]).lower()), sanitize_text(str(t["text"])))
            for t in raw_turns
        )
        return Conversation(turns, sanitize_text(str(record["response"])), StyleLabel(label))
    except (KeyError, TypeError, ValueError) as e:
        raise CorpusFormatError(f"bad record: {e}", path, line_number) from e


def _parse_parlai_line(
    line: str, path: Path, line_number: int, style: Optional[int]
) -> Conversation:
    fields: Dict[str, str] = {}
    for chunk in line.split("\t"):
        key, sep, value = chunk.partition(":")
        if sep:
            fields[key] = value

    if "text" not in fields or "labels" not in fields:
        raise CorpusFormatError("line needs 'text' and 'labels' fields", path, line_number)
    if style is None:
        raise CorpusFormatError("PARLAI_TEXT files need an explicit style", path, line_number)

    turns = [
        t
        for t in fields["text"].split("\\n")
        if t.strip() and not t.strip().lower().startswith(_PERSONA_PREFIXES)
    ]
    response = fields["labels"].split("|")[0]
    try:
        return Conversation.from_texts(turns, response, StyleLabel(style))
    except ValueError as e:
        raise CorpusFormatError(f"bad record: {e}", path, line_number) from e


def load_dialogue_corpus(
    path: Union[str, Path],
    format: CorpusFormat = CorpusFormat.JSONL,
    style: Optional[int] = None,
) -> List[Conversation]:
    """
    Load conversations from a JSONL or ParlAI text file

    Args:
        path: corpus file
        format: JSONL or PARLAI_TEXT
        style: label for records that do not carry one (the file's label)
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Corpus file not found: {path}")

    format = CorpusFormat(format)
    conversations: List[Conversation] = []
    with path.open(encoding="utf-8") as f:
        for line_number, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            if format == CorpusFormat.JSONL:
                try:
                    record = json.loads(line)
                except json.JSONDecodeError as e:
                    raise CorpusFormatError(f"invalid JSON: {e}", path, line_number) from e
                conversations.append(_parse_jsonl_record(record, path, line_number, style))
            else:
                conversations.append(_parse_parlai_line(line, path, line_number, style))

    if not conversations:
        raise CorpusFormatError("file contains no records", path, 0)

    logger.info(f"Loaded {len(conversations)} conversations from {path}")
    return conversations


def blank_line_indices(path: Union[str, Path]) -> List[int]:
    """0-based indices of the whitespace-only lines load_dialogue_corpus skips"""
    with Path(path).open(encoding="utf-8") as f:
        return [i for i, line in enumerate(f) if not line.strip()]


def write_dialogue_corpus(
    path: Union[str, Path], conversations: Sequence[Conversation], blank_lines: Sequence[int] = ()
) -> None:
    """
    Write conversations in the JSONL format read by load_dialogue_corpus;
    blank_lines (0-based output line indices) are written as empty lines so
    the output can stay aligned with a source file
    """
    blanks = set(blank_lines)
    total = len(conversations) + len(blanks)
    if any(not 0 <= i < total for i in blanks):
        raise ValueError(f"blank line indices must lie in [0, {total})")
    records = iter(conversations)
    with Path(path).open("w", encoding="utf-8") as f:
        for i in range(total):
            if i in blanks:
                f.write("\n")
                continue
            conv = next(records)
            record = {
                "turns": [{"speaker": t.speaker.value, "text": t.text} for t in conv.turns],
                "response": conv.final_response,
                "style": int(conv.style),
            }
            f.write(json.dumps(record, ensure_ascii=False) + "\n")


def assemble_history(conv: Conversation, n_turns: int = 2) -> str:
    """
    "[P1] t_k [P2] t_k+1 ..." over the last n_turns turns; [P1] marks the
    earliest speaker of the window
    """
    if n_turns < 1:
        raise ValueError(f"n_turns must be >= 1, got {n_turns}")
    window = conv.turns[-n_turns:]
    return " ".join(f"{P1 if i % 2 == 0 else P2} {turn.text}" for i, turn in enumerate(window))


def assemble_context(conv: Conversation, n_turns: int = 2) -> str:
    return f"{assemble_history(conv, n_turns)} {RES} {conv.final_response}"


def to_style_example(
    conv: Conversation, style: StyleLabel, n_turns: int = 2
) -> StyleTransferExample:
    return StyleTransferExample(assemble_history(conv, n_turns), conv.final_response, style)


def _split_counts(n: int, ratios: Tuple[float, float, float]) -> Tuple[int, int, int]:
    n_train = min(n, round(n * ratios[0]))
    n_valid = min(n - n_train, round(n * ratios[1]))
    return n_train, n_valid, n - n_train - n_valid


def build_style_corpus(
    dialogue: Sequence[Conversation],
    feedback: Sequence[Conversation],
    spec: SplitSpec = SplitSpec(),
    n_turns: int = 2,
) -> Tuple[List[StyleTransferExample], List[StyleTransferExample], List[StyleTransferExample]]:
    """
    Balance natural (0) and feedback (1) examples and split them train/valid/test

    The dialogue side is subsampled uniformly to the feedback size; each class is
    split separately so every split stays balanced.
    """
    if not feedback:
        raise ValueError("Feedback corpus is empty")
    if len(dialogue) < len(feedback):
        raise ValueError(
            f"Need at least as many dialogue ({len(dialogue)}) as feedback "
            f"({len(feedback)}) conversations"
        )

    rng = random.Random(spec.seed)
    chosen = rng.sample(range(len(dialogue)), len(feedback))
    natural = [to_style_example(dialogue[i], StyleLabel.NATURAL, n_turns) for i in chosen]
    fb = [to_style_example(c, StyleLabel.FEEDBACK, n_turns) for c in feedback]

    splits: Tuple[List[StyleTransferExample], ...] = ([], [], [])
    for examples in (natural, fb):
        rng.shuffle(examples)
        n_train, n_valid, _ = _split_counts(len(examples), spec.ratios)
        splits[0].extend(examples[:n_train])
        splits[1].extend(examples[n_train : n_train + n_valid])
        splits[2].extend(examples[n_train + n_valid :])

    for split in splits:
        rng.shuffle(split)

    logger.info(
        f"Style corpus: train={len(splits[0])} valid={len(splits[1])} test={len(splits[2])}"
    )
    return splits[0], splits[1], splits[2]


def write_style_examples(path: Union[str, Path], examples: Sequence[StyleTransferExample]) -> None:
    with Path(path).open("w", encoding="utf-8") as f:
        for ex in examples:
            f.write(json.dumps(ex.to_dict(), ensure_ascii=False) + "\n")


def read_style_examples(path: Union[str, Path]) -> List[StyleTransferExample]:
    path = Path(path)
    examples = []
    with path.open(encoding="utf-8") as f:
        for line_number, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                examples.append(StyleTransferExample.from_dict(json.loads(line)))
            except (json.JSONDecodeError, KeyError, ValueError) as e:
                raise CorpusFormatError(f"bad style example: {e}", path, line_number) from e
    return examples


def corpus_statistics(conversations: Sequence[Conversation]) -> Dict[str, float]:
    """Word and turn counts per conversation (mean / median)"""
    if not conversations:
        raise ValueError("No conversations to summarize")
    context_words = [sum(len(t.text.split()) for t in c.turns) for c in conversations]
    turn_words = [len(t.text.split()) for c in conversations for t in c.turns]
    n_turns = [len(c.turns) for c in conversations]
    return {
        "conversations": float(len(conversations)),
        "context_words_mean": float(np.mean(context_words)),
        "context_words_median": float(np.median(context_words)),
        "turn_words_mean": float(np.mean(turn_words)),
        "turn_words_median": float(np.median(turn_words)),
        "turns_mean": float(np.mean(n_turns)),
    }


def check_expected_size(conversations: Sequence[Conversation], kind: str) -> bool:
    """Warn when a train file differs from the published release size"""
    expected = EXPECTED_TRAIN_SIZES.get(kind)
    if expected is None:
        raise ValueError(f"Unknown corpus kind: {kind}")
    if len(conversations) != expected:
        logger.warning(
            f"{kind} corpus has {len(conversations)} conversations, release train "
            f"split has {expected}"
        )
        return False
    return True
