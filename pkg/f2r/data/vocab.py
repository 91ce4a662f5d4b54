"""
Vocabulary and word-level tokenization shared by every model
"""

import json
import logging
import re
from collections import Counter
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Union

logger = logging.getLogger(__name__)

PAD = "<pad>"
BOS = "<bos>"
EOS = "<eos>"
UNK = "<unk>"
P1 = "[P1]"
P2 = "[P2]"
RES = "[RES]"
STYLE_NATURAL = "<natural>"
STYLE_FEEDBACK = "<feedback>"

# Order fixes the reserved ids; never reorder.
SPECIAL_TOKENS = (PAD, BOS, EOS, UNK, P1, P2, RES, STYLE_NATURAL, STYLE_FEEDBACK)
PAD_ID, BOS_ID, EOS_ID, UNK_ID, P1_ID, P2_ID, RES_ID, NATURAL_ID, FEEDBACK_ID = range(
    len(SPECIAL_TOKENS)
)
DELIMITERS = (P1, P2, RES)
STYLE_TOKEN_IDS = (NATURAL_ID, FEEDBACK_ID)

_SPECIAL_SET = frozenset(SPECIAL_TOKENS)
_SPECIAL_RE = re.compile("(" + "|".join(re.escape(t) for t in SPECIAL_TOKENS) + ")")
_WORD_RE = re.compile(r"[^\W_]+(?:'[^\W_]+)*|\S")


def split_tokens(text: str) -> List[str]:
    """
    Lowercase, split on whitespace and punctuation; reserved tokens pass through
    """
    tokens: List[str] = []
    for piece in _SPECIAL_RE.split(text):
        if not piece:
            continue
        if piece in _SPECIAL_SET:
            tokens.append(piece)
        else:
            tokens.extend(_WORD_RE.findall(piece.lower()))
    return tokens


def normalize_text(text: str) -> str:
    """Canonical form of a text: its tokens joined by single spaces"""
    return " ".join(split_tokens(text))


class Vocab:
    """
    Immutable token <-> id bijection with stable reserved ids
    """

    def __init__(self, tokens: Sequence[str]):
        tokens = tuple(tokens)
        if tokens[: len(SPECIAL_TOKENS)] != SPECIAL_TOKENS:
            raise ValueError("Vocab must start with the reserved special tokens")
        if len(set(tokens)) != len(tokens):
            raise ValueError("Vocab tokens must be unique")
        self._tokens = tokens
        self._index: Dict[str, int] = {tok: i for i, tok in enumerate(tokens)}

    @classmethod
    def build(
        cls,
        texts: Iterable[str],
        min_freq: int = 1,
        max_size: Optional[int] = None,
    ) -> "Vocab":
        """Build from raw texts; ties in frequency are broken alphabetically"""
        counts: Counter = Counter()
        for text in texts:
            counts.update(t for t in split_tokens(text) if t not in _SPECIAL_SET)

        ranked = sorted(
            (tok for tok, c in counts.items() if c >= min_freq),
            key=lambda tok: (-counts[tok], tok),
        )
        if max_size is not None:
            ranked = ranked[: max(0, max_size - len(SPECIAL_TOKENS))]

        vocab = cls(SPECIAL_TOKENS + tuple(ranked))
        logger.info(f"Built vocab with {len(vocab)} tokens ({len(counts)} types seen)")
        return vocab

    def __len__(self) -> int:
        return len(self._tokens)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Vocab) and self._tokens == other._tokens

    def __hash__(self) -> int:
        return hash(self._tokens)

    def __contains__(self, token: str) -> bool:
        return token in self._index

    @property
    def tokens(self) -> List[str]:
        return list(self._tokens)

    def token_to_id(self, token: str) -> int:
        return self._index.get(token, UNK_ID)

    def id_to_token(self, idx: int) -> str:
        return self._tokens[idx]

    def encode(self, text: str) -> List[int]:
        return [self.token_to_id(tok) for tok in split_tokens(text)]

    def decode(self, ids: Iterable[int], skip_special: bool = True) -> str:
        """
        Join tokens with spaces; PAD/BOS/EOS are dropped unless skip_special is off
        """
        skipped = {PAD_ID, BOS_ID, EOS_ID} if skip_special else set()
        return " ".join(self._tokens[int(i)] for i in ids if int(i) not in skipped)

    def to_dict(self) -> Dict[str, List[str]]:
        return {"tokens": list(self._tokens)}

    @classmethod
    def from_dict(cls, data: Dict[str, List[str]]) -> "Vocab":
        return cls(data["tokens"])

    def save(self, path: Union[str, Path]) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), ensure_ascii=False))

    @classmethod
    def load(cls, path: Union[str, Path]) -> "Vocab":
        return cls.from_dict(json.loads(Path(path).read_text()))


def tokenize(text: str, vocab: Vocab) -> List[int]:
    """Map text to ids; out-of-vocabulary words become UNK"""
    return vocab.encode(text)


def detokenize(ids: Iterable[int], vocab: Vocab) -> str:
    return vocab.decode(ids)
