"""
Heuristic Converter - Regex rules that strip feedback filler and flip pronouns
"""

import logging
import re
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Tuple

from .base_converter import BaseConverter

logger = logging.getLogger(__name__)


class RuleMode(str, Enum):
    STRIP_ANYWHERE = "strip_anywhere"
    STRIP_LEADING = "strip_leading"
    SUBSTITUTE = "substitute"


@dataclass(frozen=True)
class Rule:
    name: str
    pattern: str
    mode: RuleMode


# Patterns are kept character for character. "^asked " is anchored like its
# neighbours; the published list drops the caret on that one alternative.
FILLER_RULE = Rule(
    "filler", r"you could have|you should have|you could|you should", RuleMode.STRIP_ANYWHERE
)
VERB_PREFIX_RULE = Rule(
    "verb_prefix",
    r"^said|^saying|^say|^tell |^told |^admit |^asked |^ask |^answer |^answered |^talked |^talk ",
    RuleMode.STRIP_LEADING,
)
LEADING_WORD_RULE = Rule("leading_word", r"^about|^me|^that", RuleMode.STRIP_LEADING)
# No word boundaries: "not" is also removed from inside "nothing".
CHOICE_RULE = Rule("choice_marker", r"if|whether|not", RuleMode.STRIP_ANYWHERE)

PRONOUN_FLIPS: Tuple[Tuple[str, str], ...] = (
    ("you are ", "i am "),
    ("your ", "my "),
    ("you've ", "i've "),
    ("you were", "i was"),
    ("you ", "i "),
)
PRONOUN_RULE = Rule(
    "pronoun_flip", "|".join(re.escape(src) for src, _ in PRONOUN_FLIPS), RuleMode.SUBSTITUTE
)

RULES: Tuple[Rule, ...] = (
    FILLER_RULE,
    VERB_PREFIX_RULE,
    LEADING_WORD_RULE,
    CHOICE_RULE,
    PRONOUN_RULE,
)

_COMPILED = {rule.name: re.compile(rule.pattern) for rule in RULES}
_FLIP_MAP: Dict[str, str] = dict(PRONOUN_FLIPS)
_WHITESPACE = re.compile(r"\s+")


def normalize_whitespace(text: str) -> str:
    return _WHITESPACE.sub(" ", text).strip()


def flip_pronouns(text: str) -> str:
    """Second person to first person in one left-to-right pass"""
    return _COMPILED[PRONOUN_RULE.name].sub(lambda m: _FLIP_MAP[m.group(0)], text)


def apply_rule(rule: Rule, text: str) -> str:
    if rule.mode == RuleMode.SUBSTITUTE:
        return flip_pronouns(text)
    return normalize_whitespace(_COMPILED[rule.name].sub("", text))


def heuristic_convert(feedback: str) -> str:
    """
    Strip filler, leading verbs, leading words and choice markers, then flip
    pronouns. Falls back to the original input when nothing is left.
    """
    text = normalize_whitespace(feedback.lower())
    for rule in RULES:
        text = apply_rule(rule, text)
    text = normalize_whitespace(text)
    return text if text else feedback


class HeuristicConverter(BaseConverter):
    """
    Converter that applies the fixed regex rule cascade
    """

    name = "heuristic"

    def convert(self, feedback: str, history: str = "") -> str:
        converted = heuristic_convert(feedback)
        logger.debug(f"heuristic: {feedback!r} -> {converted!r}")
        return converted

    def get_converter_info(self):
        info = super().get_converter_info()
        info["rules"] = [rule.pattern for rule in RULES]
        return info
