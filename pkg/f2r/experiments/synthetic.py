"""
Template corpus for desk-scale runs

Every synthetic feedback is a filler template wrapped around a (possibly
second-person) rendering of a natural answer, so the intended response of
each feedback is known exactly. Part of every topic's answers only ever
appear inside feedback: a ranker can learn them from feedback, and learns
them best when the filler is removed.
"""

import logging
import random
import re
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

from ..data.corpus import Conversation, SplitSpec, StyleLabel, StyleTransferExample, build_style_corpus

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Topic:
    name: str
    question: str
    answer: str  # first person, "{v}" marks the value slot
    values: Tuple[str, ...]

    def render(self, value: str) -> str:
        return self.answer.format(v=value)


@dataclass(frozen=True)
class FeedbackTemplate:
    pattern: str  # "{r}" marks the response slot
    second_person: bool = False
    covered: bool = True  # the regex rules recover the response exactly

    def render(self, response: str) -> str:
        return self.pattern.format(r=second_person(response) if self.second_person else response)


TOPICS: Tuple[Topic, ...] = (
    Topic("age", "how old are you ?", "i am {v}", tuple(str(n) for n in range(18, 66, 3))),
    Topic(
        "food",
        "what is your favorite food ?",
        "my favorite food is {v}",
        ("pizza", "sushi", "pasta", "tacos", "salad", "curry", "bread", "soup", "rice", "cake"),
    ),
    Topic(
        "pet",
        "do you have any pets ?",
        "i have a {v}",
        ("dog", "cat", "parrot", "hamster", "rabbit", "turtle", "horse", "goldfish"),
    ),
    Topic(
        "job",
        "what do you do for work ?",
        "i work as a {v}",
        ("teacher", "nurse", "baker", "pilot", "lawyer", "farmer", "chef", "plumber", "writer", "doctor"),
    ),
    Topic(
        "music",
        "what music do you like ?",
        "i love {v} music",
        ("jazz", "rock", "pop", "country", "classical", "blues", "folk", "reggae"),
    ),
    Topic(
        "city",
        "where do you live ?",
        "i live in {v}",
        ("paris", "tokyo", "boston", "denver", "madrid", "sydney", "chicago", "berlin", "dublin"),
    ),
    Topic(
        "sport",
        "what sport do you play ?",
        "i play {v}",
        ("soccer", "tennis", "golf", "hockey", "baseball", "rugby", "cricket", "volleyball"),
    ),
    Topic(
        "hobby",
        "what did you do last weekend ?",
        "i was {v} all weekend",
        ("hiking", "painting", "reading", "fishing", "gardening", "cooking", "dancing", "swimming"),
    ),
    Topic(
        "travel",
        "where have you traveled ?",
        "i've been to {v}",
        ("italy", "spain", "mexico", "japan", "peru", "egypt", "kenya", "norway"),
    ),
    Topic(
        "color",
        "what is your favorite color ?",
        "my favorite color is {v}",
        ("blue", "green", "red", "purple", "orange", "yellow", "pink", "teal"),
    ),
    Topic(
        "drink",
        "what do you drink in the morning ?",
        "i drink {v} every morning",
        ("coffee", "tea", "juice", "milk", "water", "cocoa", "lemonade", "soda"),
    ),
    Topic(
        "book",
        "what are you reading these days ?",
        "i am reading a book about {v}",
        ("dragons", "pirates", "space", "history", "robots", "oceans", "castles", "wizards"),
    ),
)

FEEDBACK_TEMPLATES: Tuple[FeedbackTemplate, ...] = (
    FeedbackTemplate("you should have said {r}"),
    FeedbackTemplate("you could have said {r}"),
    FeedbackTemplate("you could say {r}"),
    FeedbackTemplate("say {r}"),
    FeedbackTemplate("you should say that {r}", second_person=True),
    FeedbackTemplate("tell me {r}", second_person=True),
    FeedbackTemplate("answer that {r}", second_person=True),
    FeedbackTemplate("you should have told me {r}", second_person=True),
    FeedbackTemplate("{r} would be a great answer", covered=False),
    FeedbackTemplate("please respond with {r}", covered=False),
)

_SECOND_PERSON = {"i am ": "you are ", "my ": "your ", "i've ": "you've ", "i was": "you were", "i ": "you "}
_SECOND_PERSON_RE = re.compile(r"\b(?:" + "|".join(re.escape(k) for k in _SECOND_PERSON) + ")")


def second_person(text: str) -> str:
    """First person to second person, one left-to-right pass at word starts"""
    return _SECOND_PERSON_RE.sub(lambda m: _SECOND_PERSON[m.group(0)], text)


@dataclass
class SyntheticSpec:
    topics: Tuple[Topic, ...] = TOPICS
    templates: Tuple[FeedbackTemplate, ...] = FEEDBACK_TEMPLATES
    n_dialogue: int = 2000
    n_feedback: int = 1000
    n_heldout: int = 400
    feedback_only_fraction: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if not self.topics or not self.templates:
            raise ValueError("Synthetic corpus needs nonempty topic and template pools")
        if any(not t.values for t in self.topics):
            raise ValueError("Every topic needs at least one value")
        if self.n_dialogue < self.n_feedback:
            raise ValueError("n_dialogue must be >= n_feedback so the classes can be balanced")
        if not 0.0 <= self.feedback_only_fraction < 1.0:
            raise ValueError("feedback_only_fraction must be in [0, 1)")


@dataclass
class SyntheticCorpus:
    dialogue: List[Conversation]
    feedback: List[Conversation]
    oracle: List[str]  # intended response of each feedback conversation
    templates: List[FeedbackTemplate]  # template of each feedback conversation
    heldout: List[Conversation]  # natural conversations over every value
    feedback_only: Dict[str, Tuple[str, ...]] = field(default_factory=dict)

    @property
    def oracle_map(self) -> Dict[str, str]:
        return {conv.final_response: o for conv, o in zip(self.feedback, self.oracle)}

    def style_corpus(
        self, spec: SplitSpec = SplitSpec(), n_turns: int = 2
    ) -> Tuple[List[StyleTransferExample], List[StyleTransferExample], List[StyleTransferExample]]:
        return build_style_corpus(self.dialogue, self.feedback, spec, n_turns)


def _conversation(topic: Topic, value: str, response: str, style: StyleLabel) -> Conversation:
    turns = [f"hi ! let's talk about {topic.name} .", f"{topic.question} is it {value} ?"]
    return Conversation.from_texts(turns, response, style)


def make_synthetic_corpus(spec: SyntheticSpec = SyntheticSpec()) -> SyntheticCorpus:
    """Dialogue, feedback and held-out conversations, with each feedback's oracle"""
    rng = random.Random(spec.seed)

    visible: List[Tuple[Topic, str]] = []
    everything: List[Tuple[Topic, str]] = []
    feedback_only: Dict[str, Tuple[str, ...]] = {}
    for topic in spec.topics:
        values = list(topic.values)
        rng.shuffle(values)
        n_hidden = min(len(values) - 1, round(len(values) * spec.feedback_only_fraction))
        hidden = values[:n_hidden]
        feedback_only[topic.name] = tuple(sorted(hidden))
        visible.extend((topic, v) for v in values[n_hidden:])
        everything.extend((topic, v) for v in values)

    dialogue = []
    for _ in range(spec.n_dialogue):
        topic, value = visible[rng.randrange(len(visible))]
        dialogue.append(_conversation(topic, value, topic.render(value), StyleLabel.NATURAL))

    feedback, oracle, templates = [], [], []
    for _ in range(spec.n_feedback):
        topic, value = everything[rng.randrange(len(everything))]
        template = spec.templates[rng.randrange(len(spec.templates))]
        response = topic.render(value)
        feedback.append(_conversation(topic, value, template.render(response), StyleLabel.FEEDBACK))
        oracle.append(response)
        templates.append(template)

    heldout = []
    for _ in range(spec.n_heldout):
        topic, value = everything[rng.randrange(len(everything))]
        heldout.append(_conversation(topic, value, topic.render(value), StyleLabel.NATURAL))

    logger.info(
        f"Synthetic corpus: {len(dialogue)} dialogue, {len(feedback)} feedback, "
        f"{len(heldout)} held-out conversations"
    )
    return SyntheticCorpus(dialogue, feedback, oracle, templates, heldout, feedback_only)


def covered_indices(corpus: SyntheticCorpus) -> List[int]:
    """Feedback positions whose template the regex rules fully undo"""
    return [i for i, t in enumerate(corpus.templates) if t.covered]


def topic_pool_size(topics: Sequence[Topic]) -> int:
    return sum(len(t.values) for t in topics)
