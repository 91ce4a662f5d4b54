import pytest

from f2r.converters.heuristic_converter import (
    RULES,
    HeuristicConverter,
    flip_pronouns,
    heuristic_convert,
)
from f2r.converters.passthrough_converter import PassthroughConverter
from f2r.data.corpus import Conversation, StyleLabel

GOLDEN = [
    ("you could have spoken about your favorite food", "spoken about my favorite food"),
    (
        "you should have said yes the sugar cinnamon kind is my favorite",
        "yes the sugar cinnamon kind is my favorite",
    ),
    ("the temperature is hot", "the temperature is hot"),
    ("tell me what your favorite breakfast food is", "what my favorite breakfast food is"),
    ("You Should Have Said Hello", "hello"),
    ("you could say that you like dogs", "i like dogs"),
    # only one leading word is stripped
    ("you should tell me about your job", "about my job"),
    ("you should have asked me how i am", "how i am"),
    ("answer the question", "the question"),
    ("say whether you are coming or not", "i am coming or"),
    ("tell me if you were there", "i was there"),
    ("you've been great", "i've been great"),
    # choice markers are stripped inside words too
    ("nothing", "hing"),
    ("you should", "you should"),
    ("You Should", "You Should"),
    ("   you   could have   said   i love pizza  ", "i love pizza"),
    ("talk about your hobbies", "my hobbies"),
    ("talked about sports", "sports"),
    ("told me that you have a cat", "that i have a cat"),
    ("admit you were wrong", "i was wrong"),
    ("saying thanks would be nice", "thanks would be nice"),
    ("you could have told me your name", "my name"),
    ("that is not what i meant", "is what i meant"),
    # "you" only flips when followed by a space
    ("thank you", "thank you"),
    ("thank you for asking", "thank i for asking"),
    ("you are my friend", "i am my friend"),
    ("ask me about your weekend", "about my weekend"),
    ("meat is tasty", "at is tasty"),
    ("you should have said your dog is cute", "my dog is cute"),
    ("answered the phone", "the phone"),
]


def test_golden_corpus_size():
    assert len(GOLDEN) == 30


@pytest.mark.parametrize("feedback,expected", GOLDEN)
def test_golden(feedback, expected):
    assert heuristic_convert(feedback) == expected


def test_rule_order():
    assert [r.name for r in RULES] == [
        "filler",
        "verb_prefix",
        "leading_word",
        "choice_marker",
        "pronoun_flip",
    ]


def test_pronoun_flip_is_single_pass():
    assert flip_pronouns("you are what you were ") == "i am what i was "
    # output "i " is never re-read as input
    assert flip_pronouns("you you ") == "i i "


@pytest.mark.parametrize(
    "text", ["", "   ", "¿dónde estás?", "​", "if", "[RES] you", "😀 you should"]
)
def test_total_and_nonempty(text):
    out = heuristic_convert(text)
    assert isinstance(out, str)
    if text:
        assert out != ""


def test_idempotent_on_plain_output():
    once = heuristic_convert("you should have said i am 30")
    assert heuristic_convert(once) == once


def test_converter_keeps_histories(feedback):
    converted = HeuristicConverter().convert_conversations(feedback, 2)
    assert [c.turns for c in converted] == [c.turns for c in feedback]
    assert converted[0].final_response == "i am 30"
    assert converted[1].final_response == "my favorite food is pizza"


def test_passthrough_returns_feedback(feedback):
    converted = PassthroughConverter().convert_conversations(feedback, 2)
    assert [c.final_response for c in converted] == [c.final_response for c in feedback]


def test_converter_falls_back_when_output_empty():
    conv = Conversation.from_texts(["hi"], "you should", StyleLabel.FEEDBACK)
    converted = HeuristicConverter().convert_conversations([conv])
    assert converted[0].final_response == "you should"


def test_converter_info():
    info = HeuristicConverter().get_converter_info()
    assert info["converter"] == "heuristic"
    assert len(info["rules"]) == len(RULES)
