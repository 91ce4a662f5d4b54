from collections import Counter

import pytest

from f2r.converters.heuristic_converter import heuristic_convert
from f2r.data.corpus import StyleLabel
from f2r.experiments.synthetic import (
    FEEDBACK_TEMPLATES,
    TOPICS,
    FeedbackTemplate,
    SyntheticSpec,
    covered_indices,
    make_synthetic_corpus,
    second_person,
    topic_pool_size,
)


def test_template_rendering():
    template = FeedbackTemplate("tell me {r}", second_person=True)
    assert template.render("my favorite food is pizza") == "tell me your favorite food is pizza"
    assert FeedbackTemplate("say {r}").render("i am 30") == "say i am 30"


@pytest.mark.parametrize(
    "text,expected",
    [
        ("i am 30", "you are 30"),
        ("my favorite food is pizza", "your favorite food is pizza"),
        ("i've been to peru", "you've been to peru"),
        ("i was hiking all weekend", "you were hiking all weekend"),
        ("i have a dog", "you have a dog"),
    ],
)
def test_second_person(text, expected):
    assert second_person(text) == expected


def test_sizes(small_synthetic):
    assert len(small_synthetic.dialogue) == 200
    assert len(small_synthetic.feedback) == 100
    assert len(small_synthetic.oracle) == 100
    assert len(small_synthetic.heldout) == 60


def test_styles(small_synthetic):
    assert all(c.style == StyleLabel.NATURAL for c in small_synthetic.dialogue + small_synthetic.heldout)
    assert all(c.style == StyleLabel.FEEDBACK for c in small_synthetic.feedback)


def test_covered_templates_are_undone_by_heuristic(small_synthetic):
    indices = covered_indices(small_synthetic)
    assert indices
    for i in indices:
        feedback = small_synthetic.feedback[i].final_response
        assert heuristic_convert(feedback) == small_synthetic.oracle[i], feedback


@pytest.mark.parametrize("template", [t for t in FEEDBACK_TEMPLATES if t.covered], ids=lambda t: t.pattern)
def test_every_covered_template_on_every_topic(template):
    for topic in TOPICS:
        response = topic.render(topic.values[0])
        assert heuristic_convert(template.render(response)) == response


def test_feedback_only_values_never_in_dialogue(small_synthetic):
    dialogue_responses = {c.final_response for c in small_synthetic.dialogue}
    for topic in TOPICS:
        for value in small_synthetic.feedback_only[topic.name]:
            assert topic.render(value) not in dialogue_responses


def test_balanced_style_corpus(small_synthetic):
    for split in small_synthetic.style_corpus():
        counts = Counter(ex.style for ex in split)
        assert abs(counts[StyleLabel.NATURAL] - counts[StyleLabel.FEEDBACK]) <= 1


def test_same_seed_same_corpus():
    spec = SyntheticSpec(n_dialogue=30, n_feedback=20, n_heldout=10, seed=5)
    assert make_synthetic_corpus(spec) == make_synthetic_corpus(spec)


def test_spec_validation():
    with pytest.raises(ValueError):
        SyntheticSpec(n_dialogue=10, n_feedback=20)
    with pytest.raises(ValueError):
        SyntheticSpec(templates=())
    with pytest.raises(ValueError):
        SyntheticSpec(feedback_only_fraction=1.0)


def test_pool_size():
    assert topic_pool_size(TOPICS) == sum(len(t.values) for t in TOPICS)
