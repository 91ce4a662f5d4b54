import pytest
import torch

from f2r.data.corpus import Conversation, StyleLabel, StyleTransferExample, assemble_history
from f2r.data.vocab import Vocab
from f2r.experiments.synthetic import SyntheticSpec, make_synthetic_corpus
from f2r.models.discriminator import DiscriminatorConfig, StyleDiscriminator
from f2r.models.generator import GeneratorConfig, StyleTransferGenerator

_DIALOGUE = [
    (["hi there !", "how old are you ?"], "i am 30"),
    (["hello .", "what is your favorite food ?"], "my favorite food is pizza"),
    (["hey", "do you have pets ?"], "i have a dog"),
    (["good morning", "where do you live ?"], "i live in paris"),
]

_FEEDBACK = [
    (["hi there !", "how old are you ?"], "you should have said i am 30"),
    (["hello .", "what is your favorite food ?"], "tell me your favorite food is pizza"),
    (["hey", "do you have pets ?"], "you could say i have a dog"),
    (["good morning", "where do you live ?"], "say i live in paris"),
]


@pytest.fixture
def dialogue():
    return [Conversation.from_texts(t, r, StyleLabel.NATURAL) for t, r in _DIALOGUE]


@pytest.fixture
def feedback():
    return [Conversation.from_texts(t, r, StyleLabel.FEEDBACK) for t, r in _FEEDBACK]


@pytest.fixture
def style_examples(dialogue, feedback):
    return [
        StyleTransferExample(assemble_history(conv, 2), conv.final_response, conv.style)
        for conv in dialogue + feedback
    ]


@pytest.fixture
def vocab(dialogue, feedback):
    texts = []
    for conv in dialogue + feedback:
        texts.append(assemble_history(conv, 2))
        texts.append(conv.final_response)
    return Vocab.build(texts)


@pytest.fixture
def tiny_generator(vocab):
    torch.manual_seed(0)
    config = GeneratorConfig(
        vocab_size=len(vocab),
        d_model=16,
        style_dim=16,
        pos_dim=16,
        ffn_dim=32,
        n_encoder_layers=1,
        n_decoder_layers=1,
        n_heads=2,
        max_positions=64,
        dropout=0.0,
    )
    return StyleTransferGenerator(config).eval()


@pytest.fixture
def tiny_discriminator(vocab):
    torch.manual_seed(1)
    config = DiscriminatorConfig(
        vocab_size=len(vocab),
        d_model=16,
        style_dim=16,
        pos_dim=16,
        hidden_size=32,
        n_layers=2,
        n_heads=2,
        max_positions=64,
        dropout=0.0,
    )
    return StyleDiscriminator(config).eval()


@pytest.fixture
def randomize_parameters():
    """Replace every parameter with N(0, scale); zero-initialised tables would hide gradients"""

    def _randomize(module, seed=0, scale=0.5):
        generator = torch.Generator().manual_seed(seed)
        with torch.no_grad():
            for param in module.parameters():
                noise = torch.randn(param.shape, generator=generator, dtype=torch.float64)
                param.copy_((noise * scale).to(param.dtype))
        return module

    return _randomize


@pytest.fixture(scope="session")
def small_synthetic():
    return make_synthetic_corpus(SyntheticSpec(n_dialogue=200, n_feedback=100, n_heldout=60, seed=0))
