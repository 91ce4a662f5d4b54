import pytest

from f2r.data.vocab import (
    BOS_ID,
    EOS_ID,
    PAD_ID,
    RES,
    RES_ID,
    SPECIAL_TOKENS,
    UNK_ID,
    Vocab,
    detokenize,
    normalize_text,
    split_tokens,
    tokenize,
)


def test_reserved_ids_are_fixed():
    vocab = Vocab.build(["hello world"])
    assert vocab.tokens[: len(SPECIAL_TOKENS)] == list(SPECIAL_TOKENS)
    assert vocab.token_to_id("<pad>") == PAD_ID == 0
    assert vocab.token_to_id(RES) == RES_ID


def test_split_tokens_lowercases_and_keeps_delimiters():
    assert split_tokens("[P1] Hi, THERE! [RES] i'm fine") == [
        "[P1]",
        "hi",
        ",",
        "there",
        "!",
        "[RES]",
        "i'm",
        "fine",
    ]


def test_normalize_text():
    assert normalize_text("  Hello,   World ") == "hello , world"


def test_build_orders_by_frequency_then_alphabet():
    vocab = Vocab.build(["b a b", "c a b"])
    assert vocab.tokens[len(SPECIAL_TOKENS) :] == ["b", "a", "c"]


def test_min_freq_and_max_size():
    vocab = Vocab.build(["a a b c"], min_freq=2)
    assert "a" in vocab and "b" not in vocab
    capped = Vocab.build(["a a b c"], max_size=len(SPECIAL_TOKENS) + 1)
    assert len(capped) == len(SPECIAL_TOKENS) + 1


def test_encode_decode():
    vocab = Vocab.build(["i am 30"])
    ids = tokenize("I am 30", vocab)
    assert detokenize(ids, vocab) == "i am 30"
    assert vocab.encode("i am 31")[-1] == UNK_ID


def test_decode_skips_pad_bos_eos():
    vocab = Vocab.build(["yes"])
    yes = vocab.token_to_id("yes")
    assert vocab.decode([BOS_ID, yes, EOS_ID, PAD_ID]) == "yes"
    assert vocab.decode([BOS_ID, yes], skip_special=False) == "<bos> yes"


def test_bijection():
    vocab = Vocab.build(["the quick brown fox jumps over the lazy dog"])
    for idx, token in enumerate(vocab.tokens):
        assert vocab.token_to_id(token) == idx
        assert vocab.id_to_token(idx) == token


def test_save_load_keeps_ids(tmp_path):
    vocab = Vocab.build(["some words here", "and more words"])
    path = tmp_path / "vocab.json"
    vocab.save(path)
    loaded = Vocab.load(path)
    assert loaded == vocab
    assert loaded.encode("more words") == vocab.encode("more words")


def test_rejects_bad_token_lists():
    with pytest.raises(ValueError):
        Vocab(["a", "b"])
    with pytest.raises(ValueError):
        Vocab(SPECIAL_TOKENS + ("x", "x"))
