from .batching import StyleBatch, collate_style_batch, encode_pair, pad_sequences
from .corpus import (
    Conversation,
    CorpusFormat,
    CorpusFormatError,
    Speaker,
    SplitSpec,
    StyleLabel,
    StyleTransferExample,
    Turn,
    assemble_context,
    assemble_history,
    blank_line_indices,
    build_style_corpus,
    load_dialogue_corpus,
    read_style_examples,
    write_dialogue_corpus,
    write_style_examples,
)
from .ranking import RankingExample, build_ranking_examples, read_ranking_examples, write_ranking_examples
from .vocab import Vocab, detokenize, tokenize

__all__ = [
    "StyleBatch",
    "collate_style_batch",
    "encode_pair",
    "pad_sequences",
    "Conversation",
    "CorpusFormat",
    "CorpusFormatError",
    "Speaker",
    "SplitSpec",
    "StyleLabel",
    "StyleTransferExample",
    "Turn",
    "assemble_context",
    "assemble_history",
    "blank_line_indices",
    "build_style_corpus",
    "load_dialogue_corpus",
    "read_style_examples",
    "write_dialogue_corpus",
    "write_style_examples",
    "RankingExample",
    "build_ranking_examples",
    "read_ranking_examples",
    "write_ranking_examples",
    "Vocab",
    "detokenize",
    "tokenize",
]
