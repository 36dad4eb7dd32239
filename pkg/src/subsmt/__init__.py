"""Subword-level phrase-based translation between related languages.

Orthographic-syllable segmentation, marker formats, a Kneser-Ney n-gram LM,
Model 1 alignment with phrase extraction, monotone stack and cube-pruning
decoders, BLEU, and a decode-time benchmark harness.
"""

from .decoder import Decoder, DecoderConfig, DecodeResult, decode_corpus, decode_cube, decode_stack
from .evaluation import BleuReport, TimingReport, bleu, time_decode
from .lm import NGramModel, load_arpa, save_arpa
from .lm import train as train_lm
from .markup import FormatSpec, decode, encode, roundtrip_check
from .phrases import FeatureWeights, PhraseOption, PhraseTable, build_phrase_table, extract_phrases, prune
from .segmentation import (CharacterClassTable, SegmentationScheme, SubwordSentence,
                           make_scheme, segment_sentence, segment_word)

__version__ = "0.1.0"

__all__ = [
    "BleuReport", "CharacterClassTable", "DecodeResult", "Decoder", "DecoderConfig",
    "FeatureWeights", "FormatSpec", "NGramModel", "PhraseOption", "PhraseTable",
    "SegmentationScheme", "SubwordSentence", "TimingReport", "bleu", "build_phrase_table",
    "decode", "decode_corpus", "decode_cube", "decode_stack", "encode", "extract_phrases",
    "load_arpa", "make_scheme", "prune", "roundtrip_check", "save_arpa", "segment_sentence",
    "segment_word", "time_decode", "train_lm",
]
