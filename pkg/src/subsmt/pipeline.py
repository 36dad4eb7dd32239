"""Glue between raw text, subword flat corpora, and trained models."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from . import lm as lm_mod
from .markup import FormatSpec, decode, encode
from .phrases import FeatureWeights, PhraseTable, build_phrase_table
from .segmentation import SchemeKind, SegmentationScheme, segment_sentence

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Representation:
    """How sentences are turned into decoder tokens and back."""
    scheme: SegmentationScheme
    fmt: FormatSpec | None = None

    def __post_init__(self):
        if self.scheme.kind is not SchemeKind.WORD and self.fmt is None:
            raise ValueError(f"{self.scheme.name} segmentation needs a marker format")

    @property
    def label(self) -> str:
        if self.fmt is None:
            return self.scheme.name
        return f"{self.scheme.name}/{self.fmt.name}"

    def to_tokens(self, sentence: str) -> list[str]:
        if self.fmt is None and self.scheme.kind is SchemeKind.WORD:
            return sentence.split()
        sub = segment_sentence(sentence, self.scheme)
        if self.fmt is None:
            return sub.subwords()
        return encode(sub, self.fmt)

    def to_words(self, tokens: Sequence[str]) -> list[str]:
        if self.fmt is None:
            return list(tokens)
        return decode(tokens, self.fmt).words


@dataclass
class TrainedSystem:
    representation: Representation
    table: PhraseTable
    lm: lm_mod.NGramModel


def train_system(source: Sequence[str], target: Sequence[str], rep: Representation,
                 order: int = 10, discount: float = 0.75, max_phrase_length: int = 7,
                 iterations: int = 5, weights: FeatureWeights | None = None) -> TrainedSystem:
    if len(source) != len(target):
        raise ValueError(f"{len(source)} source lines but {len(target)} target lines")
    if not source:
        raise ValueError("empty training corpus")
    src = [rep.to_tokens(s) for s in source]
    tgt = [rep.to_tokens(t) for t in target]
    log.info("training %s: %d pairs", rep.label, len(src))
    tm = build_phrase_table(zip(src, tgt), max_phrase_length, iterations, weights)
    model = lm_mod.train(tgt, order, discount)
    return TrainedSystem(rep, tm.table, model)


def read_lines(path) -> list[str]:
    with open(Path(path), encoding="utf-8") as fh:
        return [line.rstrip("\n") for line in fh]
