"""Synthetic related-language parallel corpus.

A seed "source language" is sampled from a syllable grammar with Zipfian word
frequencies. The target side is a deterministic character-level transduction
of each source word (sound changes such as lenition and vowel mergers), plus
a handful of frequent function words replaced outright, so that most but not
all vocabulary is shared in form.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from pathlib import Path

ONSETS = ["", "p", "t", "k", "b", "d", "g", "m", "n", "s", "l", "r", "v", "h", "f",
          "tr", "pr", "st", "kl", "br", "sk"]
NUCLEI = ["a", "e", "i", "o", "u", "a", "e", "i", "o", "au", "ai"]
CODAS = ["", "", "", "", "n", "s", "r", "t", "m"]

# applied in order to every source word
SOUND_CHANGES = [
    (re.compile(r"au"), "o"),
    (re.compile(r"ai"), "e"),
    (re.compile(r"(?<=[aeiou])p(?=[aeiou])"), "b"),
    (re.compile(r"(?<=[aeiou])t(?=[aeiou])"), "d"),
    (re.compile(r"(?<=[aeiou])k(?=[aeiou])"), "g"),
    (re.compile(r"k(?=[ei])"), "c"),
    (re.compile(r"ti"), "ci"),
    (re.compile(r"^st"), "est"),
    (re.compile(r"^h(?=.)"), ""),
    (re.compile(r"v"), "w"),
    (re.compile(r"pr"), "pl"),
    (re.compile(r"a$"), "o"),
    (re.compile(r"s$"), "z"),
]


def transduce(word: str) -> str:
    for pattern, repl in SOUND_CHANGES:
        word = pattern.sub(repl, word)
    return word


@dataclass
class ParallelCorpus:
    train_source: list
    train_target: list
    test_source: list
    test_target: list

    def write(self, directory) -> dict:
        d = Path(directory)
        d.mkdir(parents=True, exist_ok=True)
        paths = {}
        for name in ("train_source", "train_target", "test_source", "test_target"):
            split, side = name.split("_")
            p = d / f"{split}.{'src' if side == 'source' else 'tgt'}"
            p.write_text("".join(line + "\n" for line in getattr(self, name)), encoding="utf-8")
            paths[name] = p
        return paths


class Generator:
    def __init__(self, seed: int = 13, lexicon_size: int = 800, n_replaced: int = 8):
        self.rng = random.Random(seed)
        self.lexicon = self._lexicon(lexicon_size)
        self.weights = [1.0 / (rank + 1) ** 1.05 for rank in range(len(self.lexicon))]
        self.mapping = {w: transduce(w) for w in self.lexicon}
        # the most frequent words get unrelated translations
        for w in self.lexicon[:n_replaced]:
            self.mapping[w] = self._word(1, 2) + "x"

    def _syllable(self) -> str:
        r = self.rng
        return r.choice(ONSETS) + r.choice(NUCLEI) + r.choice(CODAS)

    def _word(self, lo: int, hi: int) -> str:
        return "".join(self._syllable() for _ in range(self.rng.randint(lo, hi)))

    def _lexicon(self, size: int) -> list:
        seen: dict = {}
        while len(seen) < size:
            w = self._word(1, 3)
            if len(w) > 1:
                seen.setdefault(w, None)
        return list(seen)

    def sentence(self, min_len: int = 3, max_len: int = 7) -> str:
        n = self.rng.randint(min_len, max_len)
        return " ".join(self.rng.choices(self.lexicon, weights=self.weights, k=n))

    def translate(self, sentence: str) -> str:
        return " ".join(self.mapping[w] for w in sentence.split())

    def corpus(self, n_train: int, n_test: int, min_len: int = 3, max_len: int = 7) -> ParallelCorpus:
        train = [self.sentence(min_len, max_len) for _ in range(n_train)]
        test = [self.sentence(min_len, max_len) for _ in range(n_test)]
        return ParallelCorpus(train, [self.translate(s) for s in train],
                              test, [self.translate(s) for s in test])


def make_corpus(n_train: int = 2000, n_test: int = 100, seed: int = 13, **kw) -> ParallelCorpus:
    return Generator(seed).corpus(n_train, n_test, **kw)
