"""Interpolated Kneser-Ney n-gram language model with ARPA serialization.

All probabilities are log10. The model is stored the way an ARPA file is:
every n-gram carries its interpolated probability and (below the top order)
a backoff weight, so querying is a plain backoff walk.
"""

from __future__ import annotations

import math
from collections import defaultdict
from pathlib import Path
from typing import Iterable, Sequence

BOS = "<s>"
EOS = "</s>"
UNK = "<unk>"

# log10 stand-in for probability zero (ARPA convention for <s>)
LOG_ZERO = -99.0


class LMError(ValueError):
    pass


class ArpaFormatError(LMError):
    def __init__(self, lineno: int, msg: str):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


class NGramModel:
    """Backoff n-gram model. Immutable after construction; safe to share."""

    def __init__(self, order: int, ngrams: dict):
        if order < 1:
            raise LMError("order must be >= 1")
        self.order = order
        # tuple -> (log10 prob, log10 backoff)
        self.ngrams = ngrams
        self.vocab = frozenset(ng[0] for ng in ngrams if len(ng) == 1)

    def __repr__(self):
        counts = self.counts()
        return f"NGramModel(order={self.order}, ngrams={counts})"

    def counts(self) -> list[int]:
        c = [0] * self.order
        for ng in self.ngrams:
            c[len(ng) - 1] += 1
        return c

    def map_token(self, tok: str) -> str:
        return tok if tok in self.vocab else UNK

    def logprob(self, context: Sequence[str], word: str) -> float:
        """log10 P(word | context); context is truncated to order-1 tokens."""
        word = self.map_token(word)
        context = tuple(self.map_token(t) for t in context)[-(self.order - 1):] if self.order > 1 else ()
        return self._lookup(context, word)

    def _lookup(self, context: tuple, word: str) -> float:
        ngrams = self.ngrams
        backoff = 0.0
        n = len(context)
        for k in range(n, 0, -1):
            hist = context[n - k:]
            entry = ngrams.get(hist + (word,))
            if entry is not None:
                return entry[0] + backoff
            h = ngrams.get(hist)
            if h is not None:
                backoff += h[1]
        entry = ngrams.get((word,))
        if entry is None:
            return LOG_ZERO + backoff
        return entry[0] + backoff

    def _minimize(self, history: tuple) -> tuple:
        # drop left tokens that can no longer influence any future lookup
        ngrams = self.ngrams
        while history and history not in ngrams:
            history = history[1:]
        return history

    def begin_state(self) -> tuple:
        return (BOS,) if self.order > 1 else ()

    def advance(self, state: tuple, word: str) -> tuple[tuple, float]:
        """Score ``word`` after ``state``; returns (new state, log10 prob).

        States are the shortest history that determines all future scores,
        so two states compare equal iff they are interchangeable.
        """
        word = self.map_token(word)
        lp = self._lookup(state, word)
        if self.order == 1:
            return (), lp
        hist = (state + (word,))[-(self.order - 1):]
        return self._minimize(hist), lp

    def score(self, tokens: Sequence[str]) -> float:
        """Sentence log10 probability, including the end-of-sentence event."""
        state = self.begin_state()
        total = 0.0
        for tok in tokens:
            state, lp = self.advance(state, tok)
            total += lp
        return total + self.advance(state, EOS)[1]

    def corpus_score(self, corpus: Iterable[Sequence[str]]) -> float:
        return math.fsum(self.score(s) for s in corpus)

    def predicted_vocab(self) -> list[str]:
        """Every token the model can emit (all but <s>)."""
        return sorted(w for w in self.vocab if w != BOS)

    # ARPA ---------------------------------------------------------------

    def save_arpa(self, path) -> None:
        by_order: list[list] = [[] for _ in range(self.order)]
        for ng, val in self.ngrams.items():
            by_order[len(ng) - 1].append((ng, val))
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\n\\data\\\n")
            for k, entries in enumerate(by_order, 1):
                fh.write(f"ngram {k}={len(entries)}\n")
            for k, entries in enumerate(by_order, 1):
                fh.write(f"\n\\{k}-grams:\n")
                for ng, (lp, bo) in sorted(entries):
                    line = f"{lp!r}\t{' '.join(ng)}"
                    if k < self.order:
                        line += f"\t{bo!r}"
                    fh.write(line + "\n")
            fh.write("\n\\end\\\n")

    @classmethod
    def load_arpa(cls, path) -> "NGramModel":
        declared: dict[int, int] = {}
        ngrams: dict = {}
        section = None  # None, "data", or an order
        ended = False
        lineno = 0
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.strip()
                if not line:
                    continue
                if ended:
                    raise ArpaFormatError(lineno, "content after \\end\\")
                if line == "\\data\\":
                    section = "data"
                    continue
                if line == "\\end\\":
                    ended = True
                    continue
                if line.startswith("\\") and line.endswith("-grams:"):
                    try:
                        section = int(line[1:-len("-grams:")])
                    except ValueError:
                        raise ArpaFormatError(lineno, f"bad section header {line!r}") from None
                    if section not in declared:
                        raise ArpaFormatError(lineno, f"undeclared order {section}")
                    continue
                if section == "data":
                    if not line.startswith("ngram "):
                        raise ArpaFormatError(lineno, f"expected 'ngram N=count', got {line!r}")
                    try:
                        k, n = line[6:].split("=")
                        declared[int(k)] = int(n)
                    except ValueError:
                        raise ArpaFormatError(lineno, f"bad count line {line!r}") from None
                    continue
                if not isinstance(section, int):
                    raise ArpaFormatError(lineno, f"unexpected line {line!r}")
                parts = line.split("\t") if "\t" in line else line.split()
                try:
                    lp = float(parts[0])
                    if "\t" in line:
                        words = tuple(parts[1].split())
                        bo = float(parts[2]) if len(parts) > 2 else 0.0
                    else:
                        words = tuple(parts[1:1 + section])
                        bo = float(parts[1 + section]) if len(parts) > 1 + section else 0.0
                except (IndexError, ValueError):
                    raise ArpaFormatError(lineno, f"bad n-gram line {line!r}") from None
                if len(words) != section:
                    raise ArpaFormatError(lineno, f"expected {section} tokens, got {len(words)}")
                ngrams[words] = (lp, bo)
        if not ended:
            raise ArpaFormatError(lineno, "missing \\end\\")
        if not declared:
            raise ArpaFormatError(0, "missing \\data\\ section")
        order = max(declared)
        got = defaultdict(int)
        for ng in ngrams:
            got[len(ng)] += 1
        for k, n in declared.items():
            if got[k] != n:
                raise LMError(f"{path}: declared {n} {k}-grams, found {got[k]}")
        return cls(order, ngrams)


def train(corpus: Iterable[Sequence[str]], order: int = 10, discount: float = 0.75,
          unk_count: float = 1.0) -> NGramModel:
    """Estimate an interpolated Kneser-Ney model with one absolute discount.

    Lower orders use continuation counts (distinct left extensions), except
    n-grams that start with <s>, which keep their raw counts.
    """
    if order < 1 or order > 16:
        raise LMError(f"order must be in [1, 16], got {order}")
    if not 0.0 < discount < 1.0:
        raise LMError(f"discount must be in (0, 1), got {discount}")
    sentences = [[BOS, *s, EOS] for s in corpus]
    if not sentences:
        raise LMError("cannot train on an empty corpus")

    raw = [defaultdict(int) for _ in range(order + 1)]
    for sent in sentences:
        n = len(sent)
        for i in range(n):
            for k in range(1, min(order, n - i) + 1):
                raw[k][tuple(sent[i:i + k])] += 1

    adjusted: list[dict] = [{} for _ in range(order + 1)]
    adjusted[order] = dict(raw[order])
    for k in range(order - 1, 0, -1):
        cont = defaultdict(int)
        for ng in raw[k + 1]:
            cont[ng[1:]] += 1
        adj = adjusted[k]
        for ng, c in raw[k].items():
            adj[ng] = c if ng[0] == BOS else cont[ng]
    adjusted[1].pop((BOS,), None)
    if (UNK,) not in adjusted[1]:
        adjusted[1][(UNK,)] = unk_count

    ngrams: dict = {}
    uni = adjusted[1]
    total = sum(uni.values())
    types = len(uni)
    uniform = 1.0 / types
    gamma = discount * types / total
    for ng, a in uni.items():
        ngrams[ng] = [math.log10((a - discount) / total + gamma * uniform), 0.0]
    ngrams[(BOS,)] = [LOG_ZERO, 0.0]
    lower_prob = {ng: (a - discount) / total + gamma * uniform for ng, a in uni.items()}

    for k in range(2, order + 1):
        totals = defaultdict(float)
        ntypes = defaultdict(int)
        for ng, a in adjusted[k].items():
            totals[ng[:-1]] += a
            ntypes[ng[:-1]] += 1
        gammas = {h: discount * ntypes[h] / totals[h] for h in totals}
        probs = {}
        for ng, a in adjusted[k].items():
            h = ng[:-1]
            p = (a - discount) / totals[h] + gammas[h] * lower_prob[ng[1:]]
            probs[ng] = p
            ngrams[ng] = [math.log10(p), 0.0]
        for h, g in gammas.items():
            ngrams[h][1] = math.log10(g)
        lower_prob.update(probs)
    return NGramModel(order, {ng: tuple(v) for ng, v in ngrams.items()})


def read_corpus(path) -> list[list[str]]:
    with open(path, encoding="utf-8") as fh:
        return [line.split() for line in fh]


load_arpa = NGramModel.load_arpa


def save_arpa(model: NGramModel, path) -> None:
    model.save_arpa(Path(path))
