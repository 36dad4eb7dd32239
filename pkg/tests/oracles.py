"""Brute-force reference implementations and toy-instance builders for tests.

Everything here is written to be obviously correct rather than fast, and does
not reuse the search or extraction code it is used to check.
"""

from __future__ import annotations

import itertools
import math
import random

from subsmt.lm import train as train_lm
from subsmt.phrases import PHRASE_PENALTY, FeatureWeights, PhraseOption, PhraseTable

TOY_SOURCE = ["a", "b", "c", "d"]
TOY_TARGET = ["w", "x", "y", "z"]


def consistent_blocks(source_len, target_len, links, max_len):
    """Every (s1, s2, t1, t2) block, half-open, that holds a link and is crossed by none."""
    out = set()
    for s1 in range(source_len):
        for s2 in range(s1 + 1, min(source_len, s1 + max_len) + 1):
            for t1 in range(target_len):
                for t2 in range(t1 + 1, min(target_len, t1 + max_len) + 1):
                    inside = [(s, t) for s, t in links if s1 <= s < s2 and t1 <= t < t2]
                    if not inside:
                        continue
                    crossing = [(s, t) for s, t in links
                                if (s1 <= s < s2) != (t1 <= t < t2)]
                    if not crossing:
                        out.add((s1, s2, t1, t2))
    return out


def random_alignment(rng: random.Random, max_side=6, density=None):
    S = rng.randint(1, max_side)
    T = rng.randint(1, max_side)
    p = rng.random() if density is None else density
    links = {(s, t) for s in range(S) for t in range(T) if rng.random() < p * 0.5}
    return S, T, links


def segmentations(n, max_len):
    """All ways to cut range(n) into consecutive spans of length <= max_len."""
    if n == 0:
        yield []
        return
    for k in range(1, min(n, max_len) + 1):
        for rest in segmentations(n - k, max_len):
            yield [(0, k)] + [(i + k, j + k) for i, j in rest]


def derivation_score(derivation, lm, weights: FeatureWeights):
    """Weighted score of a list of PhraseOption, recomputed from the features."""
    target = [tok for opt in derivation for tok in opt.target]
    static = 0.0
    for opt in derivation:
        static += sum(w * f for w, f in zip(weights.tm, opt.features[:4]))
        static += weights.phrase_penalty * opt.features[4]
        static += weights.word_penalty * len(opt.target)
    return static + weights.lm * lm.score(target)


def brute_force_decode(source, table: PhraseTable, lm, weights: FeatureWeights,
                       max_len=7, oov_penalty=-10.0):
    """Best (score, target) over every segmentation and every option choice."""
    best = (-math.inf, None)
    for cuts in segmentations(len(source), max_len):
        choices = []
        for i, j in cuts:
            phrase = tuple(source[i:j])
            opts = list(table.get(phrase))
            if not opts and j - i == 1:
                p = oov_penalty
                opts = [PhraseOption(phrase, (p, p, p, p, PHRASE_PENALTY))]
            if not opts:
                break
            choices.append(opts)
        else:
            for combo in itertools.product(*choices):
                score = derivation_score(combo, lm, weights)
                if score > best[0]:
                    best = (score, [t for o in combo for t in o.target])
    return best


def random_table(rng: random.Random, source, max_options=3, max_len=3, coverage=0.7):
    """Random phrase table over the spans of ``source`` with <= max_options per span."""
    entries = {}
    n = len(source)
    for i in range(n):
        for j in range(i + 1, min(n, i + max_len) + 1):
            if j - i > 1 and rng.random() > coverage:
                continue
            if j - i == 1 and rng.random() > 0.9:
                continue  # leave some single tokens to the OOV path
            phrase = tuple(source[i:j])
            if phrase in entries:
                continue
            opts = {}
            for _ in range(rng.randint(1, max_options)):
                tgt = tuple(rng.choice(TOY_TARGET) for _ in range(rng.randint(1, 3)))
                feats = tuple(math.log10(rng.uniform(0.05, 1.0)) for _ in range(4))
                opts[tgt] = PhraseOption(tgt, feats + (PHRASE_PENALTY,))
            entries[phrase] = list(opts.values())
    return PhraseTable(entries)


def random_lm(rng: random.Random, order=2, n_sentences=12):
    corpus = [[rng.choice(TOY_TARGET) for _ in range(rng.randint(1, 6))]
              for _ in range(n_sentences)]
    return train_lm(corpus, order=order)


def toy_instance(seed: int, max_source=6, order=2):
    rng = random.Random(seed)
    source = [rng.choice(TOY_SOURCE) for _ in range(rng.randint(1, max_source))]
    return source, random_table(rng, source), random_lm(rng, order)


def stress_instance(seed: int):
    """Longer source (8-14 tokens), denser table and a trigram LM, so pruning bites."""
    rng = random.Random(seed)
    source = [rng.choice(TOY_SOURCE + ["e", "f"]) for _ in range(rng.randint(8, 14))]
    table = random_table(rng, source, max_options=3, max_len=4, coverage=0.9)
    return source, table, random_lm(rng, order=3, n_sentences=30)
