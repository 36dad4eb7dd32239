"""IBM Model 1 word alignment and grow-diag-final-and symmetrization."""

from __future__ import annotations

import logging
import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Sequence

log = logging.getLogger(__name__)

NULL = "<null>"


class AlignmentError(ValueError):
    pass


@dataclass(frozen=True)
class AlignmentMatrix:
    source_len: int
    target_len: int
    links: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        links = frozenset(self.links)
        for s, t in links:
            if not (0 <= s < self.source_len and 0 <= t < self.target_len):
                raise AlignmentError(
                    f"link ({s}, {t}) outside {self.source_len}x{self.target_len}")
        object.__setattr__(self, "links", links)

    def __str__(self):
        return " ".join(f"{s}-{t}" for s, t in sorted(self.links))

    @classmethod
    def parse(cls, text: str, source_len: int, target_len: int) -> "AlignmentMatrix":
        links = set()
        for item in text.split():
            s, t = item.split("-")
            links.add((int(s), int(t)))
        return cls(source_len, target_len, frozenset(links))


class Model1:
    """Lexical translation table t(target | source) learned by EM.

    ``prob(f, e)`` is the probability of generating target token ``f`` from
    source token ``e`` (``e`` may be NULL).
    """

    def __init__(self, table: dict, floor: float = 1e-12):
        self.table = table
        self.floor = floor
        self.log_likelihoods: list[float] = []

    def prob(self, f: str, e: str) -> float:
        return self.table.get((f, e), self.floor)

    def viterbi(self, source: Sequence[str], target: Sequence[str]) -> AlignmentMatrix:
        """Link each target position to its most likely source token.

        A strict NULL win leaves the position unlinked; a tie with NULL goes to
        the (leftmost) real source token.
        """
        links = set()
        for j, f in enumerate(target):
            best_i, best_p = -1, self.prob(f, NULL)
            for i, e in enumerate(source):
                p = self.prob(f, e)
                if p > best_p or (best_i < 0 and p == best_p):
                    best_i, best_p = i, p
            if best_i >= 0:
                links.add((best_i, j))
        return AlignmentMatrix(len(source), len(target), frozenset(links))

    def log_likelihood(self, pairs) -> float:
        total = 0.0
        for src, tgt in pairs:
            ctx = [NULL, *src]
            norm = math.log(len(ctx))
            for f in tgt:
                total += math.log(sum(self.prob(f, e) for e in ctx)) - norm
        return total


def _clean(parallel):
    pairs = []
    skipped = 0
    for src, tgt in parallel:
        if not src or not tgt:
            skipped += 1
            continue
        pairs.append((list(src), list(tgt)))
    if skipped:
        log.warning("skipped %d sentence pairs with an empty side", skipped)
    return pairs


def train_model1(parallel, iterations: int = 5) -> Model1:
    """EM for t(target | source) with a NULL source token and uniform start."""
    if iterations < 1:
        raise AlignmentError("iterations must be >= 1")
    pairs = _clean(parallel)
    if not pairs:
        raise AlignmentError("no usable sentence pairs")
    target_vocab = {f for _, tgt in pairs for f in tgt}
    init = 1.0 / len(target_vocab)
    table: dict = {}
    for src, tgt in pairs:
        for e in (NULL, *src):
            for f in tgt:
                table[(f, e)] = init
    model = Model1(table)
    for _ in range(iterations):
        counts = defaultdict(float)
        totals = defaultdict(float)
        loglik = 0.0
        for src, tgt in pairs:
            ctx = (NULL, *src)
            loglik -= len(tgt) * math.log(len(ctx))
            for f in tgt:
                probs = [table[(f, e)] for e in ctx]
                z = sum(probs)
                loglik += math.log(z)
                for e, p in zip(ctx, probs):
                    c = p / z
                    counts[(f, e)] += c
                    totals[e] += c
        # likelihood of the parameters this E-step started from
        model.log_likelihoods.append(loglik)
        table = {k: c / totals[k[1]] for k, c in counts.items()}
        model.table = table
    return model


def align_corpus(parallel, iterations: int = 5):
    """Train both directions and return (fwd model, bwd model, symmetrized alignments)."""
    pairs = [(list(s), list(t)) for s, t in parallel]
    fwd = train_model1(pairs, iterations)
    bwd = train_model1([(t, s) for s, t in pairs], iterations)
    alignments = []
    for src, tgt in pairs:
        if not src or not tgt:
            alignments.append(AlignmentMatrix(len(src), len(tgt)))
            continue
        a_fwd = fwd.viterbi(src, tgt)
        flipped = bwd.viterbi(tgt, src)
        a_bwd = AlignmentMatrix(len(src), len(tgt),
                                frozenset((s, t) for t, s in flipped.links))
        alignments.append(grow_diag_final_and(a_fwd, a_bwd))
    return fwd, bwd, alignments


_NEIGHBORS = ((-1, 0), (0, -1), (1, 0), (0, 1), (-1, -1), (-1, 1), (1, -1), (1, 1))


def grow_diag_final_and(forward: AlignmentMatrix, backward: AlignmentMatrix) -> AlignmentMatrix:
    if (forward.source_len, forward.target_len) != (backward.source_len, backward.target_len):
        raise AlignmentError("alignment dimensions differ")
    S, T = forward.source_len, forward.target_len
    union = forward.links | backward.links
    result = set(forward.links & backward.links)
    src_aligned = {s for s, _ in result}
    tgt_aligned = {t for _, t in result}

    def add(s, t):
        result.add((s, t))
        src_aligned.add(s)
        tgt_aligned.add(t)

    added = True
    while added:
        added = False
        for s in range(S):
            for t in range(T):
                if (s, t) not in result:
                    continue
                for ds, dt in _NEIGHBORS:
                    ns, nt = s + ds, t + dt
                    if ((ns, nt) in union and (ns, nt) not in result
                            and (ns not in src_aligned or nt not in tgt_aligned)):
                        add(ns, nt)
                        added = True

    for directed in (forward.links, backward.links):
        for s, t in sorted(directed):
            if s not in src_aligned and t not in tgt_aligned:
                add(s, t)
    return AlignmentMatrix(S, T, frozenset(result))
