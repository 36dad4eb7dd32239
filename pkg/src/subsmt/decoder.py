"""Monotone phrase-based decoding: histogram-pruned stacks and cube pruning.

Decoding is monotone, so every hypothesis in stack ``i`` covers exactly the
first ``i`` source tokens and scores within a stack are directly comparable;
no future-cost estimate is needed.
"""

from __future__ import annotations

import enum
import heapq
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Sequence

from .lm import EOS, NGramModel
from .phrases import PHRASE_PENALTY, FeatureWeights, PhraseOption, PhraseTable

log = logging.getLogger(__name__)


class Algorithm(str, enum.Enum):
    STACK = "stack"
    CUBE = "cube_pruning"


@dataclass(frozen=True)
class DecoderConfig:
    algorithm: Algorithm = Algorithm.STACK
    stack_size: int = 100
    table_limit: int = 20
    pop_limit: int = 1000
    max_phrase_length: int = 7
    weights: FeatureWeights = field(default_factory=FeatureWeights)
    oov_penalty: float = -10.0

    def __post_init__(self):
        alg = {"cube": "cube_pruning"}.get(self.algorithm, self.algorithm)
        object.__setattr__(self, "algorithm", Algorithm(alg))
        for name in ("stack_size", "table_limit", "pop_limit", "max_phrase_length"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")

    def with_(self, **kw) -> "DecoderConfig":
        return replace(self, **kw)


class Hypothesis:
    __slots__ = ("covered", "state", "score", "prev", "option")

    def __init__(self, covered, state, score, prev, option):
        self.covered = covered
        self.state = state
        self.score = score
        self.prev = prev
        self.option = option

    def derivation(self) -> list:
        """(source span, option) pairs from the sentence start."""
        out = []
        h = self
        while h.prev is not None:
            out.append(((h.prev.covered, h.covered), h.option))
            h = h.prev
        out.reverse()
        return out

    def target(self) -> list[str]:
        return [tok for _, opt in self.derivation() for tok in opt.target]


@dataclass
class SearchStats:
    created: int = 0       # hypotheses inserted into a stack (incl. recombined)
    evaluated: int = 0     # candidates scored with the LM
    recombined: int = 0
    pruned: int = 0

    def __iadd__(self, other):
        self.created += other.created
        self.evaluated += other.evaluated
        self.recombined += other.recombined
        self.pruned += other.pruned
        return self

    @property
    def expanded(self) -> int:
        return self.created


@dataclass
class DecodeResult:
    target: list
    score: float
    stats: SearchStats
    derivation: list = field(default_factory=list, repr=False)
    error: str | None = None


class Decoder:
    """Shared, read-only models plus memo tables for one decoder configuration."""

    def __init__(self, table: PhraseTable, lm: NGramModel, config: DecoderConfig | None = None):
        self.table = table
        self.lm = lm
        self.config = config or DecoderConfig()
        self._options: dict = {}
        self._lm_phrase: dict = {}
        self._lm_end: dict = {}

    # scoring helpers ------------------------------------------------------

    def static_score(self, option: PhraseOption) -> float:
        """Every non-LM part of an option's score."""
        w = self.config.weights
        return option.table_score(w) + w.word_penalty * len(option.target)

    def oov_option(self, token: str) -> PhraseOption:
        p = self.config.oov_penalty
        return PhraseOption((token,), (p, p, p, p, PHRASE_PENALTY))

    def options_for(self, phrase: tuple) -> list:
        """Top-``tl`` (option, static score) for a source phrase, best first."""
        cached = self._options.get(phrase)
        if cached is not None:
            return cached
        w = self.config.weights
        opts = self.table.get(phrase)
        if not opts and len(phrase) == 1:
            opts = [self.oov_option(phrase[0])]
        ranked = sorted(opts, key=lambda o: (-o.table_score(w), o.target_str))
        cached = [(o, self.static_score(o)) for o in ranked[:self.config.table_limit]]
        self._options[phrase] = cached
        return cached

    def span_options(self, source: Sequence[str]) -> list[list]:
        """For each start i, a list of (end j, options) with non-empty options."""
        n = len(source)
        L = self.config.max_phrase_length
        out = []
        for i in range(n):
            row = []
            for j in range(i + 1, min(n, i + L) + 1):
                opts = self.options_for(tuple(source[i:j]))
                if opts:
                    row.append((j, opts))
            out.append(row)
        return out

    def lm_phrase(self, state: tuple, target: tuple) -> tuple:
        key = (state, target)
        hit = self._lm_phrase.get(key)
        if hit is None:
            lp = 0.0
            s = state
            for tok in target:
                s, p = self.lm.advance(s, tok)
                lp += p
            hit = (s, lp)
            self._lm_phrase[key] = hit
        return hit

    def lm_end(self, state: tuple) -> float:
        lp = self._lm_end.get(state)
        if lp is None:
            lp = self.lm.advance(state, EOS)[1]
            self._lm_end[state] = lp
        return lp

    def derivation_score(self, derivation) -> float:
        """Re-score a derivation from scratch (independent of the search)."""
        target = [tok for _, opt in derivation for tok in opt.target]
        static = sum(self.static_score(opt) for _, opt in derivation)
        return static + self.config.weights.lm * self.lm.score(target)

    # search ---------------------------------------------------------------

    def decode(self, source: Sequence[str]) -> DecodeResult:
        if self.config.algorithm is Algorithm.CUBE:
            return self.decode_cube(source)
        return self.decode_stack(source)

    def _empty(self) -> DecodeResult:
        return DecodeResult([], self.config.weights.lm * self.lm.score([]), SearchStats())

    def _finish(self, stack: dict, stats: SearchStats) -> DecodeResult:
        best = max(stack.values(), key=lambda h: h.score)
        deriv = best.derivation()
        return DecodeResult([t for _, o in deriv for t in o.target], best.score, stats, deriv)

    def decode_stack(self, source: Sequence[str]) -> DecodeResult:
        source = list(source)
        n = len(source)
        if n == 0:
            return self._empty()
        cfg = self.config
        wlm = cfg.weights.lm
        ss = cfg.stack_size
        spans = self.span_options(source)
        stats = SearchStats()
        stacks: list[dict] = [{} for _ in range(n + 1)]
        start = Hypothesis(0, self.lm.begin_state(), 0.0, None, None)
        stacks[0][start.state] = start
        lm_phrase, lm_end = self.lm_phrase, self.lm_end
        for i in range(n):
            hyps = sorted(stacks[i].values(), key=lambda h: -h.score)
            if len(hyps) > ss:
                stats.pruned += len(hyps) - ss
                hyps = hyps[:ss]
            for j, opts in spans[i]:
                target_stack = stacks[j]
                final = j == n
                for h in hyps:
                    hs, hscore = h.state, h.score
                    for opt, static in opts:
                        state, lp = lm_phrase(hs, opt.target)
                        if final:
                            lp += lm_end(state)
                        score = hscore + static + wlm * lp
                        stats.created += 1
                        old = target_stack.get(state)
                        if old is None:
                            target_stack[state] = Hypothesis(j, state, score, h, opt)
                        else:
                            stats.recombined += 1
                            if score > old.score:
                                target_stack[state] = Hypothesis(j, state, score, h, opt)
        stats.evaluated = stats.created
        return self._finish(stacks[n], stats)

    def decode_cube(self, source: Sequence[str]) -> DecodeResult:
        source = list(source)
        n = len(source)
        if n == 0:
            return self._empty()
        cfg = self.config
        wlm = cfg.weights.lm
        pl = cfg.pop_limit
        L = cfg.max_phrase_length
        spans = self.span_options(source)
        by_end: list[list] = [[] for _ in range(n + 1)]
        for i, row in enumerate(spans):
            for j, opts in row:
                by_end[j].append((i, opts))
        stats = SearchStats()
        start = Hypothesis(0, self.lm.begin_state(), 0.0, None, None)
        ranked: list[list] = [[] for _ in range(n + 1)]
        ranked[0] = [start]
        stacks: list[dict] = [{} for _ in range(n + 1)]
        lm_phrase, lm_end = self.lm_phrase, self.lm_end

        heappush, heappop = heapq.heappush, heapq.heappop
        memo = self._lm_phrase
        created = evaluated = recombined = pruned = 0

        for j in range(1, n + 1):
            final = j == n
            cubes = []
            heap = []
            # visited corners, keyed (cube << 42) | (a << 21) | b
            seen = set()
            for i, opts in by_end[j]:
                hyps = ranked[i]
                if j - i > L or not hyps:
                    continue
                cid = len(cubes)
                cubes.append((hyps, opts, len(hyps), len(opts)))
                seen.add(cid << 42)
                h = hyps[0]
                opt, static = opts[0]
                state, lp = memo.get((h.state, opt.target)) or lm_phrase(h.state, opt.target)
                if final:
                    lp += lm_end(state)
                heappush(heap, (-(h.score + static + wlm * lp), cid, 0, 0, state))
            evaluated += len(heap)

            stack = stacks[j]
            pops = 0
            while heap and pops < pl:
                neg, cid, a, b, state = heappop(heap)
                pops += 1
                hyps, opts, na, nb = cubes[cid]
                score = -neg
                old = stack.get(state)
                if old is None or score > old.score:
                    if old is not None:
                        recombined += 1
                    stack[state] = Hypothesis(j, state, score, hyps[a], opts[b][0])
                else:
                    recombined += 1
                # the two neighbours of the popped corner
                if a + 1 < na:
                    key = (cid << 42) | ((a + 1) << 21) | b
                    if key not in seen:
                        seen.add(key)
                        h = hyps[a + 1]
                        opt, static = opts[b]
                        hit = memo.get((h.state, opt.target))
                        s2, lp = hit if hit is not None else lm_phrase(h.state, opt.target)
                        if final:
                            lp += lm_end(s2)
                        evaluated += 1
                        heappush(heap, (-(h.score + static + wlm * lp), cid, a + 1, b, s2))
                if b + 1 < nb:
                    key = (cid << 42) | (a << 21) | (b + 1)
                    if key not in seen:
                        seen.add(key)
                        h = hyps[a]
                        opt, static = opts[b + 1]
                        hit = memo.get((h.state, opt.target))
                        s2, lp = hit if hit is not None else lm_phrase(h.state, opt.target)
                        if final:
                            lp += lm_end(s2)
                        evaluated += 1
                        heappush(heap, (-(h.score + static + wlm * lp), cid, a, b + 1, s2))
            created += pops
            pruned += len(heap)
            ranked[j] = sorted(stack.values(), key=lambda h: -h.score)
        stats.created, stats.evaluated = created, evaluated
        stats.recombined, stats.pruned = recombined, pruned
        return self._finish(stacks[n], stats)


def decode_stack(source, table, lm, config: DecoderConfig | None = None) -> DecodeResult:
    config = (config or DecoderConfig()).with_(algorithm=Algorithm.STACK)
    return Decoder(table, lm, config).decode_stack(source)


def decode_cube(source, table, lm, config: DecoderConfig | None = None) -> DecodeResult:
    config = (config or DecoderConfig()).with_(algorithm=Algorithm.CUBE)
    return Decoder(table, lm, config).decode_cube(source)


def decode_corpus(sentences: Sequence[Sequence[str]], decoder: Decoder,
                  threads: int = 1) -> list[DecodeResult]:
    """Decode every sentence; output order matches input order.

    A sentence that raises is recorded with ``error`` set and an empty target.
    """
    def one(src):
        try:
            return decoder.decode(src)
        except Exception as exc:  # one bad sentence must not sink a sweep
            log.exception("decode failed")
            return DecodeResult([], float("-inf"), SearchStats(), error=repr(exc))

    if threads <= 1:
        return [one(s) for s in sentences]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(one, sentences))
