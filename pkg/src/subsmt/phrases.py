"""Phrase extraction, phrase-table scoring, pruning and Moses-style I/O."""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

from .alignment import NULL, AlignmentMatrix, Model1, align_corpus

SEP = " ||| "
PHRASE_PENALTY = math.log10(math.e)
N_FEATURES = 5


class PhraseTableError(ValueError):
    pass


@dataclass(frozen=True)
class FeatureWeights:
    lm: float = 0.5
    tm: tuple = (0.2, 0.2, 0.2, 0.2)
    phrase_penalty: float = 0.2
    word_penalty: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "tm", tuple(float(x) for x in self.tm))
        if len(self.tm) != 4:
            raise ValueError("need exactly four translation-model weights")
        for v in (self.lm, *self.tm, self.phrase_penalty, self.word_penalty):
            if not math.isfinite(v):
                raise ValueError("feature weights must be finite")

    @property
    def table(self) -> tuple:
        """Weights aligned with the five phrase-table feature columns."""
        return (*self.tm, self.phrase_penalty)

    @classmethod
    def load(cls, path) -> "FeatureWeights":
        """Read ``key = value`` lines (lm, tm, phrase_penalty, word_penalty)."""
        kw: dict = {}
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                key, sep, val = line.partition("=")
                key = key.strip()
                if not sep or key not in ("lm", "tm", "phrase_penalty", "word_penalty"):
                    raise ValueError(f"{path}:{lineno}: bad weights line")
                nums = [float(x) for x in val.split()]
                kw[key] = tuple(nums) if key == "tm" else nums[0]
        return cls(**kw)

    def dump(self) -> str:
        return (f"lm = {self.lm!r}\ntm = {' '.join(repr(x) for x in self.tm)}\n"
                f"phrase_penalty = {self.phrase_penalty!r}\nword_penalty = {self.word_penalty!r}\n")


@dataclass(frozen=True)
class PhraseOption:
    target: tuple
    # log10 [phi(s|t), lex(s|t), phi(t|s), lex(t|s), phrase penalty]
    features: tuple

    def table_score(self, weights: FeatureWeights) -> float:
        return sum(w * f for w, f in zip(weights.table, self.features))

    @property
    def target_str(self) -> str:
        return " ".join(self.target)


class PhrasePair(NamedTuple):
    """Consistent block; spans are half-open [start, end)."""
    s_start: int
    s_end: int
    t_start: int
    t_end: int


def is_consistent(links, s_start, s_end, t_start, t_end) -> bool:
    inside = False
    for s, t in links:
        in_s = s_start <= s < s_end
        in_t = t_start <= t < t_end
        if in_s != in_t:
            return False
        inside = inside or in_s
    return inside


def extract_phrases(alignment: AlignmentMatrix, max_len: int = 7) -> list[PhrasePair]:
    """All consistent blocks with both sides at most ``max_len`` long."""
    if max_len < 1:
        raise PhraseTableError("max_len must be >= 1")
    S, T = alignment.source_len, alignment.target_len
    by_src = defaultdict(list)
    by_tgt = defaultdict(list)
    for s, t in alignment.links:
        by_src[s].append(t)
        by_tgt[t].append(s)
    out = []
    for s1 in range(S):
        tmin, tmax = T, -1
        for s2 in range(s1, min(S, s1 + max_len)):
            for t in by_src.get(s2, ()):
                tmin, tmax = min(tmin, t), max(tmax, t)
            if tmax < 0 or tmax - tmin + 1 > max_len:
                continue
            if any(not s1 <= s <= s2 for t in range(tmin, tmax + 1) for s in by_tgt.get(t, ())):
                continue
            ts = tmin
            while True:
                te = tmax
                while te - ts + 1 <= max_len:
                    out.append(PhrasePair(s1, s2 + 1, ts, te + 1))
                    te += 1
                    if te >= T or te in by_tgt:
                        break
                ts -= 1
                if ts < 0 or ts in by_tgt or tmax - ts + 1 > max_len:
                    break
    return out


def _lexical_weight(gen: Sequence[str], cond: Sequence[str], links, model: Model1) -> float:
    """Alignment-averaged product of t(gen_j | cond_i); unaligned gen tokens use NULL.

    ``links`` are (cond index, gen index) pairs local to the phrase.
    """
    aligned = defaultdict(list)
    for i, j in links:
        aligned[j].append(i)
    table, floor = model.table, model.floor
    w = 1.0
    for j, g in enumerate(gen):
        mates = aligned.get(j)
        if mates:
            w *= sum(table.get((g, cond[i]), floor) for i in mates) / len(mates)
        else:
            w *= table.get((g, NULL), floor)
    return w


class PhraseTable:
    """Source phrase -> translation options, each list sorted best first."""

    def __init__(self, entries: dict | None = None):
        self.entries: dict = entries or {}

    def __len__(self):
        return len(self.entries)

    def __contains__(self, source):
        return tuple(source) in self.entries

    def __getitem__(self, source):
        return self.entries[tuple(source)]

    def get(self, source, default=()):
        return self.entries.get(tuple(source), default)

    def __eq__(self, other):
        return isinstance(other, PhraseTable) and self.entries == other.entries

    def items(self):
        return self.entries.items()

    @property
    def max_phrase_length(self) -> int:
        return max((len(s) for s in self.entries), default=0)

    def n_options(self) -> int:
        return sum(len(v) for v in self.entries.values())

    def sorted_by(self, weights: FeatureWeights) -> "PhraseTable":
        return PhraseTable({s: _rank(opts, weights) for s, opts in self.entries.items()})

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for src in sorted(self.entries):
                for opt in self.entries[src]:
                    probs = " ".join(repr(10.0 ** f) for f in opt.features)
                    fh.write(f"{' '.join(src)}{SEP}{opt.target_str}{SEP}{probs}\n")

    @classmethod
    def load(cls, path, weights: FeatureWeights | None = None) -> "PhraseTable":
        entries = defaultdict(list)
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.rstrip("\n")
                if not line.strip():
                    continue
                fields = line.split(SEP)
                if len(fields) < 3:
                    raise PhraseTableError(f"{path}:{lineno}: expected 'src ||| tgt ||| scores'")
                src, tgt = tuple(fields[0].split()), tuple(fields[1].split())
                if not src or not tgt:
                    raise PhraseTableError(f"{path}:{lineno}: empty phrase")
                try:
                    probs = [float(x) for x in fields[2].split()]
                except ValueError:
                    raise PhraseTableError(f"{path}:{lineno}: non-numeric score") from None
                if len(probs) != N_FEATURES or any(p <= 0 for p in probs):
                    raise PhraseTableError(
                        f"{path}:{lineno}: need {N_FEATURES} positive scores, got {fields[2]!r}")
                entries[src].append(PhraseOption(tgt, tuple(math.log10(p) for p in probs)))
        weights = weights or FeatureWeights()
        return cls({s: _rank(opts, weights) for s, opts in entries.items()})


def _rank(options: Iterable[PhraseOption], weights: FeatureWeights) -> list:
    return sorted(options, key=lambda o: (-o.table_score(weights), o.target_str))


def prune(table: PhraseTable, tl: int, weights: FeatureWeights | None = None) -> PhraseTable:
    """Keep the ``tl`` best options per source phrase."""
    if tl < 1:
        raise PhraseTableError("table limit must be >= 1")
    weights = weights or FeatureWeights()
    return PhraseTable({s: _rank(opts, weights)[:tl] for s, opts in table.items()})


@dataclass
class ExtractedPair:
    source: tuple
    target: tuple
    links: frozenset  # local (source, target) indices


def materialize(source: Sequence[str], target: Sequence[str], alignment: AlignmentMatrix,
                blocks: Iterable[PhrasePair]) -> list[ExtractedPair]:
    by_src = defaultdict(list)
    for s, t in alignment.links:
        by_src[s].append(t)
    out = []
    for b in blocks:
        links = frozenset((s - b.s_start, t - b.t_start)
                          for s in range(b.s_start, b.s_end) for t in by_src.get(s, ())
                          if b.t_start <= t < b.t_end)
        out.append(ExtractedPair(tuple(source[b.s_start:b.s_end]),
                                 tuple(target[b.t_start:b.t_end]), links))
    return out


def score_table(extracted: Iterable[ExtractedPair], fwd: Model1, bwd: Model1,
                weights: FeatureWeights | None = None) -> PhraseTable:
    """Relative-frequency and lexical features, pooled over the corpus.

    ``fwd`` models t(target | source), ``bwd`` models t(source | target).
    A pair seen with several alignments keeps its best lexical weights.
    """
    pair_count = defaultdict(int)
    src_count = defaultdict(int)
    tgt_count = defaultdict(int)
    lex = {}
    for ex in extracted:
        key = (ex.source, ex.target)
        pair_count[key] += 1
        src_count[ex.source] += 1
        tgt_count[ex.target] += 1
        if (key, ex.links) in lex:
            continue
        l_ts = _lexical_weight(ex.target, ex.source, ex.links, fwd)
        l_st = _lexical_weight(ex.source, ex.target, {(t, s) for s, t in ex.links}, bwd)
        lex[(key, ex.links)] = (l_st, l_ts)
    if not pair_count:
        raise PhraseTableError("no phrase pairs to score")
    best_lex: dict = {}
    for (key, _), (l_st, l_ts) in lex.items():
        old = best_lex.get(key)
        best_lex[key] = (l_st, l_ts) if old is None else (max(old[0], l_st), max(old[1], l_ts))
    entries = defaultdict(list)
    for key, c in pair_count.items():
        src, tgt = key
        l_st, l_ts = best_lex[key]
        feats = (math.log10(c / tgt_count[tgt]), math.log10(l_st),
                 math.log10(c / src_count[src]), math.log10(l_ts), PHRASE_PENALTY)
        entries[src].append(PhraseOption(tgt, feats))
    weights = weights or FeatureWeights()
    return PhraseTable({s: _rank(opts, weights) for s, opts in entries.items()})


@dataclass
class TrainedTranslationModel:
    table: PhraseTable
    fwd: Model1
    bwd: Model1
    alignments: list = field(repr=False, default_factory=list)


def build_phrase_table(parallel, max_len: int = 7, iterations: int = 5,
                       weights: FeatureWeights | None = None) -> TrainedTranslationModel:
    """Align, symmetrize, extract and score a parallel corpus of token lists."""
    pairs = [(list(s), list(t)) for s, t in parallel]
    if not pairs:
        raise PhraseTableError("empty parallel corpus")
    fwd, bwd, alignments = align_corpus(pairs, iterations)
    extracted: list[ExtractedPair] = []
    for (src, tgt), a in zip(pairs, alignments):
        extracted.extend(materialize(src, tgt, a, extract_phrases(a, max_len)))
    return TrainedTranslationModel(score_table(extracted, fwd, bwd, weights), fwd, bwd, alignments)


save_table = PhraseTable.save
load_table = PhraseTable.load


def write_table(table: PhraseTable, path) -> None:
    table.save(Path(path))
