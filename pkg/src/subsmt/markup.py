"""Flat corpus formats for subword sentences.

boundary_marker   thi s_ i s_        (one marked subword per word)
internal_marker   thi_ s i_ s        (every non-final subword marked)
space_marker      thi s _ i s        (standalone marker between words)
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

from .segmentation import SubwordSentence

log = logging.getLogger(__name__)


class MarkupError(ValueError):
    pass


class FormatKind(str, enum.Enum):
    BOUNDARY = "boundary_marker"
    INTERNAL = "internal_marker"
    SPACE = "space_marker"


class BoundarySide(str, enum.Enum):
    FIRST = "first"
    LAST = "last"


_ALIASES = {"boundary": "boundary_marker", "internal": "internal_marker",
            "space": "space_marker"}


@dataclass(frozen=True)
class FormatSpec:
    kind: FormatKind
    marker: str = "_"
    boundary_side: BoundarySide = BoundarySide.LAST

    def __post_init__(self):
        object.__setattr__(self, "kind", FormatKind(_ALIASES.get(self.kind, self.kind)))
        object.__setattr__(self, "boundary_side", BoundarySide(self.boundary_side))
        if len(self.marker) != 1 or self.marker.isspace():
            raise MarkupError(f"marker must be one non-space code point, got {self.marker!r}")

    @property
    def name(self) -> str:
        return self.kind.value


class Decoded(NamedTuple):
    words: list
    warnings: int


def encode(sentence: SubwordSentence, fmt: FormatSpec) -> list[str]:
    m = fmt.marker
    for word in sentence.words:
        for tok in word:
            if m in tok:
                raise MarkupError(f"subword {tok!r} contains the marker {m!r}")
    out: list[str] = []
    if fmt.kind is FormatKind.SPACE:
        for k, word in enumerate(sentence.words):
            if k:
                out.append(m)
            out.extend(word)
    elif fmt.kind is FormatKind.INTERNAL:
        for word in sentence.words:
            out.extend(tok + m for tok in word[:-1])
            out.append(word[-1])
    else:
        marked = -1 if fmt.boundary_side is BoundarySide.LAST else 0
        for word in sentence.words:
            toks = list(word)
            toks[marked] += m
            out.extend(toks)
    return out


def decode(tokens: Sequence[str], fmt: FormatSpec) -> Decoded:
    """Rebuild words from a flat token stream.

    Never raises on malformed input: decoder output under heavy pruning need
    not be well formed, so inconsistencies are counted and skipped.
    """
    m = fmt.marker
    words: list[str] = []
    warnings = 0
    cur: list[str] = []

    def flush():
        nonlocal cur, warnings
        if cur:
            words.append("".join(cur))
        else:
            warnings += 1
        cur = []

    if fmt.kind is FormatKind.SPACE:
        for tok in tokens:
            if tok == m:
                flush()
            else:
                cur.append(tok)
        if cur or words:
            flush()
    elif fmt.kind is FormatKind.INTERNAL:
        for tok in tokens:
            if tok.endswith(m):
                cur.append(tok[:-1])
            else:
                cur.append(tok)
                flush()
        if cur:
            warnings += 1
            flush()
    elif fmt.boundary_side is BoundarySide.LAST:
        for tok in tokens:
            if tok.endswith(m):
                cur.append(tok[:-1])
                flush()
            else:
                cur.append(tok)
        if cur:
            warnings += 1
            flush()
    else:
        started = False
        for tok in tokens:
            if tok.endswith(m):
                if started:
                    flush()
                cur.append(tok[:-1])
                started = True
            else:
                if not started:
                    warnings += 1
                    started = True
                cur.append(tok)
        if started:
            flush()
    # stray "_" tokens leave empty strings behind
    empty = words.count("")
    if empty:
        warnings += empty
        words = [w for w in words if w]
    if warnings:
        log.debug("decode: %d format warnings", warnings)
    return Decoded(words, warnings)


@dataclass
class RoundTripResult:
    ok: bool
    counterexample: SubwordSentence | None = None
    decoded: list | None = None

    def __bool__(self):
        return self.ok


def roundtrip_check(corpus: Iterable[SubwordSentence], fmt: FormatSpec) -> RoundTripResult:
    for sent in corpus:
        got = decode(encode(sent, fmt), fmt).words
        if got != sent.surface():
            return RoundTripResult(False, sent, got)
    return RoundTripResult(True)


def format_line(tokens: Sequence[str]) -> str:
    return " ".join(tokens)
