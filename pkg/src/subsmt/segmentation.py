"""Word, character and orthographic-syllable segmentation.

An orthographic syllable (OS) is a consonant run followed by a vowel run
(C*V+). Scripts with an inherent vowel (Devanagari and friends) treat a bare
consonant as a complete syllable, so the same scanner handles both alphabetic
and abugida text once the character classes are known.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from pathlib import Path
from statistics import fmean
from typing import Iterable, Sequence


class SegmentationError(ValueError):
    pass


class CharClass(enum.Enum):
    VOWEL = "vowel"
    CONSONANT = "consonant"
    DEPENDENT = "dependent"
    JOINER = "joiner"
    OTHER = "other"


@dataclass(frozen=True)
class CharacterClassTable:
    script_name: str
    vowels: frozenset = frozenset()
    consonants: frozenset = frozenset()
    dependent_signs: frozenset = frozenset()
    joiner: str | None = None
    # bare consonants carry a vowel (abugidas)
    inherent_vowel: bool = False

    def __post_init__(self):
        groups = [self.vowels, self.consonants, self.dependent_signs,
                  frozenset([self.joiner]) if self.joiner else frozenset()]
        for a in range(len(groups)):
            for b in range(a + 1, len(groups)):
                overlap = groups[a] & groups[b]
                if overlap:
                    raise SegmentationError(
                        f"{self.script_name}: classes overlap on {sorted(overlap)!r}")

    def classify(self, ch: str) -> CharClass:
        if ch in self.vowels:
            return CharClass.VOWEL
        if ch in self.consonants:
            return CharClass.CONSONANT
        if ch in self.dependent_signs:
            return CharClass.DEPENDENT
        if self.joiner is not None and ch == self.joiner:
            return CharClass.JOINER
        return CharClass.OTHER


def _chars(*ranges) -> frozenset:
    out = set()
    for r in ranges:
        if isinstance(r, tuple):
            out.update(chr(c) for c in range(r[0], r[1] + 1))
        else:
            out.update(r)
    return frozenset(out)


LATIN = CharacterClassTable(
    script_name="latin",
    vowels=_chars("aeiouAEIOU"),
    consonants=_chars("bcdfghjklmnpqrstvwxyzBCDFGHJKLMNPQRSTVWXYZ"),
)

DEVANAGARI = CharacterClassTable(
    script_name="devanagari",
    vowels=_chars((0x0904, 0x0914), (0x0960, 0x0961), (0x0972, 0x0977)),
    consonants=_chars((0x0915, 0x0939), (0x0958, 0x095F), (0x0978, 0x097F)),
    dependent_signs=_chars((0x0900, 0x0903), (0x093A, 0x093C), (0x093E, 0x094C),
                           (0x094E, 0x094F), (0x0955, 0x0957), (0x0962, 0x0963)),
    joiner="्",
    inherent_vowel=True,
)

PRESETS = {"latin": LATIN, "devanagari": DEVANAGARI}


def load_class_table(path, script_name: str | None = None,
                     inherent_vowel: bool = False) -> CharacterClassTable:
    """Read a ``U+XXXX<TAB>class`` table; ``#`` lines are comments."""
    path = Path(path)
    groups: dict[str, set] = {"vowel": set(), "consonant": set(),
                              "dependent": set(), "joiner": set()}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2 or not parts[0].upper().startswith("U+"):
                raise SegmentationError(f"{path}:{lineno}: expected 'U+XXXX<TAB>class'")
            try:
                ch = chr(int(parts[0][2:], 16))
            except ValueError:
                raise SegmentationError(f"{path}:{lineno}: bad code point {parts[0]!r}") from None
            cls = parts[1].strip().lower()
            if cls not in groups:
                raise SegmentationError(f"{path}:{lineno}: unknown class {cls!r}")
            groups[cls].add(ch)
    if len(groups["joiner"]) > 1:
        raise SegmentationError(f"{path}: at most one joiner allowed")
    return CharacterClassTable(
        script_name=script_name or path.stem,
        vowels=frozenset(groups["vowel"]),
        consonants=frozenset(groups["consonant"]),
        dependent_signs=frozenset(groups["dependent"]),
        joiner=next(iter(groups["joiner"]), None),
        inherent_vowel=inherent_vowel,
    )


class SchemeKind(str, enum.Enum):
    WORD = "word"
    CHARACTER = "character"
    ORTHOGRAPHIC_SYLLABLE = "orthographic_syllable"


@dataclass(frozen=True)
class SegmentationScheme:
    kind: SchemeKind
    class_table: CharacterClassTable | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", SchemeKind(self.kind))
        if self.kind is SchemeKind.ORTHOGRAPHIC_SYLLABLE:
            if self.class_table is None or not self.class_table.vowels:
                raise SegmentationError(
                    "orthographic_syllable segmentation needs a class table with vowels")

    @property
    def name(self) -> str:
        return self.kind.value


WORD = SegmentationScheme(SchemeKind.WORD)
CHARACTER = SegmentationScheme(SchemeKind.CHARACTER)


def make_scheme(kind: str, class_table: str | CharacterClassTable | None = None) -> SegmentationScheme:
    """Build a scheme from a kind name and a preset name, table path, or table."""
    if isinstance(class_table, str):
        if class_table in PRESETS:
            class_table = PRESETS[class_table]
        else:
            class_table = load_class_table(class_table)
    kind = {"os": "orthographic_syllable", "char": "character"}.get(kind, kind)
    return SegmentationScheme(SchemeKind(kind), class_table)


@dataclass(frozen=True)
class SubwordSentence:
    words: tuple = field(default_factory=tuple)

    def __post_init__(self):
        words = tuple(tuple(w) for w in self.words)
        for w in words:
            if not w:
                raise SegmentationError("empty word in SubwordSentence")
            for tok in w:
                if not tok or any(c.isspace() for c in tok):
                    raise SegmentationError(f"invalid subword token {tok!r}")
        object.__setattr__(self, "words", words)

    def surface(self) -> list[str]:
        return ["".join(w) for w in self.words]

    def subwords(self) -> list[str]:
        return [tok for w in self.words for tok in w]

    def __len__(self):
        return len(self.words)


def _split_clusters(unit: str, table: CharacterClassTable) -> list[str]:
    """Split a vowel-less run into joiner-linked consonant clusters."""
    out: list[str] = []
    for ch in unit:
        if out and (out[-1][-1] == table.joiner or table.classify(ch) in
                    (CharClass.JOINER, CharClass.DEPENDENT)):
            out[-1] += ch
        else:
            out.append(ch)
    return out


def _syllabify(word: str, table: CharacterClassTable) -> list[str]:
    units: list[str] = []
    cur = ""
    has_vowel = False
    prev = None  # class of the previous character in cur

    def flush():
        nonlocal cur, has_vowel, prev
        if cur:
            units.extend([cur] if has_vowel else _split_clusters(cur, table))
        cur, has_vowel, prev = "", False, None

    for ch in word:
        cls = table.classify(ch)
        if cls is CharClass.CONSONANT:
            if has_vowel:
                flush()
            elif table.inherent_vowel and cur and prev is not CharClass.JOINER:
                flush()
            cur += ch
        elif cls is CharClass.JOINER:
            cur += ch
        elif cls is CharClass.VOWEL:
            if table.inherent_vowel:
                flush()
            elif has_vowel and prev is not CharClass.VOWEL:
                flush()
            cur += ch
            has_vowel = True
        elif cls is CharClass.DEPENDENT:
            if not cur and units:
                # sign after a flushed unit (or word-initial other) attaches backwards
                units[-1] += ch
                continue
            cur += ch
            has_vowel = True
        else:
            flush()
            units.append(ch)
            continue
        prev = cls
    flush()
    return units


def _characters(word: str, table: CharacterClassTable | None) -> list[str]:
    if table is None:
        return list(word)
    out: list[str] = []
    for ch in word:
        if out and table.classify(ch) in (CharClass.DEPENDENT, CharClass.JOINER):
            out[-1] += ch
        else:
            out.append(ch)
    return out


def segment_word(word: str, scheme: SegmentationScheme) -> list[str]:
    if not word:
        raise SegmentationError("cannot segment an empty word")
    if any(c.isspace() for c in word):
        raise SegmentationError(f"word contains whitespace: {word!r}")
    if scheme.kind is SchemeKind.WORD:
        return [word]
    if scheme.kind is SchemeKind.CHARACTER:
        return _characters(word, scheme.class_table)
    return _syllabify(word, scheme.class_table)


def segment_sentence(sentence: str, scheme: SegmentationScheme) -> SubwordSentence:
    return SubwordSentence(tuple(tuple(segment_word(w, scheme)) for w in sentence.split()))


@dataclass
class LengthStats:
    scheme: str
    mean_tokens: float
    ratio: float


def corpus_length_stats(corpus: Sequence[str],
                        schemes: Iterable[SegmentationScheme]) -> list[LengthStats]:
    """Mean subword tokens per sentence for each scheme, relative to words."""
    if not corpus:
        raise SegmentationError("corpus is empty")
    word_mean = fmean(len(s.split()) for s in corpus)
    rows = []
    for scheme in schemes:
        if scheme.kind is SchemeKind.WORD:
            mean = word_mean
        else:
            mean = fmean(len(segment_sentence(s, scheme).subwords()) for s in corpus)
        ratio = 1.0 if scheme.kind is SchemeKind.WORD else (
            mean / word_mean if word_mean else float("nan"))
        rows.append(LengthStats(scheme.name, mean, ratio))
    return rows
