"""Corpus BLEU and decode-time measurement."""

from __future__ import annotations

import math
import time
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Sequence

MAX_N = 4


class EvaluationError(ValueError):
    pass


@dataclass
class BleuReport:
    bleu: float
    precisions: list
    brevity_penalty: float
    hyp_len: int
    ref_len: int
    matches: list = field(default_factory=list, repr=False)
    totals: list = field(default_factory=list, repr=False)


def _ngrams(tokens, n):
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def bleu(hypotheses: Sequence[Sequence[str]], references: Sequence[Sequence[str]]) -> BleuReport:
    """Unsmoothed corpus BLEU-4 against one reference per sentence."""
    if len(hypotheses) != len(references):
        raise EvaluationError(
            f"{len(hypotheses)} hypotheses but {len(references)} references")
    if not hypotheses:
        raise EvaluationError("need at least one sentence")
    matches = [0] * MAX_N
    totals = [0] * MAX_N
    c = r = 0
    for hyp, ref in zip(hypotheses, references):
        c += len(hyp)
        r += len(ref)
        for n in range(1, MAX_N + 1):
            h = _ngrams(hyp, n)
            rc = _ngrams(ref, n)
            matches[n - 1] += sum(min(k, rc[g]) for g, k in h.items())
            totals[n - 1] += max(len(hyp) - n + 1, 0)
    # an order the hypotheses are too short to contain is vacuously precise;
    # the brevity penalty already charges for the missing length
    precisions = [m / t if t else 1.0 for m, t in zip(matches, totals)]
    if c == 0:
        bp = 0.0
    elif c > r:
        bp = 1.0
    else:
        bp = math.exp(1.0 - r / c)
    if min(precisions) == 0.0:
        score = 0.0
    else:
        score = 100.0 * bp * math.exp(sum(math.log(p) for p in precisions) / MAX_N)
    return BleuReport(score, precisions, bp, c, r, matches, totals)


@dataclass
class TimingReport:
    cpu_seconds: float
    wall_seconds: float
    sentences: int
    relative: float | None = None
    baseline: str | None = None

    @property
    def ms_per_sentence(self) -> float:
        return 1000.0 * self.cpu_seconds / self.sentences if self.sentences else 0.0

    def relative_to(self, baseline: "TimingReport", name: str | None = None) -> "TimingReport":
        rel = None
        if baseline.cpu_seconds > 0:
            rel = self.cpu_seconds / baseline.cpu_seconds
        return TimingReport(self.cpu_seconds, self.wall_seconds, self.sentences, rel, name)


def cpu_time() -> float:
    """User + system CPU seconds of this process."""
    return time.process_time()


def time_decode(run: Callable[[], list], baseline: TimingReport | None = None,
                baseline_name: str | None = None):
    """Run ``run`` (a zero-arg decode of an already loaded model) under a CPU clock.

    Only the call itself is timed, so model loading stays outside. Returns
    (outputs, TimingReport).
    """
    wall0, cpu0 = time.perf_counter(), cpu_time()
    outputs = run()
    cpu, wall = cpu_time() - cpu0, time.perf_counter() - wall0
    report = TimingReport(cpu, wall, len(outputs))
    if baseline is not None:
        report = report.relative_to(baseline, baseline_name)
    return outputs, report
