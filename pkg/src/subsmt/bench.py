"""Experiment specs, sweep runner and report rendering.

An experiment file is INI-style::

    [experiment]
    train_source = train.src      # paths are relative to the spec file
    train_target = train.tgt
    test_source = test.src
    test_target = test.tgt
    order = 10
    baseline = word

    [system word]
    scheme = word

    [system os]
    scheme = orthographic_syllable
    class_table = latin
    format = space

    [run word]
    system = word

    [run pl=1000]
    system = os
    search = cube
    cube_pop_limit = 1000

Each ``[run LABEL]`` becomes one report row. Systems are trained once and
shared by every run that names them; training and loading are never timed.
"""

from __future__ import annotations

import configparser
import datetime
import logging
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

from .decoder import Decoder, DecoderConfig, decode_corpus
from .evaluation import BleuReport, TimingReport, bleu, time_decode
from .markup import FormatSpec
from .markup import decode as format_decode
from .phrases import FeatureWeights
from .pipeline import Representation, TrainedSystem, read_lines, train_system
from .segmentation import PRESETS as SCRIPT_PRESETS
from .segmentation import make_scheme

log = logging.getLogger(__name__)

TABLE2_LABELS = ["default", "tl=10", "tl=5", "ss=50", "ss=10", "pl=1000", "pl=100", "pl=10"]
PRESETS = ("table2", "table3", "table4", "toy")


class SpecError(ValueError):
    pass


@dataclass
class SystemSpec:
    name: str
    representation: Representation


@dataclass
class RunSpec:
    label: str
    system: str
    config: DecoderConfig


@dataclass
class ExperimentSpec:
    train_source: Path
    train_target: Path
    test_source: Path
    test_target: Path
    systems: dict
    runs: list
    baseline: str
    order: int = 10
    discount: float = 0.75
    max_phrase_length: int = 7
    iterations: int = 5
    test_limit: int | None = None
    train_limit: int | None = None
    name: str = "experiment"

    def __post_init__(self):
        labels = [r.label for r in self.runs]
        if len(set(labels)) != len(labels):
            raise SpecError("run labels must be unique")
        if self.baseline not in labels:
            raise SpecError(f"baseline run {self.baseline!r} is not defined")
        for r in self.runs:
            if r.system not in self.systems:
                raise SpecError(f"run {r.label!r} names unknown system {r.system!r}")


def _int(section, key, default):
    return section.getint(key, fallback=default)


_WEIGHT_KEYS = ("lm", "tm", "phrase_penalty", "word_penalty")


def _weights(sec, base: FeatureWeights) -> FeatureWeights:
    kw = {}
    for key in _WEIGHT_KEYS:
        if key in sec:
            vals = [float(x) for x in sec[key].split()]
            kw[key] = tuple(vals) if key == "tm" else vals[0]
    return replace(base, **kw) if kw else base


def _decoder_config(sec, default_len: int, weights: FeatureWeights) -> DecoderConfig:
    weights = _weights(sec, weights)
    return DecoderConfig(
        algorithm=sec.get("search", "stack"),
        stack_size=_int(sec, "stack_size", 100),
        table_limit=_int(sec, "table_limit", 20),
        pop_limit=_int(sec, "cube_pop_limit", 1000),
        max_phrase_length=_int(sec, "max_phrase_length", default_len),
        weights=weights,
        oov_penalty=sec.getfloat("oov_penalty", fallback=-10.0),
    )


def parse_spec(text: str, base_dir: Path | None = None, data_dir: Path | None = None,
               name: str = "experiment") -> ExperimentSpec:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise SpecError(str(exc)) from None
    if not cp.has_section("experiment"):
        raise SpecError("missing [experiment] section")
    exp = cp["experiment"]
    root = Path(data_dir) if data_dir is not None else Path(base_dir or ".")

    def path(key):
        if key not in exp:
            raise SpecError(f"[experiment] needs {key}")
        p = Path(exp[key])
        return p if p.is_absolute() else root / p

    weights = FeatureWeights()
    if "weights" in exp:
        wp = Path(exp["weights"])
        weights = FeatureWeights.load(wp if wp.is_absolute() else Path(base_dir or ".") / wp)
    weights = _weights(exp, weights)
    max_len = _int(exp, "max_phrase_length", 7)

    systems, runs = {}, []
    for sec_name in cp.sections():
        kind, _, label = sec_name.partition(" ")
        label = label.strip()
        sec = cp[sec_name]
        if kind == "system":
            table = sec.get("class_table", "latin")
            if table not in SCRIPT_PRESETS and not Path(table).is_absolute():
                table = str(Path(base_dir or ".") / table)
            try:
                scheme = make_scheme(sec.get("scheme", "word"), table)
                fmt = None
                if "format" in sec:
                    fmt = FormatSpec(sec["format"], sec.get("marker", "_"),
                                     sec.get("boundary_side", "last"))
                systems[label] = SystemSpec(label, Representation(scheme, fmt))
            except ValueError as exc:
                raise SpecError(f"[{sec_name}]: {exc}") from None
        elif kind == "run":
            if "system" not in sec:
                raise SpecError(f"[{sec_name}] needs system")
            runs.append(RunSpec(label, sec["system"], _decoder_config(sec, max_len, weights)))
        elif sec_name != "experiment":
            raise SpecError(f"unknown section [{sec_name}]")

    def opt_int(key):
        return exp.getint(key) if key in exp else None

    return ExperimentSpec(
        train_source=path("train_source"), train_target=path("train_target"),
        test_source=path("test_source"), test_target=path("test_target"),
        systems=systems, runs=runs, baseline=exp.get("baseline", runs[0].label if runs else ""),
        order=_int(exp, "order", 10), discount=exp.getfloat("discount", fallback=0.75),
        max_phrase_length=max_len, iterations=_int(exp, "iterations", 5),
        test_limit=opt_int("test_limit"), train_limit=opt_int("train_limit"), name=name,
    )


def load_spec(path_or_preset: str, data_dir=None) -> ExperimentSpec:
    if path_or_preset in PRESETS:
        text = resources.files("subsmt.presets").joinpath(f"{path_or_preset}.ini").read_text("utf-8")
        if data_dir is None:
            data_dir = toy_data_dir()
        return parse_spec(text, Path("."), data_dir, name=path_or_preset)
    p = Path(path_or_preset)
    return parse_spec(p.read_text(encoding="utf-8"), p.parent, data_dir, name=p.stem)


def toy_data_dir() -> Path:
    return Path(str(resources.files("subsmt.data").joinpath("toy")))


@dataclass
class BenchRow:
    label: str
    system: str
    config: DecoderConfig
    bleu: BleuReport | None = None
    timing: TimingReport | None = None
    error: str | None = None
    failed_sentences: int = 0
    format_warnings: int = 0


@dataclass
class BenchReport:
    rows: list
    baseline: str
    metadata: dict = field(default_factory=dict)

    @property
    def failed(self) -> bool:
        return any(r.error or r.failed_sentences for r in self.rows)

    def row(self, label: str) -> BenchRow:
        for r in self.rows:
            if r.label == label:
                return r
        raise KeyError(label)

    def render(self) -> str:
        return render_table(self)

    def records(self) -> str:
        return render_records(self)


def run_bench(spec: ExperimentSpec, threads: int = 1) -> BenchReport:
    """Train each system once, then decode the test set under every run."""
    train_src, train_tgt = read_lines(spec.train_source), read_lines(spec.train_target)
    test_src, test_tgt = read_lines(spec.test_source), read_lines(spec.test_target)
    if spec.train_limit:
        train_src, train_tgt = train_src[:spec.train_limit], train_tgt[:spec.train_limit]
    if spec.test_limit:
        test_src, test_tgt = test_src[:spec.test_limit], test_tgt[:spec.test_limit]
    if len(test_src) != len(test_tgt):
        raise SpecError("test source and target differ in length")
    refs = [line.split() for line in test_tgt]

    trained: dict[str, TrainedSystem] = {}
    rows = []
    for run in spec.runs:
        row = BenchRow(run.label, run.system, run.config)
        rows.append(row)
        try:
            system = trained.get(run.system)
            if system is None:
                rep = spec.systems[run.system].representation
                system = train_system(train_src, train_tgt, rep, spec.order, spec.discount,
                                      spec.max_phrase_length, spec.iterations)
                trained[run.system] = system
            rep = system.representation
            sources = [rep.to_tokens(s) for s in test_src]
            decoder = Decoder(system.table, system.lm, run.config)
            outputs, row.timing = time_decode(lambda: decode_corpus(sources, decoder, threads))
            hyps = []
            for out in outputs:
                if out.error:
                    row.failed_sentences += 1
                hyps.append(rep.to_words(out.target))
                if rep.fmt is not None:
                    row.format_warnings += format_decode(out.target, rep.fmt).warnings
            row.bleu = bleu(hyps, refs)
            log.info("%s: BLEU %.2f, %.3fs CPU", run.label, row.bleu.bleu, row.timing.cpu_seconds)
        except Exception as exc:  # a failed row is reported, not fatal
            log.exception("run %s failed", run.label)
            row.error = f"{type(exc).__name__}: {exc}"

    base = next(r for r in rows if r.label == spec.baseline)
    for r in rows:
        if r.timing is not None and base.timing is not None:
            r.timing = r.timing.relative_to(base.timing, spec.baseline)
    meta = {
        "experiment": spec.name,
        "date": datetime.datetime.now().isoformat(timespec="seconds"),
        "train_pairs": len(train_src),
        "test_sentences": len(test_src),
        "baseline": spec.baseline,
        "threads": threads,
    }
    for name, s in spec.systems.items():
        meta[f"system.{name}"] = s.representation.label
    return BenchReport(rows, spec.baseline, meta)


def _config_str(cfg: DecoderConfig) -> str:
    if cfg.algorithm.value == "stack":
        return f"stack ss={cfg.stack_size} tl={cfg.table_limit}"
    return f"cube pl={cfg.pop_limit} tl={cfg.table_limit}"


def render_table(report: BenchReport) -> str:
    head = ["label", "system", "search", "BLEU", "p1", "p2", "p3", "p4", "BP",
            "CPU s", "ms/sent", "relative"]
    body = []
    for r in report.rows:
        cells = [r.label, r.system, _config_str(r.config)]
        if r.error:
            cells += ["ERROR"] + [""] * 8
        else:
            b, t = r.bleu, r.timing
            cells += [f"{b.bleu:.2f}", *(f"{100 * p:.1f}" for p in b.precisions),
                      f"{b.brevity_penalty:.3f}", f"{t.cpu_seconds:.3f}",
                      f"{t.ms_per_sentence:.2f}",
                      "-" if t.relative is None else f"{t.relative:.2f}"]
        body.append(cells)
    widths = [max(len(str(x)) for x in col) for col in zip(head, *body)]

    def fmt(cells):
        left = "  ".join(str(c).ljust(w) for c, w in zip(cells[:3], widths[:3]))
        acc = "  ".join(str(c).rjust(w) for c, w in zip(cells[3:9], widths[3:9]))
        tim = "  ".join(str(c).rjust(w) for c, w in zip(cells[9:], widths[9:]))
        return f"{left}  | {acc} | {tim}"

    lead = sum(widths[:3]) + 2 * 2 + 2
    acc_w = sum(widths[3:9]) + 2 * 5
    tim_w = sum(widths[9:]) + 2 * 2
    groups = " " * lead + "| " + "Translation Accuracy".center(acc_w) + " | " + \
        "Relative Decoding Time".center(tim_w)
    lines = [groups, fmt(head), "-" * len(fmt(head))]
    lines += [fmt(c) for c in body]
    for r in report.rows:
        if r.error:
            lines.append(f"! {r.label}: {r.error}")
    base = report.row(report.baseline)
    if base.timing is not None:
        lines.append(f"relative time is a multiple of the {report.baseline!r} run "
                     f"({base.timing.ms_per_sentence:.2f} ms/sentence)")
    return "\n".join(lines) + "\n"


def render_records(report: BenchReport) -> str:
    """Machine-readable ``key<TAB>value`` lines."""
    out = [f"meta.{k}\t{v}" for k, v in report.metadata.items()]
    for r in report.rows:
        p = r.label
        out.append(f"{p}.system\t{r.system}")
        out.append(f"{p}.search\t{_config_str(r.config)}")
        if r.error:
            out.append(f"{p}.error\t{r.error}")
            continue
        out.append(f"{p}.bleu\t{r.bleu.bleu!r}")
        for n, v in enumerate(r.bleu.precisions, 1):
            out.append(f"{p}.p{n}\t{v!r}")
        out.append(f"{p}.bp\t{r.bleu.brevity_penalty!r}")
        out.append(f"{p}.cpu_seconds\t{r.timing.cpu_seconds!r}")
        out.append(f"{p}.wall_seconds\t{r.timing.wall_seconds!r}")
        out.append(f"{p}.ms_per_sentence\t{r.timing.ms_per_sentence!r}")
        out.append(f"{p}.relative\t{'' if r.timing.relative is None else repr(r.timing.relative)}")
        out.append(f"{p}.failed_sentences\t{r.failed_sentences}")
        out.append(f"{p}.format_warnings\t{r.format_warnings}")
    return "\n".join(out) + "\n"


def parse_records(text: str) -> dict:
    out = {}
    for line in text.splitlines():
        if line:
            k, _, v = line.partition("\t")
            out[k] = v
    return out
