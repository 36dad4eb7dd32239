"""subsmt: subword-level phrase-based translation toolkit.

Exit codes: 0 success, 1 some rows/sentences failed, 2 bad invocation or input.
"""

from __future__ import annotations

import argparse
import configparser
import json
import logging
import sys
from pathlib import Path

from . import lm as lm_mod
from .bench import SpecError, load_spec, run_bench
from .decoder import Decoder, DecoderConfig, decode_corpus
from .evaluation import bleu, time_decode
from .markup import FormatSpec
from .markup import decode as format_decode
from .phrases import FeatureWeights, PhraseTable, build_phrase_table
from .pipeline import Representation, read_lines
from .segmentation import corpus_length_stats, make_scheme
from .synthetic import make_corpus

log = logging.getLogger("subsmt")


class UsageError(Exception):
    pass


def _add_representation(p: argparse.ArgumentParser, default_scheme="word"):
    p.add_argument("--scheme", default=default_scheme,
                   choices=["word", "character", "char", "orthographic_syllable", "os"])
    p.add_argument("--class-table", default="latin",
                   help="latin (default), devanagari, or a U+XXXX<TAB>class file")
    p.add_argument("--format", choices=["boundary", "internal", "space"], default=None)
    p.add_argument("--marker", default="_")
    p.add_argument("--boundary-side", choices=["first", "last"], default="last")


def _format(args) -> FormatSpec | None:
    if args.format is None:
        return None
    return FormatSpec(args.format, args.marker, args.boundary_side)


def _write_lines(path, lines):
    text = "".join(line + "\n" for line in lines)
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def cmd_segment(args) -> int:
    scheme = make_scheme(args.scheme, args.class_table)
    lines = read_lines(args.input)
    if args.stats:
        schemes = [make_scheme("word")]
        if scheme.kind.value != "word":
            schemes.append(scheme)
        for row in corpus_length_stats([l for l in lines if l.strip()] or [""], schemes):
            print(f"{row.scheme}\t{row.mean_tokens:.3f}\t{row.ratio:.3f}", file=sys.stderr)
    fmt = _format(args)
    if fmt is None and scheme.kind.value != "word":
        # without a format, subwords are emitted space-separated with no markers
        from .segmentation import segment_sentence
        out = [" ".join(segment_sentence(l, scheme).subwords()) for l in lines]
    else:
        rep = Representation(scheme, fmt)
        out = [" ".join(rep.to_tokens(l)) for l in lines]
    _write_lines(args.output, out)
    return 0


def cmd_desegment(args) -> int:
    fmt = FormatSpec(args.format, args.marker, args.boundary_side)
    out, warnings = [], 0
    for line in read_lines(args.input):
        d = format_decode(line.split(), fmt)
        out.append(" ".join(d.words))
        warnings += d.warnings
    _write_lines(args.output, out)
    if warnings:
        print(f"{warnings} format warnings", file=sys.stderr)
    return 0


def cmd_train(args) -> int:
    src = [l.split() for l in read_lines(args.source)]
    tgt = [l.split() for l in read_lines(args.target)]
    if len(src) != len(tgt):
        raise UsageError(f"{args.source} has {len(src)} lines but {args.target} has {len(tgt)}")
    if not src:
        raise UsageError("training corpus is empty")
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    tm = build_phrase_table(zip(src, tgt), args.max_phrase_len, args.iterations)
    tm.table.save(out / "phrase-table.txt")
    model = lm_mod.train(tgt, args.order, args.discount)
    model.save_arpa(out / "lm.arpa")
    print(f"{out / 'phrase-table.txt'}: {len(tm.table)} source phrases, "
          f"{tm.table.n_options()} options", file=sys.stderr)
    print(f"{out / 'lm.arpa'}: order {model.order}, n-grams {model.counts()}", file=sys.stderr)
    return 0


def _decoder_config(args) -> DecoderConfig:
    weights = FeatureWeights.load(args.weights) if args.weights else FeatureWeights()
    return DecoderConfig(
        algorithm=args.search, stack_size=args.stack_size, table_limit=args.table_limit,
        pop_limit=args.cube_pop_limit, max_phrase_length=args.max_phrase_len,
        weights=weights, oov_penalty=args.oov_penalty)


def _sweep_configs(path, base: DecoderConfig) -> list:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",))
    try:
        cp.read(path, encoding="utf-8") or (_ for _ in ()).throw(UsageError(f"cannot read {path}"))
    except configparser.Error as exc:
        raise UsageError(str(exc)) from None
    out = []
    for name in cp.sections():
        kind, _, label = name.partition(" ")
        if kind != "run":
            continue
        sec = cp[name]
        out.append((label.strip(), base.with_(
            algorithm=sec.get("search", base.algorithm.value),
            stack_size=sec.getint("stack_size", base.stack_size),
            table_limit=sec.getint("table_limit", base.table_limit),
            pop_limit=sec.getint("cube_pop_limit", base.pop_limit),
            max_phrase_length=sec.getint("max_phrase_length", base.max_phrase_length))))
    return out


def cmd_decode(args) -> int:
    for p in (args.table, args.lm):
        if not Path(p).is_file():
            raise UsageError(f"missing model file {p}")
    table = PhraseTable.load(args.table)
    model = lm_mod.load_arpa(args.lm)
    sources = [l.split() for l in read_lines(args.input)]
    base = _decoder_config(args)
    runs = _sweep_configs(args.sweep, base) if args.sweep else [(None, base)]
    failed = 0
    for label, cfg in runs:
        decoder = Decoder(table, model, cfg)
        outputs, timing = time_decode(lambda: decode_corpus(sources, decoder, args.threads))
        out_path = args.output
        if label is not None:
            out_path = f"{args.output or 'decode'}.{label}"
        _write_lines(out_path, [" ".join(o.target) for o in outputs])
        failed += sum(1 for o in outputs if o.error)
        stats = {
            "label": label or "decode",
            "sentences": len(outputs),
            "cpu_seconds": timing.cpu_seconds,
            "ms_per_sentence": timing.ms_per_sentence,
            "created": sum(o.stats.created for o in outputs),
            "evaluated": sum(o.stats.evaluated for o in outputs),
            "recombined": sum(o.stats.recombined for o in outputs),
            "pruned": sum(o.stats.pruned for o in outputs),
            "failed": sum(1 for o in outputs if o.error),
        }
        line = "\t".join(f"{k}={v}" for k, v in stats.items())
        print(line, file=sys.stderr)
        if args.stats:
            with open(args.stats, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(stats) + "\n")
    return 1 if failed else 0


def cmd_bench(args) -> int:
    spec = load_spec(args.spec, args.data_dir)
    report = run_bench(spec, threads=args.threads)
    table = report.render()
    sys.stdout.write(table)
    if args.out:
        Path(args.out + ".txt").write_text(table, encoding="utf-8")
        Path(args.out + ".tsv").write_text(report.records(), encoding="utf-8")
    return 1 if report.failed else 0


def cmd_bleu(args) -> int:
    hyps = read_lines(args.hyp)
    refs = read_lines(args.ref)
    if args.format:
        fmt = FormatSpec(args.format, args.marker)
        hyps = [format_decode(h.split(), fmt).words for h in hyps]
    else:
        hyps = [h.split() for h in hyps]
    r = bleu(hyps, [x.split() for x in refs])
    print(f"BLEU = {r.bleu:.2f}, " + "/".join(f"{100 * p:.1f}" for p in r.precisions)
          + f" (BP={r.brevity_penalty:.3f}, hyp_len={r.hyp_len}, ref_len={r.ref_len})")
    return 0


def cmd_make_corpus(args) -> int:
    corpus = make_corpus(args.train, args.test, seed=args.seed)
    paths = corpus.write(args.directory)
    for p in paths.values():
        print(p, file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="subsmt", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("segment", help="segment sentences and write a flat corpus")
    p.add_argument("input")
    p.add_argument("-o", "--output")
    p.add_argument("--stats", action="store_true", help="print length statistics to stderr")
    _add_representation(p)
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("desegment", help="rebuild words from a flat corpus")
    p.add_argument("input")
    p.add_argument("-o", "--output")
    p.add_argument("--format", choices=["boundary", "internal", "space"], required=True)
    p.add_argument("--marker", default="_")
    p.add_argument("--boundary-side", choices=["first", "last"], default="last")
    p.set_defaults(func=cmd_desegment)

    p = sub.add_parser("train", help="train a phrase table and ARPA language model")
    p.add_argument("--source", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--order", type=int, default=10)
    p.add_argument("--discount", type=float, default=0.75)
    p.add_argument("--max-phrase-len", type=int, default=7)
    p.add_argument("--iterations", type=int, default=5)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("decode", help="translate a flat corpus")
    p.add_argument("--input", required=True)
    p.add_argument("--table", required=True)
    p.add_argument("--lm", required=True)
    p.add_argument("-o", "--output")
    p.add_argument("--search", choices=["stack", "cube"], default="stack")
    p.add_argument("--stack-size", type=int, default=100)
    p.add_argument("--table-limit", type=int, default=20)
    p.add_argument("--cube-pop-limit", type=int, default=1000)
    p.add_argument("--max-phrase-len", type=int, default=7)
    p.add_argument("--oov-penalty", type=float, default=-10.0)
    p.add_argument("--weights")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--sweep", help="INI file of [run LABEL] decoder settings")
    p.add_argument("--stats", help="append per-run JSON statistics to this file")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("bench", help="run an experiment spec or preset")
    p.add_argument("spec", help="spec file, or one of: table2 table3 table4 toy")
    p.add_argument("--data-dir", help="directory holding train/test files")
    p.add_argument("--out", help="write OUT.txt and OUT.tsv")
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("bleu", help="corpus BLEU of a hypothesis file")
    p.add_argument("--hyp", required=True)
    p.add_argument("--ref", required=True)
    p.add_argument("--format", choices=["boundary", "internal", "space"])
    p.add_argument("--marker", default="_")
    p.set_defaults(func=cmd_bleu)

    p = sub.add_parser("make-corpus", help="write the synthetic related-language corpus")
    p.add_argument("directory")
    p.add_argument("--train", type=int, default=2000)
    p.add_argument("--test", type=int, default=100)
    p.add_argument("--seed", type=int, default=13)
    p.set_defaults(func=cmd_make_corpus)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, SpecError, OSError, ValueError) as exc:
        print(f"subsmt {args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
