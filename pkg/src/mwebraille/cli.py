"""Command line entry point: ``mwebraille <subcommand> ...``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 finished with skipped
records.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from collections import Counter
from contextlib import contextmanager
from importlib import resources

from . import braille, evalmetrics, mwe, pipeline, subword, transfer, treebank
from .errors import DataError

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_PARTIAL = 0, 1, 2, 3

log = logging.getLogger("mwebraille")


def _bundled(name):
    return str(resources.files("mwebraille") / "data" / name)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


@contextmanager
def _open_out(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            yield fh


def _read(path):
    if path in (None, "-"):
        return sys.stdin.read().splitlines()
    with open(path, encoding="utf-8") as fh:
        return fh.read().splitlines()


def _trees(args):
    """Parsed (index, tree) pairs; bad lines are logged and counted."""
    good, bad = [], 0
    for idx, line in treebank.iter_tree_lines(_read(args.input)):
        try:
            good.append((idx, treebank.parse_tree(line)))
        except DataError as e:
            log.warning("sentence %d skipped: %s", idx, e)
            bad += 1
    return good, bad


def cmd_parse(args):
    trees, bad = _trees(args)
    with _open_out(args.out) as fh:
        for _, t in trees:
            fh.write(treebank.serialize_tree(t, args.style, not args.strip_leaves) + "\n")
    return EXIT_PARTIAL if bad else EXIT_OK


def _map_json(m: dict) -> list:
    return [[list(k), list(v)] for k, v in sorted(m.items())]


def cmd_transfer(args):
    rules = transfer.load_rules(args.rules)
    trees, bad = _trees(args)
    maps = []
    with _open_out(args.out) as fh:
        for idx, t in trees:
            try:
                res = transfer.transfer(t, rules)
            except DataError as e:
                log.warning("sentence %d skipped: %s", idx, e)
                bad += 1
                continue
            fh.write(treebank.serialize_tree(res.tree, args.style, not args.strip_leaves) + "\n")
            maps.append({"sentence_index": idx,
                         "applied_rules": [[rid, list(a)] for rid, a in res.applied_rules],
                         "address_map": _map_json(res.address_map)})
    if args.emit_map:
        with open(args.emit_map, "w", encoding="utf-8") as fh:
            for m in maps:
                fh.write(json.dumps(m, ensure_ascii=False) + "\n")
    return EXIT_PARTIAL if bad else EXIT_OK


def cmd_mwe(args):
    rules = transfer.load_rules(args.rules)
    lexicon = mwe.load_lexicon(args.lexicon)
    kb = mwe.load_kb(args.kb, lexicon)
    chart = mwe.load_translit_chart(args.translit)
    trees, bad = _trees(args)
    spans_out = []
    with _open_out(args.out) as fh:
        for idx, t in trees:
            try:
                res = transfer.transfer(t, rules)
                spans = mwe.recognize(t, lexicon)
                aug = mwe.augment(res, spans, kb, chart, args.lang)
            except DataError as e:
                log.warning("sentence %d skipped: %s", idx, e)
                bad += 1
                continue
            fh.write(treebank.serialize_tree(aug) + "\n")
            spans_out.append({"sentence_index": idx, "spans": [
                {"kind": s.kind.value, "surface": s.surface, "leaf_addresses": [list(a) for a in s.leaf_addresses]}
                for s in spans]})
    if args.spans:
        with open(args.spans, "w", encoding="utf-8") as fh:
            for rec in spans_out:
                fh.write(json.dumps(rec, ensure_ascii=False) + "\n")
    return EXIT_PARTIAL if bad else EXIT_OK


def cmd_subword(args):
    if args.action == "train":
        model = subword.train_bpe(subword.word_frequencies(_read(args.input)), args.merges)
        subword.save_model(model, args.model)
        log.info("%d merges written to %s", len(model.merges), args.model)
        return EXIT_OK
    if args.action == "apply":
        if not args.model:
            raise UsageError("subword apply needs --model")
        model = subword.load_model(args.model)
        with _open_out(args.out) as fh:
            for line in _read(args.input):
                fh.write(" ".join(subword.encode(model, line)) + "\n")
        return EXIT_OK
    with _open_out(args.out) as fh:
        for line in _read(args.input):
            fh.write(subword.decode(line.split()) + "\n")
    return EXIT_OK


def cmd_braille(args):
    chart = braille.load_chart(args.chart)
    tally: Counter = Counter()
    with _open_out(args.out) as fh:
        for line in _read(args.input):
            if args.decode:
                fh.write(braille.decode_braille(line, chart) + "\n")
            else:
                fh.write(braille.encode_braille(line, chart, tally) + "\n")
    if args.stats:
        print(json.dumps({"unmapped": dict(sorted(tally.items())), "unmapped_total": sum(tally.values())},
                         ensure_ascii=False), file=sys.stderr)
    return EXIT_OK


def cmd_bleu(args):
    try:
        cfg = evalmetrics.BleuConfig.from_flag(args.orders, args.smooth)
    except ValueError as e:
        raise UsageError(str(e)) from None
    report = evalmetrics.evaluate_corpus(args.hyp, args.ref, cfg, args.pair or "")
    print(f"BLEU {report.system_score:.4f} over {report.n} sentences (smoothing={report.smoothing})")
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            json.dump(report.to_dict(), fh, ensure_ascii=False, indent=2)
            fh.write("\n")
    return EXIT_OK


def cmd_pipeline(args):
    cfg = pipeline.load_config(args.config)
    if args.out:
        cfg = pipeline.PipelineConfig(cfg.language_pair, cfg.paths, cfg.mode, args.out,
                                      cfg.subword_source and not args.no_subword_source,
                                      cfg.subword_target and not args.no_subword_target)
    summary = pipeline.run_pipeline(cfg, args.input, args.translated, args.target, args.workers)
    print(f"{summary.processed}/{summary.n} sentences processed, {len(summary.skipped)} skipped; "
          f"manifest: {summary.manifest_path}")
    return EXIT_PARTIAL if summary.skipped else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="mwebraille", description="MWE-aware English to Bharati Braille preprocessing toolkit")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def io(sp, out=True):
        sp.add_argument("--in", dest="input", default="-", help="input file (default stdin)")
        if out:
            sp.add_argument("--out", default="-", help="output file (default stdout)")

    sp = sub.add_parser("parse", help="normalize bracketed trees")
    io(sp)
    sp.add_argument("--style", choices=("square", "round"), default="square")
    sp.add_argument("--strip-leaves", action="store_true")
    sp.set_defaults(func=cmd_parse)

    sp = sub.add_parser("transfer", help="apply transfer-grammar rules")
    io(sp)
    sp.add_argument("--rules", default=_bundled("rules_en_hi.json"))
    sp.add_argument("--emit-map", help="JSON lines file of applied rules and address maps")
    sp.add_argument("--style", choices=("square", "round"), default="square")
    sp.add_argument("--strip-leaves", action="store_true")
    sp.set_defaults(func=cmd_transfer)

    sp = sub.add_parser("mwe", help="transfer, recognize MWEs and substitute translations")
    io(sp)
    sp.add_argument("--rules", default=_bundled("rules_en_hi.json"))
    sp.add_argument("--kb", default=_bundled("kb.tsv"))
    sp.add_argument("--lexicon", default=_bundled("light_verbs.txt"))
    sp.add_argument("--translit", default=_bundled("translit_devanagari.tsv"))
    sp.add_argument("--lang", default="hi")
    sp.add_argument("--spans", help="JSON lines file of recognized spans")
    sp.set_defaults(func=cmd_mwe)

    sp = sub.add_parser("subword", help="train, apply or undo BPE segmentation")
    sp.add_argument("action", choices=("train", "apply", "decode"))
    io(sp)
    sp.add_argument("--model")
    sp.add_argument("--merges", type=int, default=8000, help="merge ceiling for training (default 8000)")
    sp.set_defaults(func=cmd_subword)

    sp = sub.add_parser("braille", help="encode text as Bharati Braille")
    io(sp)
    sp.add_argument("--chart", default=_bundled("bharati_devanagari.tsv"))
    sp.add_argument("--stats", action="store_true", help="print unmapped-character counts to stderr")
    sp.add_argument("--decode", action="store_true", help="decode braille back to text")
    sp.set_defaults(func=cmd_braille)

    sp = sub.add_parser("bleu", help="sentence and system BLEU")
    sp.add_argument("--hyp", required=True)
    sp.add_argument("--ref", required=True)
    sp.add_argument("--orders", type=int, default=4)
    sp.add_argument("--smooth", default=None, help="none or eps:<value>, e.g. eps:0.1")
    sp.add_argument("--report", help="write the JSON report here")
    sp.add_argument("--pair", help="language pair recorded in the report")
    sp.set_defaults(func=cmd_bleu)

    sp = sub.add_parser("pipeline", help="run the whole corpus pipeline")
    sp.add_argument("--config", required=True)
    sp.add_argument("--in", dest="input", required=True, help="tree file")
    sp.add_argument("--out", help="output directory (overrides the config)")
    sp.add_argument("--translated", help="target-language text for the Braille stage")
    sp.add_argument("--target", help="target side of the parallel corpus (written to train.tgt)")
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--no-subword-source", action="store_true")
    sp.add_argument("--no-subword-target", action="store_true")
    sp.set_defaults(func=cmd_pipeline)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "func", None):
            raise UsageError(parser.format_help())
        if args.command == "subword" and args.action == "train" and not args.model:
            raise UsageError("subword train needs --model")
    except UsageError as e:
        print(e, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as e:  # --help
        return EXIT_OK if not e.code else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as e:
        print(e, file=sys.stderr)
        return EXIT_USAGE
    except (DataError, OSError, ValueError) as e:
        print(f"mwebraille: error: {e}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
