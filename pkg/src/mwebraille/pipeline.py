"""Corpus pipeline: parse -> transfer -> (MWE substitution) -> sub-words, plus
Braille encoding of translated text.

Each stage writes one file with one record per line; all stage files are
line-aligned.  A sentence that fails any stage is logged, left out of every
stage file and listed in the manifest.  Neural translation itself happens
outside this package: the sub-worded files are its training input and the
Braille stage reads its output.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

from . import braille, mwe, subword, transfer, treebank
from .errors import DataError

log = logging.getLogger(__name__)

STAGES = ("parsed", "transferred", "ne_translated", "subworded", "braille")
STAGE_FILES = {
    "parsed": "parsed.txt",
    "transferred": "transferred.txt",
    "ne_translated": "ne_translated.txt",
    "subworded": "train.src",
    "braille": "braille.txt",
}
LANGUAGE_PAIRS = ("en-hi", "en-mr", "en-ne", "en-gu", "en-ur")
PATH_FIELDS = ("rules", "kb", "light_verb_lexicon", "translit_chart", "bpe_model", "braille_chart")
MWE_FIELDS = ("kb", "light_verb_lexicon", "translit_chart")


class MissingPath(DataError):
    def __init__(self, name):
        super().__init__(f"config is missing the {name!r} path")
        self.field = name


class UnknownLanguagePair(DataError):
    pass


@dataclass(frozen=True)
class PipelineConfig:
    language_pair: str
    paths: dict
    mode: str = "mwe"
    output_dir: str = "pipeline_out"
    subword_source: bool = True
    subword_target: bool = True

    @property
    def target_lang(self) -> str:
        return self.language_pair.split("-", 1)[1]

    def digest(self) -> str:
        """Hash of the settings and data files; the output directory is left out."""
        settings = asdict(self)
        del settings["output_dir"], settings["paths"]
        h = hashlib.sha256(json.dumps(settings, sort_keys=True, ensure_ascii=False).encode())
        for name in sorted(self.paths):
            h.update(name.encode())
            h.update(file_sha256(self.paths[name]).encode())
        return h.hexdigest()


def file_sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


def config_from_dict(raw: dict, base_dir=".") -> PipelineConfig:
    pair = raw.get("language_pair")
    if pair not in LANGUAGE_PAIRS:
        raise UnknownLanguagePair(f"unknown language pair {pair!r}; expected one of {LANGUAGE_PAIRS}")
    mode = raw.get("mode", "mwe")
    if mode not in ("baseline", "mwe"):
        raise DataError(f"mode must be 'baseline' or 'mwe', got {mode!r}")
    given = raw.get("paths") or {}
    unknown = set(given) - set(PATH_FIELDS)
    if unknown:
        raise DataError(f"unknown path field(s) {sorted(unknown)}")
    required = ("rules", "bpe_model") + (MWE_FIELDS if mode == "mwe" else ())
    for name in required:
        if not given.get(name):
            raise MissingPath(name)
    paths = {}
    for name, p in given.items():
        full = Path(base_dir, p)
        if not full.is_file():
            raise DataError(f"{name} path {str(full)!r} does not exist")
        paths[name] = str(full)
    # output goes relative to the working directory, data paths relative to the config
    out = str(Path(raw.get("output_dir", "pipeline_out")))
    return PipelineConfig(pair, paths, mode, out,
                          bool(raw.get("subword_source", True)), bool(raw.get("subword_target", True)))


def load_config(path) -> PipelineConfig:
    with open(path, encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as e:
            raise DataError(f"config is not valid JSON: {e}") from None
    return config_from_dict(raw, Path(path).parent)


@dataclass
class Resources:
    rules: transfer.RuleSet
    bpe: subword.BpeModel
    lexicon: frozenset = frozenset()
    kb: Optional[mwe.KnowledgeBase] = None
    chart: Optional[mwe.TransliterationChart] = None
    braille_chart: Optional[braille.BrailleChart] = None


def load_resources(cfg: PipelineConfig) -> Resources:
    p = cfg.paths
    res = Resources(transfer.load_rules(p["rules"]), subword.load_model(p["bpe_model"]))
    if "light_verb_lexicon" in p:
        res.lexicon = mwe.load_lexicon(p["light_verb_lexicon"])
    if "kb" in p:
        res.kb = mwe.load_kb(p["kb"], res.lexicon)
    if "translit_chart" in p:
        res.chart = mwe.load_translit_chart(p["translit_chart"])
    if "braille_chart" in p:
        res.braille_chart = braille.load_chart(p["braille_chart"])
    return res


@dataclass
class StageRecord:
    sentence_index: int
    stage: str
    payload: str


def process_sentence(line: str, res: Resources, mode: str, lang: str, subword_source=True) -> list[StageRecord]:
    """Stage records for one tree line; raises on bad input."""
    tree = treebank.parse_tree(line)
    out = [("parsed", treebank.serialize_tree(tree))]
    result = transfer.transfer(tree, res.rules)
    out.append(("transferred", treebank.serialize_tree(result.tree, include_leaves=False)))
    final = result.tree
    if mode == "mwe":
        spans = mwe.recognize(tree, res.lexicon)
        final = mwe.augment(result, spans, res.kb, res.chart, lang)
        out.append(("ne_translated", treebank.serialize_tree(final)))
    text = " ".join(treebank.words(final))
    if subword_source:
        text = " ".join(subword.encode(res.bpe, text))
    out.append(("subworded", text))
    return [StageRecord(-1, name, payload) for name, payload in out]


# per-process state for the worker pool
_WORKER: dict = {}


def _init_worker(cfg: PipelineConfig):
    _WORKER["cfg"] = cfg
    _WORKER["res"] = load_resources(cfg)


def _work(item):
    idx, line = item
    cfg, res = _WORKER["cfg"], _WORKER["res"]
    try:
        recs = process_sentence(line, res, cfg.mode, cfg.target_lang, cfg.subword_source)
    except (DataError, ValueError, RecursionError) as e:
        return idx, None, f"{type(e).__name__}: {e}"
    for r in recs:
        r.sentence_index = idx
    return idx, recs, None


@dataclass
class RunSummary:
    n: int
    processed: int
    skipped: list = field(default_factory=list)
    manifest_path: str = ""
    manifest: dict = field(default_factory=dict)


def _read_lines(path) -> list[str]:
    with open(path, encoding="utf-8") as fh:
        return fh.read().splitlines()


def run_pipeline(cfg: PipelineConfig, tree_file, translated_file=None, target_file=None,
                 workers: int = 1) -> RunSummary:
    """Run every stage over ``tree_file`` and write stage files plus ``manifest.json``.

    ``translated_file`` (target-language text from the external translation
    system) feeds the Braille stage; ``target_file`` (the target side of a
    parallel corpus) is sub-worded into ``train.tgt``.
    """
    out_dir = Path(cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    items = list(treebank.iter_tree_lines(_read_lines(tree_file)))

    if workers > 1 and len(items) > 1:
        with ProcessPoolExecutor(workers, initializer=_init_worker, initargs=(cfg,)) as ex:
            results = list(ex.map(_work, items, chunksize=max(1, len(items) // (workers * 4))))
        res = load_resources(cfg)
    else:
        _init_worker(cfg)
        res = _WORKER["res"]
        results = [_work(it) for it in items]

    enabled = ["parsed", "transferred"] + (["ne_translated"] if cfg.mode == "mwe" else []) + ["subworded"]
    rows: dict = {name: [] for name in enabled}
    skipped = []
    for idx, recs, err in results:
        if recs is None:
            log.warning("sentence %d skipped: %s", idx, err)
            skipped.append({"sentence_index": idx, "error": err})
            continue
        for r in recs:
            rows[r.stage].append(r.payload)

    warnings: dict = {}
    extra_files = []
    if target_file is not None:
        tgt = _read_lines(target_file)
        if cfg.subword_target:
            tgt = [" ".join(subword.encode(res.bpe, line)) for line in tgt]
        extra_files.append(("train.tgt", tgt))
    if translated_file is not None:
        if res.braille_chart is None:
            raise MissingPath("braille_chart")
        tally: Counter = Counter()
        rows["braille"] = [braille.encode_braille(line, res.braille_chart, tally)
                           for line in _read_lines(translated_file)]
        warnings["braille_unmapped"] = dict(sorted(tally.items()))
        enabled.append("braille")

    stages = []
    for name in enabled:
        path = out_dir / STAGE_FILES[name]
        _write_lines(path, rows[name])
        stages.append({"name": name, "file": path.name, "records": len(rows[name]),
                       "sha256": file_sha256(path)})
    for fname, lines in extra_files:
        path = out_dir / fname
        _write_lines(path, lines)
        stages.append({"name": "target", "file": fname, "records": len(lines), "sha256": file_sha256(path)})

    manifest = {
        "config_digest": cfg.digest(),
        "language_pair": cfg.language_pair,
        "mode": cfg.mode,
        "n": len(items),
        "processed": len(items) - len(skipped),
        "skipped": len(skipped),
        "skipped_sentences": skipped,
        "stages": stages,
        "warnings": warnings,
        "created": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }
    mpath = out_dir / "manifest.json"
    with open(mpath, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, ensure_ascii=False, indent=2)
        fh.write("\n")
    return RunSummary(len(items), len(items) - len(skipped), skipped, str(mpath), manifest)


def _write_lines(path, lines):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in lines:
            fh.write(line + "\n")


def bundled_config_path() -> str:
    from importlib import resources
    return str(resources.files("mwebraille") / "data" / "config_en_hi.json")


def default_workers() -> int:
    return max(1, min(4, os.cpu_count() or 1))
