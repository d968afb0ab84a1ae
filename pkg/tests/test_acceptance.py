"""Acceptance suite: one test per criterion, each tagged with a criterion marker.

The terminal summary (see conftest.py) prints a PASS/FAIL line per criterion.
"""

import json
import random
import string
import time
from collections import Counter
from fractions import Fraction
from importlib import resources
from pathlib import Path

import pytest

from mwebraille import braille, evalmetrics, mwe, pipeline, subword, transfer, treebank
from mwebraille.cli import EXIT_PARTIAL, main
from mwebraille.mwe import MweKind

import treegen
from bleu_oracle import oracle_bleu, pairwise_sum
from mwe_oracle import as_set, oracle_spans

DATA = Path(str(resources.files("mwebraille") / "data"))
criterion = pytest.mark.criterion


def read(path):
    return Path(path).read_text(encoding="utf-8")


def leaf_multiset(t):
    return Counter((lab, txt) for _, lab, txt in treebank.leaves(t))


@criterion(1, "improvement column reproduced from the two score columns")
def test_improvement_column():
    rows = [(0.5261, 0.7591, 23.30), (0.5193, 0.7489, 22.96), (0.4937, 0.7145, 22.08),
            (0.4871, 0.7433, 25.62), (0.4693, 0.6945, 22.52)]
    t0 = time.perf_counter()
    for base, mwe_score, gain in rows:
        assert abs(evalmetrics.improvement(base, mwe_score) - gain) <= 0.005
    assert time.perf_counter() - t0 < 1.0


@criterion(2, "system score is the mean of sentence scores")
def test_system_score_mean():
    rng = random.Random(2)
    t0 = time.perf_counter()
    for _ in range(10_000):
        xs = [rng.random() for _ in range(rng.randint(1, 60))]
        m = evalmetrics.system_bleu(xs)
        assert abs(m - pairwise_sum(xs) / len(xs)) <= 1e-12
        ys = xs[:]
        rng.shuffle(ys)
        assert evalmetrics.system_bleu(ys) == m
    for x in (0.0, 1.0, 0.123456789, rng.random()):
        assert evalmetrics.system_bleu([x]) == x
    assert time.perf_counter() - t0 < 5.0
    # spot check against exact rational arithmetic
    xs = [rng.random() for _ in range(1000)]
    exact = sum(map(Fraction, xs)) / len(xs)
    assert abs(evalmetrics.system_bleu(xs) - float(exact)) <= 1e-12


@criterion(3, "worked example: parse, transfer and substitution match the golden files")
def test_worked_example_golden(data_dir):
    golden = data_dir / "worked_example"
    example, transferred, substituted = (read(golden / f).strip() for f in
                        ("parse.txt", "transferred.txt", "ne_translated.txt"))
    t0 = time.perf_counter()
    rules = transfer.load_rules(DATA / "rules_en_hi.json")
    lex = mwe.load_lexicon(DATA / "light_verbs.txt")
    kb = mwe.load_kb(DATA / "kb.tsv", lex)
    chart = mwe.load_translit_chart(DATA / "translit_devanagari.tsv")
    tree = treebank.parse_tree(example)
    res = transfer.transfer(tree, rules)
    aug = mwe.augment(res, mwe.recognize(tree, lex), kb, chart, "hi")
    elapsed = time.perf_counter() - t0
    assert treebank.serialize_tree(tree) == example
    assert treebank.serialize_tree(res.tree, include_leaves=False) == transferred
    assert treebank.serialize_tree(aug) == substituted
    assert elapsed < 1.0


@criterion(4, "MWE recognition matches the worked example and a brute-force oracle")
def test_mwe_recognition(data_dir):
    lex = mwe.default_lexicon()
    tree = treebank.parse_tree(read(data_dir / "worked_example" / "parse.txt"))
    spans = mwe.recognize(tree, lex)
    assert {(s.kind, s.surface) for s in spans} == {
        (MweKind.COMPOSITE_NE, "Kavita Sharma"),
        (MweKind.LIGHT_VERB, "booked the ticket"),
        (MweKind.COMPOUND_NOUN, "morning flight"),
    }
    assert len(spans) == 3
    found = Counter()
    for seed in range(200):
        t = treegen.english_tree(random.Random(seed))
        got = mwe.recognize(t, lex)
        assert as_set(got) == oracle_spans(t), treebank.serialize_tree(t)
        found.update(s.kind for s in got)
    # the synthetic trees exercise every kind
    assert all(found[k] >= 10 for k in MweKind), found


@criterion(5, "treebank parse/serialize round trips")
def test_treebank_roundtrip(data_dir):
    rng = random.Random(5)
    for _ in range(1000):
        t = treegen.random_tree(rng, bare=rng.random() < 0.2)
        for style in ("square", "round"):
            s = treebank.serialize_tree(t, style)
            assert treebank.parse_tree(s) == t
            assert treebank.serialize_tree(treebank.parse_tree(s), style) == s
    lines = [l for l in read(data_dir / "real_trees.txt").splitlines() if l.strip()]
    assert len(lines) == 100
    for line in lines:
        t = treebank.parse_tree(line)
        assert treebank.serialize_tree(t, "round") == line
        assert treebank.parse_tree(treebank.serialize_tree(t)) == t


@criterion(6, "linear transfer rules keep the leaf multiset and map every leaf")
def test_transfer_leaf_preservation():
    rules = transfer.load_rules(DATA / "rules_en_hi.json").linear()
    assert len(rules) > 0 and all(r.is_linear for r in rules)
    rng = random.Random(6)
    fired = 0
    for k in range(1000):
        t = treegen.english_tree(rng) if k % 2 else treegen.random_tree(rng)
        res = transfer.transfer(t, rules)
        fired += bool(res.applied_rules)
        assert leaf_multiset(res.tree) == leaf_multiset(t)
        for a, _, text in treebank.leaves(t):
            assert treebank.node_at(res.tree, res.address_map[a]).text == text
    assert fired >= 400


def _mixed_sentences(rng, n):
    en = read(Path(__file__).parent / "data" / "corpus100.txt")
    en_words = sorted({w for line in en.splitlines()
                       for w in treebank.words(treebank.parse_tree(line)) if line.strip()} - {""})
    hi_words = read(Path(__file__).parent / "data" / "devanagari_words.txt").split()
    # scripts the bundled model never saw
    oov_chars = "αβγδεζηθλμπσωжзийклмнпрстуфשלוםمرحبا" + string.digits
    out = []
    for k in range(n):
        words = []
        for _ in range(rng.randint(1, 12)):
            roll = rng.random()
            if k % 10 == 0 or roll < 0.3:
                words.append("".join(rng.choice(oov_chars) for _ in range(rng.randint(1, 9))))
            elif roll < 0.6:
                words.append(rng.choice(en_words))
            else:
                words.append(rng.choice(hi_words))
        out.append(" ".join(words))
    return out


@criterion(7, "sub-word segmentation round trips and the low/lowest merges")
def test_bpe():
    model = subword.load_model(DATA / "bpe_en_hi.model")
    known = {c for a, b in model.merges for c in a + b}
    rng = random.Random(7)
    sentences = _mixed_sentences(rng, 1000)
    fully_oov = [s for s in sentences if not set(s.replace(" ", "")) & known]
    assert len(fully_oov) >= 100
    for s in sentences:
        assert subword.decode(subword.encode(model, s)) == s
    m = subword.train_bpe({"low": 2, "lowest": 1}, 10)
    assert list(m.merges) == [("l", "o"), ("lo", "w"), ("low", "</w>")]


@criterion(8, "Braille round trip, output alphabet, number signs, no coverage warnings")
def test_braille(data_dir):
    chart = braille.load_chart(DATA / "bharati_devanagari.tsv")
    words = read(data_dir / "devanagari_words.txt").split()
    assert len(words) == 1000
    tally = Counter()
    for w in words:
        cells = braille.encode_braille(w, chart, tally)
        assert all(0x2800 <= ord(c) <= 0x283F for c in cells)
        assert braille.decode_braille(cells, chart) == w
    assert sum(tally.values()) == 0
    digits = list(chart.digits)
    rng = random.Random(8)
    for _ in range(200):
        parts = [rng.choice(words) if rng.random() < 0.5 else
                 "".join(rng.choice(digits) for _ in range(rng.randint(1, 6))) for _ in range(6)]
        text = " ".join(parts)
        cells = braille.encode_braille(text, chart)
        runs = sum(p[0] in digits for p in parts)
        # the number sign cell doubles as a letter, so count it only where a run starts
        starts = sum(1 for i, c in enumerate(cells) if c == chart.number_sign
                     and (i == 0 or cells[i - 1] == braille.BLANK)
                     and i + 1 < len(cells) and cells[i + 1] in chart.digits.values())
        assert starts == runs
        assert braille.decode_braille(cells, chart) == text


@criterion(9, "sentence BLEU matches a brute-force oracle")
def test_bleu(data_dir):
    hyp = read(data_dir / "bleu50.hyp").splitlines()
    ref = read(data_dir / "bleu50.ref").splitlines()
    assert len(hyp) == len(ref) == 50
    for h, r in zip(hyp, ref):
        got = evalmetrics.sentence_bleu(h.split(), [r.split()])
        assert abs(got - oracle_bleu(h.split(), [r.split()])) <= 1e-9
    s = "the ticket for the morning flight".split()
    assert evalmetrics.sentence_bleu(s, [s]) == 1.0
    assert evalmetrics.sentence_bleu(s, ["कविता ने टिकट बुक की".split()]) == 0.0


@criterion(10, "pipeline runs are deterministic and isolate bad lines")
def test_pipeline_determinism(data_dir, tmp_path, capsys):
    cfg = pipeline.bundled_config_path()
    outs = [tmp_path / "run1", tmp_path / "run2"]
    for out in outs:
        assert main(["pipeline", "--config", cfg, "--in", str(data_dir / "corpus100.txt"),
                     "--out", str(out)]) == 0
    names = sorted(p.name for p in outs[0].iterdir())
    assert names == sorted(p.name for p in outs[1].iterdir())
    for name in names:
        if name != "manifest.json":
            assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes(), name
    m1, m2 = (json.loads(read(o / "manifest.json")) for o in outs)
    m1.pop("created"), m2.pop("created")
    assert m1 == m2 and m1["processed"] == 100

    bad = tmp_path / "bad"
    code = main(["pipeline", "--config", cfg, "--in", str(data_dir / "corpus100_corrupt.txt"),
                 "--out", str(bad)])
    assert code == EXIT_PARTIAL == 3
    m = json.loads(read(bad / "manifest.json"))
    assert m["processed"] == 99
    assert len(read(bad / "train.src").splitlines()) == 99
