"""Regenerate the synthetic test fixtures and the bundled BPE model.

    python scripts/make_fixtures.py

Everything is seeded, so reruns produce identical files.
"""

import random
from pathlib import Path

from mwebraille import mwe, subword, transfer, treebank

ROOT = Path(__file__).resolve().parents[1]
DATA = ROOT / "tests" / "data"
PKG_DATA = ROOT / "src" / "mwebraille" / "data"

WORKED_EXAMPLE = ("[S [NP [NNP Kavita] [NNP Sharma]] [VP [VBZ has] [VP [VBN booked] [NP [NP [DT the] [NN ticket]]] "
          "[PP [IN for] [NP [NP [DT the] [NN morning] [NN flight]] [PP [TO to] [NP [NNP Delhi]]]]]]] [. .]]")

FIRST = ["Kavita", "Ravi", "Anita", "Suresh", "Priya", "Amit", "Neha", "Rahul", "Meena", "Vijay"]
LAST = ["Sharma", "Verma", "Gupta", "Patel", "Singh", "Joshi", "Mehta", "Rao"]
CITIES = ["Delhi", "Mumbai", "Jaipur", "Pune", "Kolkata", "Chennai"]
NOUNS = ["ticket", "book", "letter", "shake", "flight", "train", "call", "bath", "exam", "meal"]
MODS = ["morning", "banana", "train", "evening", "school", "mango", "office"]
LIGHT = [("booked", "VBD"), ("took", "VBD"), ("made", "VBD"), ("gave", "VBD"), ("got", "VBD"),
         ("has", "VBZ"), ("did", "VBD")]
OTHER_V = [("saw", "VBD"), ("wrote", "VBD"), ("liked", "VBD"), ("visited", "VBD")]
DETS = ["the", "a"]


def name_np(rng):
    if rng.random() < 0.6:
        return f"[NP [NNP {rng.choice(FIRST)}] [NNP {rng.choice(LAST)}]]"
    return f"[NP [NNP {rng.choice(FIRST)}]]"


def obj_np(rng):
    if rng.random() < 0.5:
        return f"[NP [DT {rng.choice(DETS)}] [NN {rng.choice(MODS)}] [NN {rng.choice(NOUNS)}]]"
    return f"[NP [DT {rng.choice(DETS)}] [NN {rng.choice(NOUNS)}]]"


def sentence(rng):
    verb, tag = rng.choice(LIGHT + OTHER_V)
    vp = f"[VP [{tag} {verb}] {obj_np(rng)}"
    if rng.random() < 0.5:
        vp += f" [PP [TO to] [NP [NNP {rng.choice(CITIES)}]]]"
    vp += "]"
    if rng.random() < 0.3:
        vp = f"[VP [MD will] [VP [VB {verb_base(verb)}] {obj_np(rng)}]]"
    return f"[S {name_np(rng)} {vp} [. .]]"


def verb_base(v):
    return {"booked": "book", "took": "take", "made": "make", "gave": "give", "got": "get", "has": "have",
            "did": "do", "saw": "see", "wrote": "write", "liked": "like", "visited": "visit"}[v]


def corpus(n=100, seed=1):
    rng = random.Random(seed)
    lines = [WORKED_EXAMPLE] + [sentence(rng) for _ in range(n - 1)]
    return lines


CONS = "कखगघचछजझटठडढणतथदधनपफबभमयरलवशषसह"
MATRAS = ["", "", "ा", "ि", "ी", "ु", "ू", "े", "ै", "ो", "ौ"]
VOWELS = "अआइईउऊएऐओऔ"
# Hindi words do not begin with ण
INITIAL = CONS.replace("ण", "")
REAL = ["भारत", "शिक्षा", "स्वास्थ्य", "विकास", "लोग", "काम", "कविता", "शर्मा", "दिल्ली", "सुबह",
        "फ्लाइट", "बुक", "मोदी", "हिंदी", "मराठी", "नेपाली", "गुजराती", "उर्दू", "पुस्तक", "विद्यालय"]


def devanagari_word(rng):
    parts = []
    if rng.random() < 0.2:
        parts.append(rng.choice(VOWELS))
    for _ in range(rng.randint(1, 3)):
        c = rng.choice(CONS if parts else INITIAL)
        if rng.random() < 0.15:
            c += "्" + rng.choice(CONS)
        parts.append(c + rng.choice(MATRAS))
        if rng.random() < 0.1:
            parts.append("ं")
    return "".join(parts)


def word_list(n=1000, seed=2):
    rng = random.Random(seed)
    words = list(REAL)
    seen = set(words)
    while len(words) < n:
        w = devanagari_word(rng)
        if w not in seen:
            seen.add(w)
            words.append(w)
    return words


def bleu_fixture(n=50, seed=3):
    rng = random.Random(seed)
    vocab = "the a cat dog sat on mat ran fast big red".split()
    hyps, refs = [], []
    for _ in range(n):
        ref = [rng.choice(vocab) for _ in range(rng.randint(4, 12))]
        hyp = [w if rng.random() < 0.7 else rng.choice(vocab) for w in ref]
        if rng.random() < 0.3:
            hyp = hyp[: rng.randint(3, len(hyp))]
        hyps.append(" ".join(hyp))
        refs.append(" ".join(ref))
    return hyps, refs


def write(path, lines):
    path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")


def main():
    DATA.mkdir(parents=True, exist_ok=True)
    lines = corpus()
    write(DATA / "corpus100.txt", lines)
    bad = list(lines)
    bad[37] = bad[37].rstrip("]")  # unbalanced brackets
    write(DATA / "corpus100_corrupt.txt", bad)
    write(DATA / "devanagari_words.txt", word_list())
    hyps, refs = bleu_fixture()
    write(DATA / "bleu50.hyp", hyps)
    write(DATA / "bleu50.ref", refs)

    # bundled BPE model: trained on the words of the MWE-substituted corpus
    rules = transfer.load_rules(PKG_DATA / "rules_en_hi.json")
    lex = mwe.default_lexicon()
    kb = mwe.load_kb(PKG_DATA / "kb.tsv", lex)
    chart = mwe.default_translit_chart()
    freqs = subword.word_frequencies([])
    for line in lines:
        t = treebank.parse_tree(line)
        res = transfer.transfer(t, rules)
        aug = mwe.augment(res, mwe.recognize(t, lex), kb, chart, "hi")
        freqs.update(treebank.words(aug))
        freqs.update(treebank.words(t))
    model = subword.train_bpe(freqs, 300)
    subword.save_model(model, PKG_DATA / "bpe_en_hi.model")
    print(f"{len(model.merges)} merges")


if __name__ == "__main__":
    main()
