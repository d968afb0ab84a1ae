"""Carry the worked-example sentence through every stage and print each layer.

    python scripts/worked_example.py
"""

from importlib import resources
from pathlib import Path

from mwebraille import braille, mwe, subword, transfer, treebank

DATA = resources.files("mwebraille") / "data"
FIXTURE = Path(__file__).resolve().parent.parent / "tests" / "data" / "worked_example"


def main():
    sentence = (FIXTURE / "sentence.txt").read_text(encoding="utf-8").strip()
    tree = treebank.parse_tree((FIXTURE / "parse.txt").read_text(encoding="utf-8"))
    rules = transfer.load_rules(DATA / "rules_en_hi.json")
    lexicon = mwe.load_lexicon(DATA / "light_verbs.txt")
    kb = mwe.load_kb(DATA / "kb.tsv", lexicon)
    chart = mwe.load_translit_chart(DATA / "translit_devanagari.tsv")

    result = transfer.transfer(tree, rules)
    spans = mwe.recognize(tree, lexicon)
    final = mwe.augment(result, spans, kb, chart, "hi")
    model = subword.load_model(DATA / "bpe_en_hi.model")
    hindi = " ".join(w for w in treebank.words(final) if any("ऀ" <= ch <= "ॿ" for ch in w))

    rows = [
        ("sentence", sentence),
        ("parse", treebank.serialize_tree(tree)),
        ("transferred", treebank.serialize_tree(result.tree, include_leaves=False)),
        ("substituted", treebank.serialize_tree(final)),
        ("sub-words", " ".join(subword.encode(model, " ".join(treebank.words(final))))),
        ("braille (Hindi words)", braille.encode_braille(hindi.replace("_", " "), braille.default_chart())),
    ]
    for name, text in rows:
        print(f"{name}:\n  {text}")
    print("spans:")
    for s in spans:
        print(f"  {s.kind.value:<13} {s.surface}")
    for name, fixture in [("parse", "parse.txt"), ("transferred", "transferred.txt"),
                          ("substituted", "ne_translated.txt")]:
        want = (FIXTURE / fixture).read_text(encoding="utf-8").strip()
        got = dict(rows)[name]
        print(f"{name} matches {fixture}: {got == want}")


if __name__ == "__main__":
    main()
