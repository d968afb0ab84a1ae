"""Byte-pair-encoding sub-word segmentation.

Words are split into characters plus an end-of-word symbol and the most
frequent adjacent pair is merged repeatedly.  Encoded output marks every
non-final piece of a word with ``@@`` so that decoding is a plain string
operation; words never seen in training simply fall apart into smaller
pieces.  Underscored MWE tokens such as ``बुक_की`` are ordinary words here.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property

from .errors import DataError, LineError

END = "</w>"
MARK = "@@"
HEADER = "bpe v1"


class EmptyCorpus(DataError):
    pass


class VersionMismatch(DataError):
    pass


class MalformedMergeLine(LineError):
    pass


@dataclass(frozen=True)
class BpeModel:
    merges: tuple[tuple[str, str], ...] = ()
    # Not persisted; a loaded model rebuilds it from its merges.
    vocabulary: frozenset = field(default=frozenset(), compare=False)
    end_marker: str = END

    @cached_property
    def ranks(self) -> dict:
        return {pair: i for i, pair in enumerate(self.merges)}


def _vocab_from_merges(merges) -> frozenset:
    out = {END}
    for a, b in merges:
        out.update((a, b, a + b))
    return frozenset(out)


def word_frequencies(lines) -> Counter:
    c: Counter = Counter()
    for line in lines:
        c.update(line.split())
    return c


def _pair_counts(words: dict) -> Counter:
    pairs: Counter = Counter()
    for syms, f in words.items():
        for p in zip(syms, syms[1:]):
            pairs[p] += f
    return pairs


def _merge_word(syms: tuple, pair: tuple) -> tuple:
    a, b = pair
    out, i = [], 0
    while i < len(syms):
        if i + 1 < len(syms) and syms[i] == a and syms[i + 1] == b:
            out.append(a + b)
            i += 2
        else:
            out.append(syms[i])
            i += 1
    return tuple(out)


def train_bpe(corpus: dict, num_merges: int) -> BpeModel:
    """Greedy BPE training over a word -> frequency map.

    Ties between equally frequent pairs go to the lexicographically smallest
    ``(left, right)``; training stops early once no pair occurs twice.
    """
    if num_merges < 0:
        raise ValueError("num_merges must be non-negative")
    words: Counter = Counter()
    for w, f in corpus.items():
        if f > 0 and w:
            words[tuple(w) + (END,)] += f
    if not words:
        raise EmptyCorpus("cannot train on an empty corpus")
    vocab = {s for syms in words for s in syms}
    merges = []
    for _ in range(num_merges):
        pairs = _pair_counts(words)
        if not pairs:
            break
        best = min(pairs, key=lambda p: (-pairs[p], p))
        if pairs[best] < 2:
            break
        merges.append(best)
        vocab.add(best[0] + best[1])
        nxt: Counter = Counter()
        for syms, f in words.items():
            nxt[_merge_word(syms, best)] += f
        words = nxt
    return BpeModel(tuple(merges), frozenset(vocab))


def segment_word(model: BpeModel, word: str) -> list[str]:
    """Symbols of one word after applying merges in training order."""
    syms = tuple(word) + (END,)
    ranks = model.ranks
    while len(syms) > 1:
        best = min(zip(syms, syms[1:]), key=lambda p: ranks.get(p, float("inf")))
        if best not in ranks:
            break
        syms = _merge_word(syms, best)
    return list(syms)


def encode(model: BpeModel, sentence: str) -> list[str]:
    tokens = []
    for word in sentence.split():
        syms = segment_word(model, word)
        if syms[-1] == END:
            syms.pop()
        elif syms[-1].endswith(END):
            syms[-1] = syms[-1][: -len(END)]
        tokens.extend(s + MARK for s in syms[:-1])
        tokens.append(syms[-1])
    return tokens


def decode(tokens) -> str:
    words, cur = [], []
    for t in tokens:
        if t.endswith(MARK):
            cur.append(t[: -len(MARK)])
        else:
            cur.append(t)
            words.append("".join(cur))
            cur = []
    if cur:
        words.append("".join(cur))
    return " ".join(words)


def save_model(model: BpeModel, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(HEADER + "\n")
        for a, b in model.merges:
            fh.write(f"{a} {b}\n")


def load_model(path) -> BpeModel:
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or lines[0].strip() != HEADER:
        raise VersionMismatch(f"expected header {HEADER!r}, got {lines[0] if lines else ''!r}")
    merges = []
    for lineno, line in enumerate(lines[1:], 2):
        parts = line.split(" ")
        if len(parts) != 2 or not all(parts):
            raise MalformedMergeLine(f"expected 'left right', got {line!r}", lineno)
        merges.append((parts[0], parts[1]))
    merges = tuple(merges)
    return BpeModel(merges, _vocab_from_merges(merges))
