"""Multi-word expression recognition, lookup and substitution.

Three kinds are detected on the *source* parse tree:

* composite named entities: runs of two or more sibling ``NNP``/``NNPS``
  leaves under one NP ("Narendra Modi");
* compound nouns: runs of two or more sibling ``NN``/``NNS`` leaves under one
  NP ("banana shake");
* light verbs: a ``VB*`` leaf whose lemma is in the light-verb lexicon,
  immediately followed by an object NP; the span takes the verb plus the leaf
  children of the object's head NP ("book the tickets").

Translations come from a hand-built knowledge base and are written into the
*transferred* tree through the transfer address map.  Named entities missing
from the knowledge base are transliterated; other misses are left alone.
"""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass
from importlib import resources
from typing import Optional

from .errors import DataError, InvalidAddress, LineError
from .transfer import TransferResult
from .treebank import Address, ParseTree, iter_nodes, leaves, node_at, replace_at


class MweKind(str, enum.Enum):
    COMPOSITE_NE = "CompositeNE"
    COMPOUND_NOUN = "CompoundNoun"
    LIGHT_VERB = "LightVerb"


class JoinPolicy(str, enum.Enum):
    SINGLE_LEAF = "single_leaf_underscored"
    PER_WORD = "per_word_leaves"


PRECEDENCE = {MweKind.COMPOSITE_NE: 0, MweKind.LIGHT_VERB: 1, MweKind.COMPOUND_NOUN: 2}

NE_TAGS = frozenset({"NNP", "NNPS"})
NOUN_TAGS = frozenset({"NN", "NNS"})
AUX_SLOT_PREFIXES = ("VB", "MD")


class MalformedRow(LineError):
    pass


class DuplicateKey(LineError):
    pass


class UnmappedAddress(DataError):
    def __init__(self, address):
        super().__init__(f"span leaf {list(address)} did not survive transfer")
        self.address = tuple(address)


@dataclass(frozen=True)
class MweSpan:
    kind: MweKind
    leaf_addresses: tuple[Address, ...]
    surface: str


@dataclass(frozen=True)
class Translation:
    target_text: str
    join_policy: JoinPolicy
    kind: MweKind


def base_label(label: str) -> str:
    """``NP-SBJ-1`` -> ``NP``; punctuation labels are returned as is."""
    head = label.split("=")[0]
    if head.startswith("-"):
        return head
    return head.split("-")[0]


# -- lemmatization ---------------------------------------------------------

IRREGULAR = {
    "took": "take", "taken": "take", "taking": "take",
    "made": "make", "making": "make",
    "gave": "give", "given": "give", "giving": "give",
    "did": "do", "done": "do", "does": "do", "doing": "do",
    "had": "have", "has": "have", "having": "have",
    "got": "get", "gotten": "get", "getting": "get",
    "was": "be", "were": "be", "is": "be", "are": "be", "am": "be", "been": "be", "being": "be",
}

# (suffix, replacement), tried in order
SUFFIX_RULES = (
    ("ies", "y"), ("ied", "y"),
    ("ing", ""), ("ing", "e"),
    ("ed", ""), ("ed", "e"), ("d", ""),
    ("es", ""), ("s", ""),
)


def lemmatize(word: str, lexicon=frozenset()) -> str:
    """Citation form of an English verb.

    Candidates are produced by the irregular table and suffix stripping
    (undoubling a final consonant, as in ``getting``); the first candidate
    found in ``lexicon`` wins, otherwise the first candidate at all.
    """
    w = word.lower()
    if w in lexicon:
        return w
    if w in IRREGULAR:
        return IRREGULAR[w]
    cands = []
    for suf, rep in SUFFIX_RULES:
        if w.endswith(suf) and len(w) - len(suf) >= 2:
            stem = w[: -len(suf)] + rep
            cands.append(stem)
            if not rep and len(stem) > 2 and stem[-1] == stem[-2]:
                cands.append(stem[:-1])
    for c in cands:
        if c in lexicon:
            return c
    return cands[0] if cands else w


def load_lexicon(path) -> frozenset[str]:
    with open(path, encoding="utf-8") as fh:
        return frozenset(
            line.strip().lower() for line in fh if line.strip() and not line.lstrip().startswith("#"))


def default_lexicon() -> frozenset[str]:
    return load_lexicon(resources.files("mwebraille") / "data" / "light_verbs.txt")


# -- recognition -----------------------------------------------------------

def _sibling_runs(tree: ParseTree, tags: frozenset, kind: MweKind) -> list[MweSpan]:
    out = []
    for addr, t in iter_nodes(tree):
        if base_label(t.label) != "NP":
            continue
        run: list[Address] = []
        for i, c in enumerate(list(t.children) + [None]):
            if c is not None and c.text is not None and c.label in tags:
                run.append(addr + (i,))
                continue
            if len(run) >= 2:
                out.append(_span(tree, kind, run))
            run = []
    return out


def _span(tree, kind, addrs) -> MweSpan:
    addrs = tuple(addrs)
    return MweSpan(kind, addrs, " ".join(node_at(tree, a).text for a in addrs))


def _head_np(np: ParseTree, addr: Address) -> tuple[ParseTree, Address]:
    while np.children and np.children[0].text is None and np.children[0].children \
            and base_label(np.children[0].label) == "NP":
        np, addr = np.children[0], addr + (0,)
    return np, addr


def _light_verbs(tree: ParseTree, lexicon) -> list[MweSpan]:
    out = []
    for addr, t in iter_nodes(tree):
        kids = t.children
        for i, c in enumerate(kids[:-1]):
            if c.text is None or not c.label.startswith("VB"):
                continue
            if lemmatize(c.text, lexicon) not in lexicon:
                continue
            obj = kids[i + 1]
            if obj.text is not None or base_label(obj.label) != "NP":
                continue
            head, haddr = _head_np(obj, addr + (i + 1,))
            objs = [haddr + (j,) for j, g in enumerate(head.children) if g.text is not None]
            if objs:
                out.append(_span(tree, MweKind.LIGHT_VERB, [addr + (i,)] + objs))
    return out


def recognize(tree: ParseTree, lexicon=None) -> list[MweSpan]:
    """All MWE spans of ``tree``, pairwise disjoint, in leaf order."""
    if lexicon is None:
        lexicon = default_lexicon()
    order = {a: k for k, (a, _, _) in enumerate(leaves(tree))}
    cands = (_sibling_runs(tree, NE_TAGS, MweKind.COMPOSITE_NE)
             + _light_verbs(tree, lexicon)
             + _sibling_runs(tree, NOUN_TAGS, MweKind.COMPOUND_NOUN))
    cands.sort(key=lambda s: (PRECEDENCE[s.kind], order[s.leaf_addresses[0]], -len(s.leaf_addresses)))
    taken: set = set()
    chosen = []
    for s in cands:
        if taken.isdisjoint(s.leaf_addresses):
            chosen.append(s)
            taken.update(s.leaf_addresses)
    chosen.sort(key=lambda s: order[s.leaf_addresses[0]])
    return chosen


# -- knowledge base --------------------------------------------------------

def normalize_key(text: str, kind: MweKind, lexicon=frozenset()) -> str:
    toks = text.lower().split()
    if kind == MweKind.LIGHT_VERB and toks:
        toks[0] = lemmatize(toks[0], lexicon)
    return " ".join(toks)


@dataclass(frozen=True)
class KnowledgeBase:
    entries: dict
    lexicon: frozenset = frozenset()

    def __len__(self):
        return len(self.entries)

    def lookup(self, span: MweSpan, lang: str) -> Optional[Translation]:
        return self.entries.get((normalize_key(span.surface, span.kind, self.lexicon), lang))


def load_kb(path, lexicon=None) -> KnowledgeBase:
    """Read the TSV knowledge base (source, kind, lang, target, join policy)."""
    if lexicon is None:
        lexicon = default_lexicon()
    entries: dict = {}
    with open(path, encoding="utf-8", newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh, delimiter="\t", quoting=csv.QUOTE_NONE), 1):
            if not row or not "".join(row).strip() or row[0].lstrip().startswith("#"):
                continue
            if len(row) != 5 or not all(f.strip() for f in row):
                raise MalformedRow(f"expected 5 non-empty columns, got {len(row)}", lineno)
            src, kind, lang, tgt, policy = (f.strip() for f in row)
            try:
                kind, policy = MweKind(kind), JoinPolicy(policy)
            except ValueError as e:
                raise MalformedRow(str(e), lineno) from None
            key = (normalize_key(src, kind, lexicon), lang)
            if key in entries:
                raise DuplicateKey(f"duplicate entry {key}", lineno)
            entries[key] = Translation(tgt, policy, kind)
    return KnowledgeBase(entries, lexicon)


def lookup(kb: Optional[KnowledgeBase], span: MweSpan, lang: str) -> Optional[Translation]:
    if kb is None:
        return None
    return kb.lookup(span, lang)


# -- transliteration -------------------------------------------------------

@dataclass(frozen=True)
class ChartRow:
    source: str
    target: str
    matra: Optional[str] = None  # vowel sign; "" for the inherent vowel
    word_final: bool = False

    @property
    def is_vowel(self):
        return self.matra is not None


@dataclass(frozen=True)
class TransliterationChart:
    rows: tuple[ChartRow, ...]
    virama: str = "्"

    def __post_init__(self):
        # longest source first; word-final variants before plain ones of equal length
        ordered = sorted(self.rows, key=lambda r: (-len(r.source), not r.word_final))
        object.__setattr__(self, "rows", tuple(ordered))

    def match(self, word: str, i: int) -> Optional[ChartRow]:
        for r in self.rows:
            if word.startswith(r.source, i):
                if r.word_final and i + len(r.source) != len(word):
                    continue
                return r
        return None


def load_translit_chart(path) -> TransliterationChart:
    rows = []
    seen = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) not in (2, 3) or not cols[0] or not cols[1]:
                raise MalformedRow("expected source, target[, vowel sign]", lineno)
            src = cols[0].lower()
            final = src.endswith("$") and len(src) > 1
            src = src.rstrip("$") if final else src
            if (src, final) in seen:
                raise DuplicateKey(f"duplicate source {cols[0]!r}", lineno)
            seen.add((src, final))
            matra = None
            if len(cols) == 3:
                matra = "" if cols[2] == "-" else cols[2]
            rows.append(ChartRow(src, cols[1], matra, final))
    return TransliterationChart(tuple(rows))


def default_translit_chart() -> TransliterationChart:
    return load_translit_chart(resources.files("mwebraille") / "data" / "translit_devanagari.tsv")


def _translit_word(word: str, chart: TransliterationChart) -> str:
    units: list = []
    i = 0
    while i < len(word):
        r = chart.match(word, i)
        if r is None:
            units.append(word[i])
            i += 1
        else:
            units.append(r)
            i += len(r.source)
    out = []
    for k, u in enumerate(units):
        if isinstance(u, str):
            out.append(u)
            continue
        prev = units[k - 1] if k else None
        after_consonant = isinstance(prev, ChartRow) and not prev.is_vowel
        if u.is_vowel:
            out.append(u.matra if after_consonant else u.target)
        else:
            if after_consonant:
                out.append(chart.virama)
            out.append(u.target)
    return "".join(out)


def transliterate(text: str, chart: TransliterationChart) -> str:
    """Greedy longest-match transliteration, word by word.

    A consonant followed by a vowel takes the vowel sign, two adjacent
    consonants are joined with a virama, and characters missing from the chart
    pass through unchanged.
    """
    parts = text.split(" ")
    return " ".join(_translit_word(p.lower() if p.isascii() else p, chart) for p in parts)


# -- augmentation ----------------------------------------------------------

def _map(result: TransferResult, a: Address) -> Optional[Address]:
    return result.address_map.get(tuple(a))


def _aux_slots(tree: ParseTree, verb_addr: Address) -> list[Address]:
    """Empty verb-tag nodes right after the verb in the target tree."""
    parent_addr, idx = verb_addr[:-1], verb_addr[-1]
    parent = node_at(tree, parent_addr)
    slots = []
    for j in range(idx + 1, len(parent.children)):
        c = parent.children[j]
        if c.is_bare and c.label.startswith(AUX_SLOT_PREFIXES):
            slots.append(parent_addr + (j,))
        else:
            break
    return slots


def _set_text(tree: ParseTree, addr: Address, text: str) -> ParseTree:
    old = node_at(tree, addr)
    return replace_at(tree, addr, ParseTree(old.label, (), text))


def _remove(tree: ParseTree, addr: Address) -> ParseTree:
    parent = node_at(tree, addr[:-1])
    kids = parent.children[: addr[-1]] + parent.children[addr[-1] + 1:]
    return replace_at(tree, addr[:-1], ParseTree(parent.label, kids))


def _join(words):
    return "_".join(words)


def augment(result: TransferResult, spans, kb: Optional[KnowledgeBase],
            chart: Optional[TransliterationChart], lang: str) -> ParseTree:
    """Write MWE translations into the transferred tree."""
    edits: dict[Address, str] = {}
    removals: list[Address] = []
    for span in spans:
        entry = lookup(kb, span, lang)
        mapped = [_map(result, a) for a in span.leaf_addresses]
        if entry is None:
            if span.kind != MweKind.COMPOSITE_NE or chart is None:
                continue
            for a, m in zip(span.leaf_addresses, mapped):
                if m is None:
                    raise UnmappedAddress(a)
                edits[m] = transliterate(node_at(result.tree, m).text, chart)
            continue

        words = entry.target_text.split()
        if entry.join_policy == JoinPolicy.PER_WORD:
            for a, m in zip(span.leaf_addresses, mapped):
                if m is None:
                    raise UnmappedAddress(a)
            n = len(mapped)
            if len(words) >= n:
                chunks = [[w] for w in words[: n - 1]] + [words[n - 1:]]
            else:
                chunks = [[w] for w in words]
            for k, m in enumerate(mapped):
                if k < len(chunks):
                    edits[m] = _join(chunks[k])
                else:
                    removals.append(m)
            continue

        anchor = mapped[0]
        if anchor is None:
            raise UnmappedAddress(span.leaf_addresses[0])
        if span.kind == MweKind.LIGHT_VERB:
            slots = _aux_slots(result.tree, anchor)[: max(len(words) - 1, 0)]
            if slots:
                for slot, w in zip(slots, words[-len(slots):]):
                    edits[slot] = w
                words = words[: -len(slots)]
        edits[anchor] = _join(words)
        removals.extend(m for m in mapped[1:] if m is not None)

    tree = result.tree
    for addr, text in edits.items():
        try:
            tree = _set_text(tree, addr, text)
        except InvalidAddress:
            raise UnmappedAddress(addr) from None
    for addr in sorted(removals, reverse=True):
        tree = _remove(tree, addr)
    return tree
