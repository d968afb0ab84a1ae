"""Bracketed constituency trees.

Two notations are accepted: the square-bracket LISP style
``[S [NP [NNP Kavita]] ...]`` and the usual round-bracket treebank style
``(S (NP (NNP Kavita)) ...)``.  The first bracket of an input fixes its style.

Trees are immutable values.  A node is one of

* internal: a label and one or more children,
* leaf: a label (the POS tag) and a token,
* bare tag: a label alone, as printed in leaf-stripped trees.

Literal brackets inside tokens are never stored raw; use the treebank escapes
(``-LRB-`` and friends, see :func:`escape_text`).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Optional

from .errors import (
    EmptyNode,
    InvalidAddress,
    MalformedNode,
    TrailingInput,
    UnbalancedBrackets,
)

Address = tuple[int, ...]

BRACKETS = {"square": ("[", "]"), "round": ("(", ")")}
_ALL_BRACKETS = frozenset("[]()")

ESCAPES = {"(": "-LRB-", ")": "-RRB-", "[": "-LSB-", "]": "-RSB-"}
_UNESCAPES = {v: k for k, v in ESCAPES.items()}


def _bad_symbol(s: str) -> bool:
    return not s or any(c in _ALL_BRACKETS or c.isspace() for c in s)


@dataclass(frozen=True)
class ParseTree:
    label: str
    children: tuple["ParseTree", ...] = ()
    text: Optional[str] = None

    def __post_init__(self):
        if _bad_symbol(self.label):
            raise ValueError(f"invalid label {self.label!r}")
        if not isinstance(self.children, tuple):
            object.__setattr__(self, "children", tuple(self.children))
        if self.text is not None:
            if self.children:
                raise ValueError("a node cannot carry both text and children")
            if _bad_symbol(self.text):
                raise ValueError(f"invalid leaf text {self.text!r}")

    @property
    def is_leaf(self) -> bool:
        return self.text is not None

    @property
    def is_bare(self) -> bool:
        return self.text is None and not self.children

    def __str__(self):
        return serialize_tree(self)


def leaf(label: str, text: str) -> ParseTree:
    return ParseTree(label, (), text)


def node(label: str, *children: ParseTree) -> ParseTree:
    return ParseTree(label, tuple(children))


def escape_text(text: str) -> str:
    """Replace literal brackets with treebank escapes."""
    return "".join(ESCAPES.get(c, c) for c in text)


def unescape_text(text: str) -> str:
    return re.sub("|".join(map(re.escape, _UNESCAPES)), lambda m: _UNESCAPES[m.group()], text)


# -- parsing ---------------------------------------------------------------

def _tokenize(text: str, open_b: str, close_b: str):
    """Yield (kind, value, position) with kind in {'open', 'close', 'word'}."""
    other = _ALL_BRACKETS - {open_b, close_b}
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
        elif c == open_b:
            yield "open", c, i
            i += 1
        elif c == close_b:
            yield "close", c, i
            i += 1
        elif c in other:
            raise MalformedNode(i, f"mixed bracket style {c!r}")
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in _ALL_BRACKETS:
                j += 1
            yield "word", text[i:j], i
            i = j


def detect_style(text: str) -> str:
    for c in text:
        if c == "[":
            return "square"
        if c == "(":
            return "round"
        if c in "])":
            raise UnbalancedBrackets(text.index(c))
    raise MalformedNode(0, "no bracketed tree found")


def parse_tree(text: str) -> ParseTree:
    """Parse one bracketed tree (either style)."""
    open_b, close_b = BRACKETS[detect_style(text)]
    tokens = list(_tokenize(text, open_b, close_b))
    if not tokens or tokens[0][0] != "open":
        raise MalformedNode(tokens[0][2] if tokens else 0, "tree must start with a bracket")

    # Each frame: [label, children, words, open position]
    stack: list[list] = []
    result = None
    pos = 0
    for k, (kind, value, pos) in enumerate(tokens):
        if result is not None:
            raise TrailingInput(pos)
        if kind == "open":
            if stack and stack[-1][2]:
                raise MalformedNode(pos, "node mixes a token with children")
            if k + 1 >= len(tokens) or tokens[k + 1][0] != "word":
                raise EmptyNode(pos)
            stack.append([None, [], [], pos])
        elif kind == "word":
            if not stack:
                raise TrailingInput(pos)
            frame = stack[-1]
            if frame[0] is None:
                frame[0] = value
            elif frame[1]:
                raise MalformedNode(pos, "node mixes children with a token")
            elif frame[2]:
                raise MalformedNode(pos, "leaf with more than one token")
            else:
                frame[2].append(value)
        else:
            if not stack:
                raise UnbalancedBrackets(pos)
            label, children, words, _ = stack.pop()
            built = ParseTree(label, tuple(children), words[0] if words else None)
            if stack:
                stack[-1][1].append(built)
            else:
                result = built
    if stack:
        raise UnbalancedBrackets(len(text))
    return result


def serialize_tree(tree: ParseTree, style: str = "square", include_leaves: bool = True) -> str:
    open_b, close_b = BRACKETS[style]
    parts: list[str] = []

    def walk(t: ParseTree):
        parts.append(open_b + t.label)
        if t.text is not None and include_leaves:
            parts.append(" " + t.text)
        for c in t.children:
            parts.append(" ")
            walk(c)
        parts.append(close_b)

    walk(tree)
    return "".join(parts)


def normalize_whitespace(text: str) -> str:
    """Canonical spacing of a bracketed string: one space between tokens,
    none just inside brackets.  Used as a test oracle."""
    text = re.sub(r"\s+", " ", text.strip())
    text = re.sub(r"([\[(])\s+", r"\1", text)
    text = re.sub(r"\s+([\])])", r"\1", text)
    text = re.sub(r"([\])])(?=[\[(])", r"\1 ", text)
    return text


# -- navigation ------------------------------------------------------------

def iter_nodes(tree: ParseTree, prefix: Address = ()) -> Iterator[tuple[Address, ParseTree]]:
    """Pre-order (address, node) pairs."""
    yield prefix, tree
    for i, c in enumerate(tree.children):
        yield from iter_nodes(c, prefix + (i,))


def leaves(tree: ParseTree) -> list[tuple[Address, str, str]]:
    return [(a, t.label, t.text) for a, t in iter_nodes(tree) if t.text is not None]


def words(tree: ParseTree) -> list[str]:
    return [w for _, _, w in leaves(tree)]


def node_at(tree: ParseTree, addr) -> ParseTree:
    t = tree
    for i in addr:
        if not 0 <= i < len(t.children):
            raise InvalidAddress(addr)
        t = t.children[i]
    return t


def replace_at(tree: ParseTree, addr, sub: ParseTree) -> ParseTree:
    addr = tuple(addr)
    if not addr:
        return sub
    i = addr[0]
    if not 0 <= i < len(tree.children):
        raise InvalidAddress(addr)
    kids = list(tree.children)
    try:
        kids[i] = replace_at(kids[i], addr[1:], sub)
    except InvalidAddress:
        raise InvalidAddress(addr) from None
    return ParseTree(tree.label, tuple(kids))


def strip_leaves(tree: ParseTree) -> ParseTree:
    if tree.text is not None:
        return ParseTree(tree.label)
    return ParseTree(tree.label, tuple(strip_leaves(c) for c in tree.children))


# -- files -----------------------------------------------------------------

def iter_tree_lines(lines) -> Iterator[tuple[int, str]]:
    """(sentence index, line) for every tree line; blank and ``#`` lines skipped."""
    idx = 0
    for raw in lines:
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield idx, line
        idx += 1


def read_trees(path) -> list[ParseTree]:
    with open(path, encoding="utf-8") as fh:
        return [parse_tree(line) for _, line in iter_tree_lines(fh)]


def write_trees(path, trees, style="square", include_leaves=True):
    with open(path, "w", encoding="utf-8") as fh:
        for t in trees:
            fh.write(serialize_tree(t, style, include_leaves) + "\n")
