"""Tree-to-tree transfer grammar (SVO source trees to SOV target order).

Rules are stored as JSON objects::

    {"id": "vp-v-np", "priority": 10,
     "source": "[VP ?v:VB* ?obj:NP]",
     "target": "[VP ?obj ?v]"}

Pattern syntax (``source``):

``[LABEL item ...]``
    node whose label is ``LABEL``; its children must match the items exactly,
    unless the last item is a rest capture ``?name...``, which collects any
    trailing children.
``LABEL*``
    label class, matches every label starting with ``LABEL``.
``?name`` / ``?name:LABEL`` / ``[?name:LABEL item ...]``
    capture the matched node.  A bare ``?name`` matches any node.
``LABEL`` (no brackets) or ``[LABEL]``
    matches a node with that label whatever lies below it.

Template syntax (``target``): ``[LABEL item ...]`` builds a new node (``[LABEL]``
is a bare tag node), ``?name`` moves the captured node, ``?name:LABEL`` moves it
under a new label and ``?name...`` splices a rest capture.  Each capture is used
at most once; unused captures are deleted.

Rules fire in pre-order, at most once per node, highest priority first (file
order breaks ties).  Nodes built by a template are never rewritten again,
which is what makes a traversal terminate.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Optional, Union

from .errors import DataError, LineError
from .treebank import Address, ParseTree, node_at, replace_at

MAX_DEPTH = 2000


class SchemaError(LineError):
    pass


class DuplicateRuleId(DataError):
    def __init__(self, rule_id):
        super().__init__(f"duplicate rule id {rule_id!r}")
        self.rule_id = rule_id


class UnboundTargetVariable(DataError):
    def __init__(self, rule_id, name):
        super().__init__(f"rule {rule_id!r}: target uses ?{name}, which the source never captures")
        self.rule_id = rule_id
        self.name = name


class RewriteDepthExceeded(DataError):
    pass


# -- patterns --------------------------------------------------------------

@dataclass(frozen=True)
class ExactLabel:
    label: str

    def matches(self, label):
        return label == self.label


@dataclass(frozen=True)
class LabelClass:
    prefix: str

    def matches(self, label):
        return label.startswith(self.prefix)


@dataclass(frozen=True)
class Wildcard:
    def matches(self, label):
        return True


Matcher = Union[ExactLabel, LabelClass, Wildcard]


@dataclass(frozen=True)
class PatternTree:
    matcher: Matcher
    capture: Optional[str] = None
    children: tuple["PatternTree", ...] = ()
    anchored: bool = True
    rest: Optional[str] = None

    def captures(self) -> list[str]:
        out = [self.capture] if self.capture else []
        for c in self.children:
            out.extend(c.captures())
        if self.rest:
            out.append(self.rest)
        return out

    def loses_material(self) -> bool:
        """True if some matched subtree is neither captured nor descended into."""
        if self.capture:
            return False
        if not self.children:
            return True
        return any(c.loses_material() for c in self.children)


@dataclass(frozen=True)
class TNode:
    label: str
    children: tuple = ()


@dataclass(frozen=True)
class TVar:
    name: str
    relabel: Optional[str] = None


@dataclass(frozen=True)
class TRest:
    name: str


TargetTemplate = Union[TNode, TVar, TRest]


def _template_refs(t, prefix=()) -> list[tuple[str, Address, object]]:
    if isinstance(t, TNode):
        out = []
        for i, c in enumerate(t.children):
            out.extend(_template_refs(c, prefix + (i,)))
        return out
    return [(t.name, prefix, t)]


_TOKEN = re.compile(r"\[|\]|[^\[\]\s]+")
_VAR = re.compile(r"^\?([A-Za-z_][\w-]*)(\.\.\.)?(?::(.+))?$")


def _tokens(text):
    return [(m.group(), m.start()) for m in _TOKEN.finditer(text)]


def _matcher(token: str) -> Matcher:
    if token == "_":
        return Wildcard()
    if token.endswith("*") and len(token) > 1:
        return LabelClass(token[:-1])
    return ExactLabel(token)


def _atom(tok: str, is_pattern: bool):
    m = _VAR.match(tok)
    if m:
        name, rest, label = m.groups()
        if rest:
            if label:
                raise ValueError(f"rest capture {tok!r} cannot carry a label")
            return ("rest", name)
        if is_pattern:
            return PatternTree(_matcher(label) if label else Wildcard(), name)
        return TVar(name, label)
    if tok.startswith("?"):
        raise ValueError(f"bad variable {tok!r}")
    if is_pattern:
        return PatternTree(_matcher(tok))
    raise ValueError(f"template leaf {tok!r} must be a variable or a bracketed node")


def _parse_dsl(text: str, is_pattern: bool):
    toks = _tokens(text)
    if not toks:
        raise ValueError("empty pattern")
    pos = 0

    def item():
        nonlocal pos
        tok, _ = toks[pos]
        if tok == "]":
            raise ValueError("unexpected ']'")
        if tok != "[":
            pos += 1
            return _atom(tok, is_pattern)
        pos += 1
        if pos >= len(toks) or toks[pos][0] in "[]":
            raise ValueError("node without a head")
        head = _atom(toks[pos][0], is_pattern) if toks[pos][0].startswith("?") else toks[pos][0]
        pos += 1
        kids, rest = [], None
        while True:
            if pos >= len(toks):
                raise ValueError("unbalanced brackets")
            if toks[pos][0] == "]":
                pos += 1
                break
            if rest is not None and is_pattern:
                raise ValueError("rest capture must be the last child")
            k = item()
            if isinstance(k, tuple):
                if is_pattern:
                    rest = k[1]
                else:
                    kids.append(TRest(k[1]))
            else:
                kids.append(k)
        if is_pattern:
            if isinstance(head, tuple):
                raise ValueError("rest capture cannot head a node")
            if isinstance(head, PatternTree):
                base = head
            else:
                base = PatternTree(_matcher(head))
            return PatternTree(base.matcher, base.capture, tuple(kids), rest is None, rest)
        if not isinstance(head, str):
            raise ValueError("template nodes need a plain label")
        return TNode(head, tuple(kids))

    out = item()
    if pos != len(toks):
        raise ValueError("trailing input")
    if isinstance(out, tuple):
        raise ValueError("a rest capture cannot be the whole pattern")
    if not is_pattern and isinstance(out, TRest):
        raise ValueError("a rest splice cannot be the template root")
    return out


def parse_pattern(text: str) -> PatternTree:
    return _parse_dsl(text, True)


def parse_template(text: str) -> TargetTemplate:
    return _parse_dsl(text, False)


def _check_pattern(p: PatternTree):
    if isinstance(p.matcher, Wildcard) and not p.capture:
        raise ValueError("wildcard without a capture variable")
    for c in p.children:
        _check_pattern(c)


@dataclass(frozen=True)
class TransferRule:
    id: str
    source: PatternTree
    target: TargetTemplate
    links: tuple[tuple[str, Address], ...] = ()
    priority: int = 0

    @classmethod
    def from_strings(cls, id, source, target, priority=0, links=None):
        pat = parse_pattern(source)
        _check_pattern(pat)
        tmpl = parse_template(target)
        caps = pat.captures()
        if len(caps) != len(set(caps)):
            raise ValueError("capture names must be unique within a pattern")
        refs = _template_refs(tmpl)
        names = [r[0] for r in refs]
        for n in names:
            if n not in caps:
                raise UnboundTargetVariable(id, n)
        if len(names) != len(set(names)):
            raise ValueError("a capture may be used only once in the target")
        for n, _, ref in refs:
            is_rest = n == _rest_names(pat).get(n)
            if isinstance(ref, TRest) != is_rest:
                raise ValueError(f"?{n} used with the wrong kind of reference")
        derived = tuple((n, a) for n, a, _ in refs)
        if links is not None:
            given = tuple((str(v), tuple(a)) for v, a in links)
            if sorted(given) != sorted(derived):
                raise ValueError("links do not match the template's variable slots")
        return cls(id, pat, tmpl, derived, priority)

    @property
    def is_linear(self) -> bool:
        """Each capture moved exactly once, no relabeling, nothing silently lost."""
        refs = _template_refs(self.target)
        if sorted(r[0] for r in refs) != sorted(self.source.captures()):
            return False
        if any(isinstance(r[2], TVar) and r[2].relabel for r in refs):
            return False
        return not self.source.loses_material()


def _rest_names(p: PatternTree) -> dict:
    out = {p.rest: p.rest} if p.rest else {}
    for c in p.children:
        out.update(_rest_names(c))
    return out


@dataclass(frozen=True)
class RuleSet:
    rules: tuple[TransferRule, ...] = ()

    def __len__(self):
        return len(self.rules)

    def __iter__(self):
        return iter(self.rules)

    def __getitem__(self, key):
        if isinstance(key, str):
            for r in self.rules:
                if r.id == key:
                    return r
            raise KeyError(key)
        return self.rules[key]

    def linear(self) -> "RuleSet":
        return RuleSet(tuple(r for r in self.rules if r.is_linear))

    @classmethod
    def from_rules(cls, rules) -> "RuleSet":
        seen = set()
        for r in rules:
            if r.id in seen:
                raise DuplicateRuleId(r.id)
            seen.add(r.id)
        # sorted() is stable, so file order breaks priority ties
        return cls(tuple(sorted(rules, key=lambda r: -r.priority)))


def _json_array_items(text: str):
    """Yield (line, obj) for each element of a top-level JSON array."""
    dec = json.JSONDecoder()
    ws = re.compile(r"\s*")
    i = ws.match(text, 0).end()
    if i == len(text):
        return
    if text[i] != "[":
        raise SchemaError("rule file must be a JSON array", text.count("\n", 0, i) + 1)
    i = ws.match(text, i + 1).end()
    if text.startswith("]", i):
        return
    while True:
        line = text.count("\n", 0, i) + 1
        try:
            obj, i = dec.raw_decode(text, i)
        except json.JSONDecodeError as e:
            raise SchemaError(f"invalid JSON ({e.msg})", e.lineno) from None
        yield line, obj
        i = ws.match(text, i).end()
        if text.startswith(",", i):
            i = ws.match(text, i + 1).end()
        elif text.startswith("]", i):
            return
        else:
            raise SchemaError("expected ',' or ']'", text.count("\n", 0, i) + 1)


def _parse_links(raw, line):
    if raw is None:
        return None
    out = []
    for item in raw:
        if not (isinstance(item, list) and len(item) == 2 and isinstance(item[1], str)):
            raise SchemaError("links must be [variable, 'dotted.slot'] pairs", line)
        slot = tuple(int(x) for x in item[1].split(".")) if item[1] else ()
        out.append((item[0].lstrip("?"), slot))
    return out


def rules_from_json(text: str) -> RuleSet:
    rules = []
    for line, obj in _json_array_items(text):
        if not isinstance(obj, dict):
            raise SchemaError("each rule must be an object", line)
        missing = {"id", "source", "target"} - obj.keys()
        if missing:
            raise SchemaError(f"missing field(s) {sorted(missing)}", line)
        extra = obj.keys() - {"id", "priority", "source", "target", "links", "note"}
        if extra:
            raise SchemaError(f"unknown field(s) {sorted(extra)}", line)
        prio = obj.get("priority", 0)
        if not isinstance(prio, int) or isinstance(prio, bool):
            raise SchemaError("priority must be an integer", line)
        try:
            rule = TransferRule.from_strings(
                str(obj["id"]), obj["source"], obj["target"], prio,
                _parse_links(obj.get("links"), line))
        except UnboundTargetVariable:
            raise
        except (ValueError, TypeError, AttributeError) as e:
            raise SchemaError(f"rule {obj['id']!r}: {e}", line) from None
        rules.append(rule)
    return RuleSet.from_rules(rules)


def load_rules(path) -> RuleSet:
    with open(path, encoding="utf-8") as fh:
        return rules_from_json(fh.read())


# -- matching --------------------------------------------------------------

def _match(p: PatternTree, t, rel: Address, out: dict) -> bool:
    if not p.matcher.matches(t.label):
        return False
    if p.capture:
        out[p.capture] = rel
    if not p.children and p.anchored:
        return True
    kids = t.children
    n = len(p.children)
    if len(kids) < n or (p.anchored and len(kids) != n):
        return False
    for i, (pc, tc) in enumerate(zip(p.children, kids)):
        if not _match(pc, tc, rel + (i,), out):
            return False
    if p.rest:
        out[p.rest] = tuple(rel + (i,) for i in range(n, len(kids)))
    return True


def match_rule(rule: TransferRule, tree: ParseTree, at=()) -> Optional[dict]:
    """Bindings (capture name -> absolute address, or tuple of addresses for a
    rest capture) when ``rule`` matches the node at ``at``; otherwise None."""
    at = tuple(at)
    out: dict = {}
    if _match(rule.source, node_at(tree, at), at, out):
        return out
    return None


# -- rewriting -------------------------------------------------------------

class _W:
    """Mutable working node that remembers where it came from."""

    __slots__ = ("label", "text", "children", "src", "fresh")

    def __init__(self, label, text, children, src, fresh=False):
        self.label = label
        self.text = text
        self.children = children
        self.src = src
        self.fresh = fresh


def _to_work(t: ParseTree, addr: Address = ()) -> _W:
    return _W(t.label, t.text, [_to_work(c, addr + (i,)) for i, c in enumerate(t.children)], addr)


def _from_work(w: _W, addr: Address, amap: dict) -> ParseTree:
    if w.src is not None:
        amap[w.src] = addr
    return ParseTree(w.label, tuple(_from_work(c, addr + (i,), amap) for i, c in enumerate(w.children)), w.text)


def _work_at(w: _W, rel: Address) -> _W:
    for i in rel:
        w = w.children[i]
    return w


def _instantiate(t, bound: dict) -> list[_W]:
    if isinstance(t, TNode):
        kids = []
        for c in t.children:
            kids.extend(_instantiate(c, bound))
        return [_W(t.label, None, kids, None, fresh=True)]
    if isinstance(t, TRest):
        return list(bound[t.name])
    w = bound[t.name]
    if t.relabel:
        w = _W(t.relabel, w.text, w.children, w.src, w.fresh)
    return [w]


def _rewrite(rule: TransferRule, w: _W, bindings: dict, at: Address) -> _W:
    def resolve(a):
        return _work_at(w, a[len(at):])

    bound = {}
    for name, a in bindings.items():
        if a and isinstance(a[0], tuple):
            bound[name] = [resolve(x) for x in a]
        elif name in _rest_names(rule.source):
            bound[name] = []
        else:
            bound[name] = resolve(a)
    (out,) = _instantiate(rule.target, bound)
    if out.src is None:
        # the rebuilt node takes over the position of the one it replaces
        out.src = w.src
    return out


def apply_rule(rule: TransferRule, tree: ParseTree, at, bindings: dict):
    """Rebuild the subtree at ``at`` from the rule's template.

    Returns ``(new_tree, fragment)`` where ``fragment`` maps the source address
    of every moved node (bound nodes and everything below them) to its new
    address.
    """
    at = tuple(at)
    sub = _to_work(node_at(tree, at), at)
    new_sub = _rewrite(rule, sub, bindings, at)
    amap: dict = {}
    built = _from_work(new_sub, at, amap)
    return replace_at(tree, at, built), amap


@dataclass
class TransferResult:
    tree: ParseTree
    address_map: dict = field(default_factory=dict)
    applied_rules: list = field(default_factory=list)


def transfer(tree: ParseTree, rules: RuleSet) -> TransferResult:
    root = _to_work(tree)
    applied: list[tuple[str, Address]] = []
    budget = sum(1 for _ in _iter_work(root))

    def visit(w: _W, addr: Address) -> _W:
        if len(addr) > MAX_DEPTH or len(applied) > budget:
            raise RewriteDepthExceeded(f"rewriting did not settle at {list(addr)}")
        if not w.fresh:
            for rule in rules:
                b: dict = {}
                if _match(rule.source, w, (), b):
                    w = _rewrite(rule, w, b, ())
                    w.fresh = True
                    applied.append((rule.id, addr))
                    break
        for i, c in enumerate(w.children):
            w.children[i] = visit(c, addr + (i,))
        return w

    root = visit(root, ())
    amap: dict = {}
    out = _from_work(root, (), amap)
    return TransferResult(out, amap, applied)


def _iter_work(w: _W):
    yield w
    for c in w.children:
        yield from _iter_work(c)
