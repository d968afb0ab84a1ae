import random
from collections import Counter
from importlib import resources

import pytest
from hypothesis import given, settings, strategies as st

from mwebraille import transfer as tr
from mwebraille import treebank as tb

import treegen

DOG = "[S [NP [NN dog]] [VP [VBZ bites] [NP [NN man]]]]"
BUNDLED = resources.files("mwebraille") / "data" / "rules_en_hi.json"


@pytest.fixture(scope="module")
def bundled():
    return tr.load_rules(BUNDLED)


def rule(source, target, id="r", priority=0, links=None):
    return tr.TransferRule.from_strings(id, source, target, priority, links)


def leaf_multiset(t):
    return Counter((lab, txt) for _, lab, txt in tb.leaves(t))


# -- loading ---------------------------------------------------------------

@pytest.mark.parametrize("text", ["", "  \n", "[]", "[\n]\n"])
def test_empty_rule_file(text):
    assert len(tr.rules_from_json(text)) == 0


def test_bundled_rules(bundled):
    assert len(bundled) == 10
    assert bundled[0].id == "aux-vp-pp-sov"
    assert [r.priority for r in bundled] == sorted((r.priority for r in bundled), reverse=True)
    assert len(bundled.linear()) == 9
    assert not bundled["aux-vp-pp-sov"].is_linear


def test_file_order_breaks_priority_ties():
    rs = tr.rules_from_json("""[
      {"id": "a", "priority": 1, "source": "[X ?a]", "target": "[X ?a]"},
      {"id": "b", "priority": 5, "source": "[X ?a]", "target": "[X ?a]"},
      {"id": "c", "priority": 1, "source": "[X ?a]", "target": "[X ?a]"},
      {"id": "d", "source": "[X ?a]", "target": "[X ?a]"}
    ]""")
    assert [r.id for r in rs] == ["b", "a", "c", "d"]


def test_unbound_target_variable():
    with pytest.raises(tr.UnboundTargetVariable) as info:
        tr.rules_from_json('[{"id": "bad", "source": "[S ?a]", "target": "[S ?a ?x]"}]')
    assert info.value.rule_id == "bad"


def test_duplicate_rule_id():
    with pytest.raises(tr.DuplicateRuleId):
        tr.rules_from_json('[{"id": "a", "source": "[S ?a]", "target": "[S ?a]"},'
                           ' {"id": "a", "source": "[S ?b]", "target": "[S ?b]"}]')


@pytest.mark.parametrize("text, line", [
    ('[\n{"id": "a", "source": "[S ?a]", "target": "[S ?a]"},\n{"id": "b", "source": "[S ?a]"}\n]', 3),
    ('[\n{"id": "a", "source": "[S ?a]", "target": "[S ?a]", "colour": 1}\n]', 2),
    ('[\n\n{"id": "a", "priority": "high", "source": "[S ?a]", "target": "[S ?a]"}]', 3),
    ('{"id": "a"}', 1),
    ('[\n{"id": "a", "source": "[S ?a", "target": "[S ?a]"}]', 2),
    ('[\n{"id": "a", "source": "[S ?a ?a]", "target": "[S ?a]"}]', 2),
    ('[\n{"id": "a", "source": "[S ?a ?b]", "target": "[S ?a ?a]"}]', 2),
    ('[\n{"id": "a", "source": "[S _ ?b]", "target": "[S ?b]"}]', 2),
    ('[\n{"id": "a", "source": "[S ?a ?b]", "target": "[S ?b ?a]", "links": [["a", "0"], ["b", "1"]]}]', 2),
    ('[\n{"id": "a"\n "source": "[S ?a]"}]', 3),
])
def test_schema_errors_carry_line(text, line):
    with pytest.raises(tr.SchemaError) as info:
        tr.rules_from_json(text)
    assert info.value.line == line


def test_explicit_links_accepted():
    r = rule("[S ?a ?b]", "[S ?b [X ?a]]", links=[("b", (0,)), ("a", (1, 0))])
    assert sorted(r.links) == [("a", (1, 0)), ("b", (0,))]


# -- matching --------------------------------------------------------------

def test_match_example():
    r = rule("[S ?np [VP ?v ?obj]]", "[S ?np [VP ?obj ?v]]")
    t = tb.parse_tree(DOG)
    assert tr.match_rule(r, t, ()) == {"np": (0,), "v": (1, 0), "obj": (1, 1)}
    assert tr.match_rule(r, tb.parse_tree("[NP [NN dog]]"), ()) is None


def test_match_at_inner_address():
    r = rule("[NP ?n:NN]", "[NP ?n]")
    t = tb.parse_tree(DOG)
    assert tr.match_rule(r, t, (1, 1)) == {"n": (1, 1, 0)}
    assert tr.match_rule(r, t, (1,)) is None


def test_label_class():
    cls = tr.LabelClass("NNP")
    assert cls.matches("NNP") and cls.matches("NNPS") and not cls.matches("NN")


def test_anchored_versus_rest():
    t = tb.parse_tree("[VP [VB a] [NP [NN b]] [PP [IN c]]]")
    assert tr.match_rule(rule("[VP ?v ?o]", "[VP ?o ?v]"), t) is None
    r = rule("[VP ?v ?o ?more...]", "[VP ?more... ?o ?v]")
    b = tr.match_rule(r, t)
    assert b == {"v": (0,), "o": (1,), "more": ((2,),)}
    out, _ = tr.apply_rule(r, t, (), b)
    assert tb.serialize_tree(out) == "[VP [PP [IN c]] [NP [NN b]] [VB a]]"


def test_label_only_pattern_node_ignores_children():
    r = rule("[S NP ?vp]", "[S ?vp]")
    assert tr.match_rule(r, tb.parse_tree(DOG)) == {"vp": (1,)}
    assert not r.is_linear


# -- applying --------------------------------------------------------------

def test_svo_to_sov():
    r = rule("[S ?np [VP ?v ?obj]]", "[S ?np [VP ?obj ?v]]")
    t = tb.parse_tree(DOG)
    out, amap = tr.apply_rule(r, t, (), tr.match_rule(r, t))
    assert tb.serialize_tree(out) == "[S [NP [NN dog]] [VP [NP [NN man]] [VBZ bites]]]"
    assert amap[(1, 0)] == (1, 1) and amap[(1, 1)] == (1, 0) and amap[(1, 1, 0)] == (1, 0, 0)


def test_identity_rule():
    r = rule("[S ?np [VP ?v ?obj]]", "[S ?np [VP ?v ?obj]]")
    t = tb.parse_tree(DOG)
    out, amap = tr.apply_rule(r, t, (), tr.match_rule(r, t))
    assert out == t
    assert all(k == v for k, v in amap.items())
    assert set(amap) == {a for a, _ in tb.iter_nodes(t)} - {(1,)}


def test_transfer_without_rules_is_identity():
    t = tb.parse_tree(DOG)
    res = tr.transfer(t, tr.RuleSet())
    assert res.tree == t and res.applied_rules == []
    assert res.address_map == {a: a for a, _ in tb.iter_nodes(t)}


def test_relabel_and_new_bare_node():
    r = rule("[VP ?v:VBZ ?o]", "[VP ?o ?v:IN [VBZ]]")
    res = tr.transfer(tb.parse_tree("[VP [VBZ has] [NP [NN x]]]"), tr.RuleSet((r,)))
    assert tb.serialize_tree(res.tree) == "[VP [NP [NN x]] [IN has] [VBZ]]"
    assert res.address_map[(0,)] == (1,)


def test_worked_example_transfer(bundled, data_dir):
    example = (data_dir / "worked_example" / "parse.txt").read_text(encoding="utf-8").strip()
    transferred = (data_dir / "worked_example" / "transferred.txt").read_text(encoding="utf-8").strip()
    res = tr.transfer(tb.parse_tree(example), bundled)
    assert tb.serialize_tree(res.tree, include_leaves=False) == transferred
    assert res.applied_rules[0] == ("aux-vp-pp-sov", ())
    # "has" survives as the IN closing the subject NP
    assert res.address_map[(1, 0)] == (0, 2)
    assert tb.node_at(res.tree, (0, 2)).text == "has"


def test_rules_fire_in_preorder_and_only_once():
    rs = tr.RuleSet.from_rules([rule("[X ?a ?b]", "[X ?b ?a]", "swap")])
    res = tr.transfer(tb.parse_tree("[X [X [A a] [B b]] [C c]]"), rs)
    assert tb.serialize_tree(res.tree) == "[X [C c] [X [B b] [A a]]]"
    assert res.applied_rules == [("swap", ()), ("swap", (1,))]


def test_new_nodes_are_not_rewritten():
    # the template builds another X that would match again
    rs = tr.RuleSet.from_rules([rule("[X ?a]", "[X [X ?a]]", "grow")])
    res = tr.transfer(tb.parse_tree("[X [A a]]"), rs)
    assert tb.serialize_tree(res.tree) == "[X [X [A a]]]"
    assert len(res.applied_rules) == 1


def test_depth_guard(monkeypatch):
    monkeypatch.setattr(tr, "MAX_DEPTH", 3)
    deep = tb.parse_tree("[A [A [A [A [A [B b]]]]]]")
    with pytest.raises(tr.RewriteDepthExceeded):
        tr.transfer(deep, tr.RuleSet())


# -- properties ------------------------------------------------------------

@st.composite
def linear_rulesets(draw):
    rules = []
    for k in range(draw(st.integers(1, 4))):
        lab = draw(st.sampled_from(treegen.PHRASES))
        n = draw(st.integers(1, 4))
        perm = draw(st.permutations(range(n)))
        src = f"[{lab} " + " ".join(f"?v{i}" for i in range(n)) + "]"
        tgt = f"[{lab} " + " ".join(f"?v{i}" for i in perm) + "]"
        if draw(st.booleans()):
            tgt = f"[{lab} [WRAP {tgt[len(lab) + 2:]}]"
        rules.append(rule(src, tgt, f"r{k}", draw(st.integers(0, 3))))
    return tr.RuleSet.from_rules(rules)


@given(treegen.trees, linear_rulesets())
def test_linear_rules_preserve_leaves(t, rs):
    assert all(r.is_linear for r in rs)
    res = tr.transfer(t, rs)
    assert leaf_multiset(res.tree) == leaf_multiset(t)


@given(treegen.trees, linear_rulesets())
def test_address_map_tracks_leaves(t, rs):
    res = tr.transfer(t, rs)
    amap = res.address_map
    assert len(set(amap.values())) == len(amap)
    for a, _, text in tb.leaves(t):
        assert tb.node_at(res.tree, amap[a]).text == text


@settings(max_examples=50)
@given(st.integers(0, 2**32 - 1))
def test_transfer_deterministic(seed):
    rs = tr.load_rules(BUNDLED)
    t = treegen.english_tree(random.Random(seed))
    a, b = tr.transfer(t, rs), tr.transfer(t, rs)
    assert a == b


@settings(max_examples=200)
@given(st.integers(0, 2**32 - 1))
def test_bundled_rules_on_english_trees(seed):
    rs = tr.load_rules(BUNDLED)
    t = treegen.english_tree(random.Random(seed))
    res = tr.transfer(t, rs)
    for a, _, text in tb.leaves(t):
        if a in res.address_map:
            assert tb.node_at(res.tree, res.address_map[a]).text == text
    lin = tr.transfer(t, rs.linear())
    assert leaf_multiset(lin.tree) == leaf_multiset(t)
