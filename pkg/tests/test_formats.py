import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcsplab.catalog import majority_algebra
from qcsplab.formats import (
    algebra_from_json, algebra_to_json, dump_structure, format_sentence, load_structure,
    parse_sentence, structure_from_json, structure_to_json)
from qcsplab.gadgets import CutPair, FamilySpec
from qcsplab.model import (
    EXISTS, FORALL, Atom, Domain, ParseError, PHSentence, QcspLabError, Relation, Structure)

D3 = Domain.range(3)


@given(st.lists(st.sets(st.tuples(st.integers(0, 2), st.integers(0, 2))), min_size=1, max_size=3))
@settings(max_examples=40)
def test_structure_round_trip(exts):
    rels = tuple(Relation(f"r{i}", 2, frozenset(e)) for i, e in enumerate(exts))
    s = Structure(D3, rels)
    back = structure_from_json(json.loads(json.dumps(structure_to_json(s))))
    assert [r.extension for r in back.relations] == [r.extension for r in rels]


def test_families_and_constants_survive(tmp_path):
    cut = CutPair(D3, {0, 1}, {1, 2})
    s = Structure(D3, (), (FamilySpec("tau", "tau", cut),), constants=True)
    path = tmp_path / "s.json"
    dump_structure(s, path)
    back = load_structure(path)
    assert back.constants
    assert back.families == s.families
    assert back.relation("tau_1").extension == s.relation("tau_1").extension


def test_relation_without_dnf_is_rejected():
    doc = {"domain": ["0", "1"], "relations": [{"name": "r", "arity": 1, "extension": [["0"]]}]}
    with pytest.raises(ParseError):
        structure_from_json(doc)


def test_empty_dnf_is_empty_relation():
    s = structure_from_json({"domain": ["0", "1"], "relations": [{"name": "r", "arity": 1, "dnf": []}]})
    assert s.relation("r").extension == frozenset()


@st.composite
def sentences(draw):
    k = draw(st.integers(1, 4))
    xs = [f"x{i}" for i in range(k)]
    prefix = tuple((draw(st.sampled_from((FORALL, EXISTS))), x) for x in xs)
    arg = st.one_of(st.sampled_from(xs), st.integers(0, 2))
    body = draw(st.lists(st.builds(lambda a, b, c: Atom("r", (a, b, c)), arg, arg, arg), max_size=3))
    eqs = draw(st.lists(st.builds(lambda a, b: Atom("eq", (a, b)), arg, arg), max_size=2))
    return PHSentence(prefix, tuple(body + eqs))


@given(sentences())
def test_sentence_text_round_trip(phi):
    assert parse_sentence(format_sentence(phi, D3), D3) == phi


def test_sentence_syntax():
    phi = parse_sentence("A x E y : tau_1(x,x,y) & eq(y,1)", D3)
    assert phi.prefix == ((FORALL, "x"), (EXISTS, "y"))
    assert phi.body[1].args == ("y", 1)


@pytest.mark.parametrize("text", ["A x : r(x,y)", "A x E x : r(x)", "A 1 : r(1)", "A x r(x)"])
def test_sentence_errors(text):
    with pytest.raises((ParseError, QcspLabError)):
        parse_sentence(text, D3)


def test_algebra_round_trip():
    alg = majority_algebra(3)
    back = algebra_from_json(json.loads(json.dumps(algebra_to_json(alg))))
    assert back.operations[0].table == alg.operations[0].table
