import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcsplab.dnf import (
    DnfFormula, VarEqConst, VarEqVar, dnf_to_extension, eval_dnf, extension_to_dnf,
    format_dnf, parse_dnf)
from qcsplab.model import Domain, ParseError, Relation

D3 = Domain.range(3)


@st.composite
def formulas(draw, arity=3, n=3):
    atom = st.one_of(
        st.builds(VarEqVar, st.integers(0, arity - 1), st.integers(0, arity - 1)),
        st.builds(VarEqConst, st.integers(0, arity - 1), st.integers(0, n - 1)))
    conjs = draw(st.lists(st.lists(atom, min_size=1, max_size=3).map(tuple), min_size=1, max_size=4))
    return DnfFormula(arity, tuple(conjs))


def test_parse_simple():
    f = parse_dnf("x0=x1 & x2=2 | x0=0", 3, D3)
    assert f.size == 3
    assert len(f.disjuncts) == 2
    assert eval_dnf(f, (1, 1, 2))
    assert eval_dnf(f, (0, 2, 1))
    assert not eval_dnf(f, (1, 2, 2))


@pytest.mark.parametrize("text", ["x0!=x1", "x0 ≠ 1", "~x0=1", "x0=x1 &", "x5=1", "x0=9", "!x0=1"])
def test_parse_rejects(text):
    with pytest.raises(ParseError):
        parse_dnf(text, 2, D3)


@given(formulas())
def test_format_parse_round_trip(f):
    assert parse_dnf(format_dnf(f, D3), 3, D3) == f


@given(formulas())
@settings(max_examples=60)
def test_extension_matches_pointwise_evaluation(f):
    ext = dnf_to_extension(f, 3, D3)
    brute = {t for t in itertools.product(range(3), repeat=3) if eval_dnf(f, t)}
    assert ext == brute


@given(st.sets(st.tuples(*[st.integers(0, 2)] * 2), min_size=1))
def test_extension_to_dnf_round_trip(tuples):
    r = Relation("r", 2, frozenset(tuples))
    assert dnf_to_extension(extension_to_dnf(r), 2, D3) == r.extension


def test_shifted_moves_variables():
    f = parse_dnf("x0=x1", 2, D3).shifted(2, 4)
    assert eval_dnf(f, (0, 1, 2, 2))
    assert not eval_dnf(f, (0, 0, 1, 2))
