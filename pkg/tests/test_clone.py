import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import naive_preserves
from qcsplab.catalog import majority, meet, minority
from qcsplab.clone import (
    build_nu_operation, check_nu_identities, compose, enumerate_polymorphisms, find_nu_violation,
    find_violation, is_polymorphism, polymorphism_count_bound, preserves, projection)
from qcsplab.gadgets import CutPair, all_cuts, build_rho, build_tau
from qcsplab.model import BudgetExceeded, Domain, Operation, QcspLabError, Relation, Structure

D2, D3 = Domain.range(2), Domain.range(3)
LEQ = Relation("leq", 2, {(0, 0), (0, 1), (1, 1)})


def test_known_polymorphisms_of_order():
    s = Structure(D2, (LEQ,))
    assert is_polymorphism(meet(2), s)
    assert not is_polymorphism(Operation.from_function("neg", 2, 1, lambda x: 1 - x), s)
    w = find_violation(Operation.from_function("neg", 2, 1, lambda x: 1 - x), LEQ)
    assert w is not None and w.image not in LEQ.extension


def test_enumeration_matches_filtering_all_tables():
    s = Structure(D2, (LEQ,))
    found = [f.table for f in enumerate_polymorphisms(s, 2)]
    brute = [t for t in itertools.product(range(2), repeat=4)
             if naive_preserves(Operation("t", 2, 2, t), LEQ.extension)]
    assert found == sorted(brute)
    # the monotone binary Boolean functions
    assert len(found) == 6


def test_idempotent_enumeration_with_constants():
    s = Structure(D2, (LEQ,), constants=True)
    tables = [f.table for f in enumerate_polymorphisms(s, 2, idempotent_only=True)]
    assert tables == [(0, 0, 0, 1), (0, 0, 1, 1), (0, 1, 0, 1), (0, 1, 1, 1)]


def test_enumeration_budget():
    assert polymorphism_count_bound(3, 2, False) == 3 ** 9
    with pytest.raises(BudgetExceeded) as info:
        enumerate_polymorphisms(Structure(D3, (LEQ,)), 2, budget=100)
    assert info.value.required == 3 ** 9


def test_composition_of_projections():
    p0, p1 = projection(2, 2, 0), projection(2, 2, 1)
    assert compose(meet(2), [p1, p0]).table == meet(2).table
    m = compose(majority(2), [p0, p1, p1])
    assert m.table == p1.table


def test_majority_and_minority_are_nu_or_not():
    assert check_nu_identities(majority(3))
    assert not check_nu_identities(minority(3))
    assert not check_nu_identities(meet(2))


@pytest.mark.parametrize("arity", [3, 4, 5])
def test_built_nu_passes_identities(arity):
    for cut in all_cuts(D3):
        if cut.intersects:
            assert check_nu_identities(build_nu_operation(D3, cut, arity))


def test_nu_builder_rejects_bad_input():
    with pytest.raises(QcspLabError):
        build_nu_operation(D3, CutPair(D3, {0}, {1, 2}), 5)
    with pytest.raises(QcspLabError):
        build_nu_operation(D3, CutPair(D3, {0, 1}, {1, 2}), 2)


def _broken_nu(cut, arity, default):
    def f(*xs):
        (v, c), = __import__("collections").Counter(xs).most_common(1)
        return v if c >= arity - 1 else default
    return Operation.from_function("broken", cut.domain.size, arity, f)


@pytest.mark.parametrize("cut", [c for c in all_cuts(D3) if c.intersects], ids=lambda c: c.format())
@pytest.mark.parametrize("default", [0, 1, 2])
def test_pruned_nu_check_matches_brute_force(cut, default):
    f = _broken_nu(cut, 4, default)
    for r in (build_rho(cut), build_tau(cut, 1)):
        brute = naive_preserves(f, r.extension)
        assert (find_nu_violation(f, r) is None) == brute
        assert preserves(f, r) == brute


def test_wrong_default_is_caught():
    cut = CutPair(D3, {0, 1}, {1, 2})
    w = find_nu_violation(_broken_nu(cut, 4, 0), build_tau(cut, 1))
    assert w is not None
    assert w.image not in build_tau(cut, 1).extension


@given(st.sets(st.tuples(st.integers(0, 2), st.integers(0, 2)), min_size=1),
       st.integers(0, 2))
@settings(max_examples=60, deadline=None)
def test_pruned_check_on_random_relations(tuples, default):
    cut = CutPair(D3, {0, 1}, {1, 2})
    f = _broken_nu(cut, 3, default)
    r = Relation("r", 2, frozenset(tuples))
    assert (find_nu_violation(f, r) is None) == naive_preserves(f, r.extension)


def test_nu7_preserves_tau_up_to_two():
    cut = CutPair(D3, {0, 1}, {1, 2})
    f = build_nu_operation(D3, cut, 7)
    assert find_nu_violation(f, build_tau(cut, 1)) is None
    assert find_nu_violation(f, build_tau(cut, 2)) is None
