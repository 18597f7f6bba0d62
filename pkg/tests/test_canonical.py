import pytest

from oracles import naive_truth
from qcsplab.canonical import (
    AdversarySet, build_canonical_sentence, consistent_maps, evaluate_canonical,
    reduct_compactness_probe, universal_names)
from qcsplab.gadgets import CutPair, FamilySpec
from qcsplab.model import BudgetExceeded, Domain, QcspLabError, Relation, Structure

D2 = Domain.range(2)
NEQ = Structure(D2, (Relation("r", 2, {(0, 1), (1, 0)}),))


def test_worked_example_shape():
    c = build_canonical_sentence(NEQ, AdversarySet.full(2, 1))
    assert c.factors == 4
    assert c.product_size == 16
    assert len(c.sentence.universals) == 2
    assert len(c.sentence.existentials) == 14
    assert c.sentence.universals == ("w1_1", "w2_1")


@pytest.mark.parametrize("n, m", [(2, 1), (2, 2)])
def test_universal_count_is_n_times_m(n, m):
    s = Structure(Domain.range(n), (Relation("r", 1, {(0,)}),))
    c = build_canonical_sentence(s, AdversarySet.full(n, m))
    assert len(c.sentence.universals) == n * m == len(universal_names(n, m))


def test_degenerate_adversary_rejected():
    # a single constant tuple forces every map to be constant
    with pytest.raises(QcspLabError):
        build_canonical_sentence(NEQ, AdversarySet(1, (frozenset({(0,)}),)))


def test_consistent_maps_respect_adversary():
    adv = frozenset({(0, 0), (1, 1), (0, 1)})
    for mu in consistent_maps(2, 2, adv):
        col0, col1 = mu[0:2], mu[2:4]
        assert all((a, b) in adv for a in col0 for b in col1)


def test_atom_budget():
    with pytest.raises(BudgetExceeded):
        build_canonical_sentence(NEQ, AdversarySet.full(2, 2), atom_budget=100)


def test_canonical_sentence_truth_matches_naive():
    c = build_canonical_sentence(NEQ, AdversarySet.full(2, 1))
    table = evaluate_canonical(c, NEQ)
    assert all(sol is not None for sol in table.values()) == naive_truth(c.sentence, NEQ)


def test_compactness_probe_on_sigma_family():
    s = Structure(D2, (), (FamilySpec("sigma", "sigma", CutPair(D2, {0}, {1})),))
    report = reduct_compactness_probe(s, AdversarySet.full(2, 1), 2)
    assert [lvl["K"] for lvl in report["levels"]] == [1, 2]
    assert report["forward_monotone"]
    assert set(report["recurring_witness"]) == {"0,0", "0,1", "1,0", "1,1"}


def test_probe_requires_family():
    with pytest.raises(QcspLabError):
        reduct_compactness_probe(NEQ, AdversarySet.full(2, 1), 2)
