import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import naive_truth
from qcsplab.gadgets import (
    CutPair, NAEInstance, all_cuts, brute_naesat, build_rho, build_rho_prime, build_sigma,
    build_tau, domain_to_nae, format_naesat, nae_to_domain, parse_naesat,
    reduce_naesat_to_qcsp, tau_via_sigma_conjunction)
from qcsplab.dnf import eval_dnf
from qcsplab.model import Domain, ParseError, QcspLabError

D3 = Domain.range(3)
CUT = CutPair(D3, {0, 1}, {1, 2})


def test_cut_validation():
    with pytest.raises(QcspLabError):
        CutPair(D3, {0}, {1})          # does not cover
    with pytest.raises(QcspLabError):
        CutPair(D3, {0, 1, 2}, {1})    # alpha not strict
    with pytest.raises(QcspLabError):
        CutPair(D3, set(), {0, 1, 2})


def test_cut_parse_and_format():
    cut = CutPair.parse("0,1:1,2")
    assert cut == CUT
    assert cut.format() == "0,1:1,2"
    assert CutPair.parse("0,1:1,2,3").domain.size == 4
    with pytest.raises(ParseError):
        CutPair.parse("0,1")


def test_all_cuts_count():
    # ordered pairs of proper nonempty subsets covering {0,1,2}
    assert len(all_cuts(D3)) == 12


def test_gadget_sizes():
    assert len(build_rho(CUT).extension) == 7
    rho3 = build_rho_prime(CUT)
    assert len(rho3.extension) == 15
    assert len(rho3.dnf.disjuncts) == 16
    tau2 = build_tau(CUT, 2)
    assert len(tau2.extension) == 585
    assert len(tau2.dnf.disjuncts) == 32


@pytest.mark.parametrize("cut", all_cuts(D3), ids=lambda c: c.format())
@pytest.mark.parametrize("k", [1, 2])
def test_dnf_and_extension_agree(cut, k):
    for r in (build_sigma(cut, k), build_tau(cut, k)):
        for t in itertools.product(range(3), repeat=r.arity):
            assert (t in r.extension) == eval_dnf(r.dnf, t)


def test_large_members_stay_symbolic():
    r = build_tau(CUT, 3, budget=1000)
    assert not r.materialized
    assert (0, 0, 0, 2, 1, 0, 2, 2, 0) in r
    assert (0, 0, 2, 2, 1, 0, 2, 2, 0) not in r


def test_sigma_conjunction_is_tau():
    assert tau_via_sigma_conjunction(CUT, 2).extension == build_tau(CUT, 2).extension


def test_naesat_parse_and_format():
    inst = parse_naesat("# header\nvars a b c d\na b c  # first\nb c d\n")
    assert inst.variables == ("a", "b", "c", "d")
    assert parse_naesat(format_naesat(inst)) == inst
    with pytest.raises(ParseError):
        parse_naesat("a b\n")
    with pytest.raises(ParseError):
        parse_naesat("vars a b\na b c\n")


def test_brute_naesat_examples():
    assert not brute_naesat(NAEInstance(("x",), (("x", "x", "x"),)))
    assert brute_naesat(NAEInstance(("x", "y"), (("x", "x", "y"),)))


def test_reduction_preconditions():
    with pytest.raises(QcspLabError):
        reduce_naesat_to_qcsp(NAEInstance((), ()), CUT)
    with pytest.raises(QcspLabError):
        reduce_naesat_to_qcsp(NAEInstance(("1",), (("1", "1", "1"),)), CUT)


def test_valid_cuts_always_have_both_differences():
    for n in (2, 3, 4):
        assert all(c.alpha_only and c.beta_only for c in all_cuts(Domain.range(n)))


def test_encoding_maps_are_inverse():
    for bits in itertools.product((0, 1), repeat=4):
        assert domain_to_nae(CUT, nae_to_domain(CUT, bits)) == bits


@st.composite
def nae_instances(draw):
    v = draw(st.integers(1, 3))
    names = tuple(f"v{i}" for i in range(v))
    clause = st.tuples(*[st.sampled_from(names)] * 3)
    return NAEInstance(names, tuple(draw(st.lists(clause, min_size=1, max_size=2))))


@given(nae_instances(), st.sampled_from([c for c in all_cuts(Domain.range(4))
                                        if c.alpha_only and c.beta_only]))
@settings(max_examples=80, deadline=None)
def test_reduction_against_naive_oracle(inst, cut):
    phi, s = reduce_naesat_to_qcsp(inst, cut)
    assert naive_truth(phi, s) == (not brute_naesat(inst))
