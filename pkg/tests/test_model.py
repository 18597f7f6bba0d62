import pytest

from qcsplab.model import (
    EXISTS, FORALL, Atom, Domain, Operation, PHSentence, QcspLabError, Relation, Structure,
    apply_operation, structure_reduct, validate_structure)


def test_domain_names_round_trip():
    d = Domain(("a", "b", "c"))
    assert d.size == 3
    assert [d.index(d.name(i)) for i in range(3)] == [0, 1, 2]
    assert len(list(d.tuples(2))) == 9


def test_domain_rejects_duplicates():
    with pytest.raises(ValueError):
        Domain(("a", "a"))


def test_relation_needs_content():
    with pytest.raises(ValueError):
        Relation("r", 2)


def test_operation_table_lookup():
    f = Operation.from_function("sub", 3, 2, lambda x, y: (x - y) % 3)
    assert f(2, 1) == 1
    assert f(0, 1) == 2
    assert not f.idempotent


def test_apply_operation_columnwise():
    f = Operation.from_function("min", 2, 2, min)
    assert apply_operation(f, [(0, 1, 1), (1, 1, 0)]) == (0, 1, 0)


def test_sentence_blocks_and_substitution():
    phi = PHSentence(((FORALL, "x"), (FORALL, "y"), (EXISTS, "z")),
                     (Atom("r", ("x", "z")), Atom("r", ("z", "y"))))
    assert phi.blocks() == [(FORALL, ("x", "y")), (EXISTS, ("z",))]
    assert phi.universals == ("x", "y")
    sub = phi.substitute({"z": 1})
    assert sub.variables == ("x", "y")
    assert sub.body[0].args == ("x", 1)


def test_sentence_rejects_free_variables():
    with pytest.raises((ValueError, QcspLabError)):
        PHSentence(((FORALL, "x"),), (Atom("r", ("x", "y")),))


def test_sentence_rejects_repeated_variables():
    with pytest.raises((ValueError, QcspLabError)):
        PHSentence(((FORALL, "x"), (EXISTS, "x")), ())


def test_check_against_catches_arity():
    s = Structure(Domain.range(2), (Relation("r", 2, {(0, 1)}),))
    phi = PHSentence(((EXISTS, "x"),), (Atom("r", ("x",)),))
    with pytest.raises(QcspLabError):
        phi.check_against(s)


def test_validate_structure_reports_bad_tuples():
    s = Structure(Domain.range(2), (Relation("r", 2, {(0, 5)}),))
    assert validate_structure(s)
    ok = Structure(Domain.range(2), (Relation("r", 2, {(0, 1)}),))
    assert validate_structure(ok) == []


def test_builtin_equality_and_reduct():
    s = Structure(Domain.range(3), (Relation("r", 1, {(0,)}), Relation("q", 1, {(1,)})))
    assert (2, 2) in s.relation("eq")
    assert (1, 2) not in s.relation("eq")
    assert structure_reduct(s, {"q"}).relation_names == ("q",)
    with pytest.raises(QcspLabError):
        s.relation("nope")
