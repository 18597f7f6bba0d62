"""Shared data model: domains, relations, operations, structures, sentences.

Domain elements are named by strings externally and by dense integer
indices internally; the order of ``Domain.elements`` fixes the indices.
Everything here is immutable once built.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable, Iterator, Mapping, Sequence

if TYPE_CHECKING:
    from qcsplab.dnf import DnfFormula
    from qcsplab.gadgets import FamilySpec

EQ = "eq"
FORALL = "A"
EXISTS = "E"


class QcspLabError(Exception):
    """Base class for errors raised by this package."""


class BudgetExceeded(QcspLabError):
    def __init__(self, message: str, required: int | None = None, lower: int | None = None,
                 upper: int | None = None):
        super().__init__(message)
        self.required = required
        self.lower = lower
        self.upper = upper


class ParseError(QcspLabError, ValueError):
    def __init__(self, message: str, position: int | None = None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


DEFAULT_BUDGET = 10**7


@dataclass(frozen=True)
class Domain:
    elements: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(str(e) for e in self.elements))
        if not self.elements:
            raise ValueError("domain must have at least one element")
        if len(set(self.elements)) != len(self.elements):
            raise ValueError(f"duplicate domain element names in {self.elements}")
        if any(not e for e in self.elements):
            raise ValueError("domain element names must be nonempty")

    @classmethod
    def range(cls, n: int) -> "Domain":
        return cls(tuple(str(i) for i in range(n)))

    @property
    def size(self) -> int:
        return len(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def index(self, name: str) -> int:
        try:
            return self.elements.index(name)
        except ValueError:
            raise QcspLabError(f"unknown domain element {name!r}") from None

    def name(self, i: int) -> str:
        return self.elements[i]

    def tuples(self, m: int) -> Iterator[tuple[int, ...]]:
        """All of A^m in lexicographic order."""
        return itertools.product(range(self.size), repeat=m)


@dataclass(frozen=True)
class Relation:
    """A named relation.

    ``extension`` is the semantic ground truth; ``dnf`` is an optional
    certificate.  Gadget relations too large to expand carry only a DNF
    (``extension is None``); membership then falls back to the formula.
    """

    name: str
    arity: int
    extension: frozenset | None = None
    dnf: "DnfFormula | None" = None

    def __post_init__(self):
        if self.arity < 1:
            raise ValueError(f"relation {self.name!r}: arity must be positive")
        if self.extension is None and self.dnf is None:
            raise ValueError(f"relation {self.name!r} needs an extension or a DNF")
        if self.extension is not None and not isinstance(self.extension, frozenset):
            object.__setattr__(self, "extension", frozenset(tuple(t) for t in self.extension))

    @property
    def materialized(self) -> bool:
        return self.extension is not None

    def __contains__(self, t) -> bool:
        if self.extension is not None:
            return tuple(t) in self.extension
        from qcsplab.dnf import eval_dnf
        return eval_dnf(self.dnf, t)

    def tuples(self) -> frozenset:
        if self.extension is None:
            raise QcspLabError(f"relation {self.name!r} has no materialized extension")
        return self.extension

    def sorted_tuples(self) -> list[tuple[int, ...]]:
        return sorted(self.tuples())

    def __len__(self) -> int:
        return len(self.tuples())


@dataclass(frozen=True)
class Operation:
    """A total operation given by its table in lexicographic input order."""

    name: str
    arity: int
    size: int
    table: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "table", tuple(self.table))
        if self.arity < 1:
            raise ValueError(f"operation {self.name!r}: arity must be positive")
        if len(self.table) != self.size ** self.arity:
            raise ValueError(
                f"operation {self.name!r}: table has {len(self.table)} entries, "
                f"expected {self.size ** self.arity}")
        if any(not 0 <= v < self.size for v in self.table):
            raise ValueError(f"operation {self.name!r}: output out of range")

    @classmethod
    def from_function(cls, name: str, size: int, arity: int, fn) -> "Operation":
        table = [fn(*args) for args in itertools.product(range(size), repeat=arity)]
        return cls(name, arity, size, tuple(table))

    def index_of(self, args: Sequence[int]) -> int:
        i = 0
        for a in args:
            i = i * self.size + a
        return i

    def __call__(self, *args: int) -> int:
        if len(args) != self.arity:
            raise ValueError(f"{self.name} expects {self.arity} arguments, got {len(args)}")
        return self.table[self.index_of(args)]

    @property
    def idempotent(self) -> bool:
        return all(self(*([a] * self.arity)) == a for a in range(self.size))


@dataclass(frozen=True)
class Algebra:
    domain: Domain
    operations: tuple[Operation, ...] = ()
    name: str = "A"

    def __post_init__(self):
        object.__setattr__(self, "operations", tuple(self.operations))
        for f in self.operations:
            if f.size != self.domain.size:
                raise ValueError(f"operation {f.name!r} is not over the algebra's domain")

    @property
    def idempotent(self) -> bool:
        return all(f.idempotent for f in self.operations)


@dataclass(frozen=True)
class Structure:
    """A finite relational structure, possibly with parameterized families.

    ``constants`` marks the structure as expanded with all constants (the
    singleton unary relations), which matters for polymorphism checks.
    Equality (``eq``) is always available and never stored.
    """

    domain: Domain
    relations: tuple[Relation, ...] = ()
    families: tuple["FamilySpec", ...] = ()
    constants: bool = False

    def __post_init__(self):
        object.__setattr__(self, "relations", tuple(self.relations))
        object.__setattr__(self, "families", tuple(self.families))

    @property
    def relation_names(self) -> tuple[str, ...]:
        return tuple(r.name for r in self.relations)

    def relation(self, name: str) -> Relation:
        for r in self.relations:
            if r.name == name:
                return r
        if name == EQ:
            return equality_relation(self.domain.size)
        for fam in self.families:
            k = fam.member_index(name)
            if k is not None:
                return fam.instantiate(k)
        raise QcspLabError(f"unknown relation {name!r}")

    def with_relations(self, relations: Iterable[Relation]) -> "Structure":
        return Structure(self.domain, tuple(self.relations) + tuple(relations),
                         self.families, self.constants)

    def truncate(self, k_max: int) -> "Structure":
        """Replace each family by its first ``k_max`` members."""
        extra = [fam.instantiate(k) for fam in self.families for k in range(1, k_max + 1)]
        return Structure(self.domain, self.relations + tuple(extra), (), self.constants)


def equality_relation(n: int) -> Relation:
    return Relation(EQ, 2, frozenset((a, a) for a in range(n)))


def constant_relations(n: int) -> list[Relation]:
    return [Relation(f"const_{a}", 1, frozenset({(a,)})) for a in range(n)]


# Sentences.  An atom argument is a ``str`` (variable) or an ``int``
# (domain element index).

@dataclass(frozen=True)
class Atom:
    relation: str
    args: tuple

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(a for a in self.args if isinstance(a, str))


@dataclass(frozen=True)
class PHSentence:
    prefix: tuple[tuple[str, str], ...]
    body: tuple[Atom, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple((q, v) for q, v in self.prefix))
        object.__setattr__(self, "body", tuple(self.body))
        seen = set()
        for q, v in self.prefix:
            if q not in (FORALL, EXISTS):
                raise ValueError(f"bad quantifier {q!r}")
            if v in seen:
                raise ValueError(f"variable {v!r} quantified twice")
            seen.add(v)
        for atom in self.body:
            for v in atom.variables:
                if v not in seen:
                    raise ValueError(f"variable {v!r} in atom {atom.relation} is not quantified")

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(v for _, v in self.prefix)

    def quantifier(self, var: str) -> str:
        for q, v in self.prefix:
            if v == var:
                return q
        raise KeyError(var)

    @property
    def universals(self) -> tuple[str, ...]:
        return tuple(v for q, v in self.prefix if q == FORALL)

    @property
    def existentials(self) -> tuple[str, ...]:
        return tuple(v for q, v in self.prefix if q == EXISTS)

    def blocks(self) -> list[tuple[str, tuple[str, ...]]]:
        """Maximal runs of equal quantifiers."""
        out: list[tuple[str, tuple[str, ...]]] = []
        for q, v in self.prefix:
            if out and out[-1][0] == q:
                out[-1] = (q, out[-1][1] + (v,))
            else:
                out.append((q, (v,)))
        return out

    def substitute(self, values: Mapping[str, int]) -> "PHSentence":
        """Replace variables by constants and drop them from the prefix."""
        prefix = tuple((q, v) for q, v in self.prefix if v not in values)
        body = tuple(Atom(a.relation, tuple(values.get(x, x) if isinstance(x, str) else x
                                            for x in a.args)) for a in self.body)
        return PHSentence(prefix, body)

    def check_against(self, s: Structure) -> None:
        for atom in self.body:
            r = s.relation(atom.relation)
            if r.arity != len(atom.args):
                raise QcspLabError(
                    f"atom {atom.relation} has {len(atom.args)} arguments, relation arity is {r.arity}")
            for a in atom.args:
                if isinstance(a, int) and not 0 <= a < s.domain.size:
                    raise QcspLabError(f"constant index {a} outside the domain")


def validate_structure(s: Structure) -> list[str]:
    """Return every invariant violation found in ``s`` (empty means valid)."""
    from qcsplab.dnf import dnf_to_extension

    problems = []
    n = s.domain.size
    names = [r.name for r in s.relations]
    for name in sorted({x for x in names if names.count(x) > 1}):
        problems.append(f"duplicate relation name {name!r}")
    if EQ in names:
        problems.append("relation name 'eq' is reserved for built-in equality")
    for r in s.relations:
        if r.extension is not None:
            for t in sorted(r.extension):
                if len(t) != r.arity:
                    problems.append(
                        f"relation {r.name!r}: tuple {t} has length {len(t)}, arity is {r.arity}")
                elif any(not (isinstance(x, int) and 0 <= x < n) for x in t):
                    problems.append(f"relation {r.name!r}: tuple {t} has entries outside the domain")
        if r.dnf is not None:
            if r.dnf.arity != r.arity:
                problems.append(f"relation {r.name!r}: dnf arity {r.dnf.arity} != {r.arity}")
            elif r.extension is not None and dnf_to_extension(r.dnf, r.arity, s.domain) != r.extension:
                problems.append(f"relation {r.name!r}: dnf expansion differs from extension")
    for fam in s.families:
        if fam.cut.domain != s.domain:
            problems.append(f"family {fam.name!r}: cut is over a different domain")
    return problems


def apply_operation(f: Operation, args: Sequence[Sequence[int]]) -> tuple[int, ...]:
    """Componentwise action of ``f`` on ``k`` tuples of a common length."""
    if len(args) != f.arity:
        raise ValueError(f"{f.name} has arity {f.arity}, got {len(args)} tuples")
    lengths = {len(t) for t in args}
    if len(lengths) > 1:
        raise ValueError(f"argument tuples have different lengths {sorted(lengths)}")
    return tuple(f.table[f.index_of(column)] for column in zip(*args))


def structure_reduct(s: Structure, names: Iterable[str]) -> Structure:
    names = set(names)
    unknown = names - set(s.relation_names)
    if unknown:
        raise QcspLabError(f"unknown relation names {sorted(unknown)}")
    return Structure(s.domain, tuple(r for r in s.relations if r.name in names),
                     constants=s.constants)
