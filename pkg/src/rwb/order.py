"""Definable linear orders as unions of irreflexive 2-types."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from rwb.core import QfType, Structure, qf_type
from rwb.errors import ResourceLimit
from rwb.fraisse import ClassSpec, enumerate_models, type_census

MAX_TYPES = 20


@dataclass(frozen=True)
class OrderCandidate:
    """``W`` is a set of irreflexive 2-types whose union is a strict linear
    order on every catalog model up to ``verified_bound``."""

    W: tuple
    spec: ClassSpec
    verified_bound: int

    def less(self, m: Structure, x, y) -> bool:
        return x != y and qf_type(m, (x, y)) in self.W

    def to_dict(self):
        return {"W": [p.to_dict() for p in self.W], "verified_bound": self.verified_bound}


def irreflexive_two_types(spec: ClassSpec, n: int, workers: int = 1) -> list[QfType]:
    return [p for p in type_census(spec, 2, n, workers) if p.irreflexive]


@dataclass
class TypeOrderReport:
    type: QfType
    bound: int
    antisymmetric: bool
    acyclic: bool
    antisymmetry_witness: tuple | None = None  # (model, (x, y))
    cycle_witness: tuple | None = None  # (model, (x, y, z))

    @property
    def passed(self):
        return self.antisymmetric and self.acyclic


def check_type_order_axioms(p: QfType, spec: ClassSpec, n: int, workers: int = 1) -> TypeOrderReport:
    """Look for a pair realizing p both ways and for a 3-cycle of p."""
    anti = cyc = None
    for m in enumerate_models(spec, n, workers).all():
        rel = {(x, y) for x, y in itertools.permutations(range(m.size), 2)
               if qf_type(m, (x, y)) == p}
        if anti is None:
            for x, y in sorted(rel):
                if (y, x) in rel:
                    anti = (m, (x, y))
                    break
        if cyc is None:
            for x, y, z in itertools.permutations(range(m.size), 3):
                if (x, y) in rel and (y, z) in rel and (z, x) in rel:
                    cyc = (m, (x, y, z))
                    break
        if anti and cyc:
            break
    return TypeOrderReport(p, n, anti is None, cyc is None, anti, cyc)


def _constraints(models, index):
    """Deduplicated pair and triple type-index patterns over all models."""
    pairs, triples = set(), set()
    for m in models:
        t = {(x, y): index[qf_type(m, (x, y))]
             for x, y in itertools.permutations(range(m.size), 2)}
        for x, y in itertools.combinations(range(m.size), 2):
            pairs.add((t[x, y], t[y, x]))
        for x, y, z in itertools.permutations(range(m.size), 3):
            triples.add((t[x, y], t[y, z], t[x, z]))
    return pairs, triples


def find_order_types(spec: ClassSpec, n: int, workers: int = 1) -> list[OrderCandidate]:
    """All W among the realized irreflexive 2-types defining a strict linear
    order on every catalog model up to size n, sorted by size then types."""
    P = irreflexive_two_types(spec, n, workers)
    if len(P) > MAX_TYPES:
        raise ResourceLimit(f"{len(P)} irreflexive 2-types exceed {MAX_TYPES}",
                            {"types": len(P)})
    index = {p: i for i, p in enumerate(P)}
    pairs, triples = _constraints(enumerate_models(spec, n, workers).all(), index)
    found = []
    for mask in range(1 << len(P)):
        if any(((mask >> a) & 1) == ((mask >> b) & 1) for a, b in pairs):
            continue
        if any(mask >> a & 1 and mask >> b & 1 and not mask >> c & 1 for a, b, c in triples):
            continue
        found.append(tuple(P[i] for i in range(len(P)) if mask >> i & 1))
    found.sort(key=lambda w: (len(w), w))
    return [OrderCandidate(w, spec, n) for w in found]


def find_monochromatic_2type(M: Structure, X, target: int):
    """First sublist of X (in listing order) of length ``target`` whose
    increasing pairs all share one atomic type.

    ``target <= 1`` has no pairs: the answer is ``(None, X[:target])``.
    Returns ``(type, sublist)`` or ``None``.
    """
    X = list(X)
    if len(set(X)) != len(X):
        raise ValueError("X must list distinct elements")
    if target > len(X):
        return None
    if target <= 1:
        return None, X[:target]
    tp = {(a, b): qf_type(M, (a, b)) for a, b in itertools.combinations(X, 2)}
    for combo in itertools.combinations(X, target):
        p = tp[combo[0], combo[1]]
        if all(tp[a, b] == p for a, b in itertools.combinations(combo, 2)):
            return p, list(combo)
    return None
