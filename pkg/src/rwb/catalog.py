"""Built-in classes, their semantic checkers and structure aliases."""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from functools import lru_cache

from rwb.core import Signature, Structure, canonical_form, canonical_relabel, induced_substructure
from rwb.errors import UnknownClass

# ---------------------------------------------------------------------------
# axiom predicates on whole structures


def _irreflexive(s, name):
    return all(t[0] != t[1] for t in s.table(name))


def _reflexive(s, name):
    rows = s.table(name)
    return all((x, x) in rows for x in range(s.size))


def _symmetric(s, name):
    rows = s.table(name)
    return all((y, x) in rows for x, y in rows)


def _transitive(s, name):
    rows = s.table(name)
    succ = {}
    for x, y in rows:
        succ.setdefault(x, set()).add(y)
    return all((x, z) in rows for x, y in rows for z in succ.get(y, ()))


def _strict_linear(s, name="<"):
    rows = s.table(name)
    if not _irreflexive(s, name) or not _transitive(s, name):
        return False
    return all(((x, y) in rows) != ((y, x) in rows)
               for x, y in itertools.combinations(range(s.size), 2))


def _equivalence(s, name="E"):
    return _reflexive(s, name) and _symmetric(s, name) and _transitive(s, name)


def _simple_graph(s, name="E"):
    return _irreflexive(s, name) and _symmetric(s, name)


def _convex(s):
    lt, e = s.table("<"), s.table("E")
    return all((x, y) in e for x, y, z in itertools.permutations(range(s.size), 3)
               if (x, y) in lt and (y, z) in lt and (x, z) in e)


def _max_degree2(s):
    e = s.table("E")
    return all(sum((x, y) in e for y in range(s.size)) <= 2 for x in range(s.size))


def minimal_violators(sig: Signature, ok, max_size: int) -> tuple:
    """Structures of size <= max_size failing ``ok`` whose one-point deletions
    all satisfy it, one per isomorphism class (constant-free signatures)."""
    good = [Structure(sig, 0)]
    bad = {}
    for k in range(1, max_size + 1):
        nxt = {}
        for parent in good:
            new_atoms = [(name, t) for name, arity in sig.relations
                         for t in itertools.product(range(k), repeat=arity) if k - 1 in t]
            base = parent.tables
            for mask in range(1 << len(new_atoms)):
                tables = {name: set(rows) for name, rows in base.items()}
                for b, (name, t) in enumerate(new_atoms):
                    if mask >> b & 1:
                        tables[name].add(t)
                s = Structure(sig, k, tables)
                code = canonical_form(s)
                if code in nxt or code in bad:
                    continue
                if ok(s):
                    nxt[code] = s
                elif all(ok(induced_substructure(s, [y for y in range(k) if y != x]))
                         for x in range(k)):
                    bad[code] = canonical_relabel(s)
        good = list(nxt.values())
    return tuple(bad[c] for c in sorted(bad))


# ---------------------------------------------------------------------------
# ordered trees

TREE_SIG = Signature((("<", 2), ("tree", 2), ("R", 3), ("split", 3)), ("0",))


class TreeChecker:
    """Rooted finite trees (strict tree order ``tree`` with root ``0``) under a
    linear order ``<`` extending it.  ``R(x, y1, y2)`` says x is the meet of
    the incomparable pair y1, y2; ``split(x1, x2, x3)`` says x3 branches off
    strictly below the meet of x1 and x2.  A split triple never has x3
    strictly between x1 and x2 in ``<``."""

    name = "tree-meet-total"
    locality = 3
    base_relations = ("<", "tree")

    def local_ok(self, s: Structure) -> bool:
        lt, tr = s.table("<"), s.table("tree")
        root = s.constant_map["0"]
        if not _strict_linear(s, "<") or not _irreflexive(s, "tree") or not _transitive(s, "tree"):
            return False
        if not tr <= lt:
            return False
        n = s.size
        if any((root, x) not in tr for x in range(n) if x != root):
            return False
        for x in range(n):
            below = [y for y in range(n) if (y, x) in tr]
            for y1, y2 in itertools.combinations(below, 2):
                if (y1, y2) not in tr and (y2, y1) not in tr:
                    return False
        return True

    @staticmethod
    def meets(s: Structure) -> dict:
        tr = s.table("tree")
        n = s.size
        out = {}
        for y1, y2 in itertools.permutations(range(n), 2):
            if (y1, y2) in tr or (y2, y1) in tr:
                continue
            common = [x for x in range(n) if (x, y1) in tr and (x, y2) in tr]
            top = [x for x in common if all(z == x or (z, x) in tr for z in common)]
            if top:
                out[y1, y2] = top[0]
        return out

    def derive(self, s: Structure) -> dict:
        meet = self.meets(s)
        r = {(m, y1, y2) for (y1, y2), m in meet.items()}
        tr = s.table("tree")
        split = set()
        for x1, x2, x3 in itertools.product(range(s.size), repeat=3):
            if (x1, x2) in meet and (x1, x3) in meet and (meet[x1, x3], meet[x1, x2]) in tr:
                split.add((x1, x2, x3))
        return {"R": r, "split": split}

    def global_ok(self, s: Structure) -> bool:
        if not self.local_ok(s):
            return False
        d = self.derive(s)
        if s.table("R") != d["R"] or s.table("split") != d["split"]:
            return False
        lt = s.table("<")
        return all((x3, x1) in lt or (x2, x3) in lt
                   for x1, x2, x3 in d["split"] if (x1, x2) in lt)


CHECKERS = {TreeChecker.name: TreeChecker()}


def tree_successor_ok(s: Structure) -> bool:
    """For each non-root a1 with ``<``-successor a2: a1 is a tree-ancestor of
    a2, or the two are incomparable and have a meet in ``s``."""
    lt, tr = s.table("<"), s.table("tree")
    root = s.constant_map["0"]
    order = sorted(range(s.size), key=lambda x: sum((y, x) in lt for y in range(s.size)))
    meets = TreeChecker.meets(s)
    for a1, a2 in zip(order, order[1:]):
        if a1 == root:
            continue
        if (a1, a2) not in tr and (a1, a2) not in meets:
            return False
    return True


# ---------------------------------------------------------------------------
# built-in classes


@dataclass
class CatalogEntry:
    spec: object
    expected: dict
    bounds: dict
    axioms: str
    reflexive: tuple = ()
    ordered: bool = False
    extra: dict = field(default_factory=dict)


LO = Signature((("<", 2),))
GR = Signature((("E", 2),))
OG = Signature((("<", 2), ("E", 2)))


def _mk(name, sig, ok, size, notes, expected, bounds, reflexive=(), checker=None):
    from rwb.fraisse import ClassSpec

    forb = minimal_violators(sig, ok, size) if ok else ()
    spec = ClassSpec(name, sig, forb, checker, notes)
    return CatalogEntry(spec, expected, bounds, notes, reflexive, "<" in sig.names)


_STD_BOUNDS = {"hp": 5, "jep": 5, "ap": 5, "rigidity": 6, "order": 5}


@lru_cache(maxsize=None)
def _entry(name) -> CatalogEntry:
    if name == "linear-orders":
        return _mk(name, LO, _strict_linear, 3, "strict linear orders",
                   {"hp": True, "jep": True, "ap": True, "rigidity": True, "order": 2},
                   _STD_BOUNDS)
    if name == "graphs":
        return _mk(name, GR, _simple_graph, 2, "loopless undirected graphs",
                   {"hp": True, "jep": True, "ap": True, "rigidity": False, "order": 0},
                   {**_STD_BOUNDS, "jep": 4, "ap": 4})
    if name == "ordered-graphs":
        return _mk(name, OG, lambda s: _strict_linear(s) and _simple_graph(s), 3,
                   "loopless undirected graphs with a strict linear order",
                   {"hp": True, "jep": True, "ap": True, "rigidity": True, "order": 2},
                   {**_STD_BOUNDS, "rigidity": 5})
    if name == "equivalence-relations":
        return _mk(name, GR, _equivalence, 3, "equivalence relations (E reflexive)",
                   {"hp": True, "jep": True, "ap": True, "rigidity": False, "order": 0},
                   _STD_BOUNDS, reflexive=("E",))
    if name == "convex-er":
        return _mk(name, OG, lambda s: _strict_linear(s) and _equivalence(s) and _convex(s), 3,
                   "strict linear order with an equivalence relation E (reflexive) whose"
                   " classes are intervals",
                   {"hp": True, "jep": True, "ap": True, "rigidity": True, "order": 4},
                   _STD_BOUNDS, reflexive=("E",))
    if name == "maxdeg2-graphs":
        return _mk(name, GR, lambda s: _simple_graph(s) and _max_degree2(s), 4,
                   "loopless undirected graphs of maximum degree 2",
                   {"hp": True, "jep": True, "ap": False, "rigidity": False, "order": 0},
                   {**_STD_BOUNDS, "jep": 4, "ap": 4})
    if name == "ordered-trees":
        return _mk(name, TREE_SIG, None, 0,
                   "finite rooted trees (strict tree order, root 0) with a linear order"
                   " extending it; R is the meet relation of incomparable pairs, split"
                   " records branching order; convexity of split triples in <",
                   {"hp": True, "jep": True, "ap": True, "rigidity": True, "order": 4},
                   {"hp": 5, "jep": 5, "ap": 5, "rigidity": 5, "order": 5},
                   checker=TreeChecker.name)
    raise UnknownClass(f"unknown class {name!r}; known: {', '.join(CLASS_NAMES)}")


CLASS_NAMES = ("linear-orders", "graphs", "ordered-graphs", "equivalence-relations",
               "convex-er", "ordered-trees", "maxdeg2-graphs")


def get_class(name: str):
    return _entry(name).spec


def get_entry(name: str) -> CatalogEntry:
    return _entry(name)


def list_classes() -> list[CatalogEntry]:
    return [_entry(n) for n in CLASS_NAMES]


def entry_for(spec) -> CatalogEntry | None:
    for n in CLASS_NAMES:
        if n == spec.name and _entry(n).spec == spec:
            return _entry(n)
    return None


# ---------------------------------------------------------------------------
# aliases: chainN, KN, emptyN

_ALIAS = re.compile(r"^(chain|K|empty)(\d+)$")


def build_alias(text: str, spec) -> Structure:
    m = _ALIAS.match(text)
    if not m:
        raise ValueError(f"not an alias: {text!r}")
    kind, n = m.group(1), int(m.group(2))
    sig = spec.signature
    if sig.constants:
        raise ValueError(f"aliases need a constant-free signature, {spec.name} has constants")
    entry = entry_for(spec)
    reflexive = entry.reflexive if entry else ()
    tables = {}
    for name, arity in sig.relations:
        if arity != 2:
            raise ValueError(f"aliases need binary relations, {name!r} has arity {arity}")
        rows = set()
        if name == "<":
            rows = {(x, y) for x in range(n) for y in range(n) if x < y}
        elif kind == "K":
            rows = {(x, y) for x in range(n) for y in range(n) if x != y}
        if name in reflexive:
            rows |= {(x, x) for x in range(n)}
        tables[name] = rows
    if kind == "chain" and "<" not in sig.names:
        raise ValueError(f"chain alias needs a '<' relation in {spec.name}")
    return Structure(sig, n, tables)


def run_expected(entry: CatalogEntry, workers: int = 1) -> dict:
    """Observed verdicts for the checks named in ``entry.expected``."""
    from rwb.fraisse import check_ap, check_hp, check_jep
    from rwb.order import find_order_types
    from rwb.ramsey import check_rigidity

    runners = {"hp": check_hp, "jep": check_jep, "ap": check_ap, "rigidity": check_rigidity}
    out = {}
    for name in entry.expected:
        n = entry.bounds[name]
        if name == "order":
            out[name] = len(find_order_types(entry.spec, n, workers))
        else:
            out[name] = runners[name](entry.spec, n, workers=workers).passed
    return out
