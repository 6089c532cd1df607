import itertools

import pytest

import oracles
from rwb.catalog import (
    CLASS_NAMES,
    TREE_SIG,
    build_alias,
    get_class,
    list_classes,
    run_expected,
    tree_successor_ok,
)
from rwb.core import Structure
from rwb.errors import UnknownClass
from rwb.fraisse import enumerate_models, is_member
from test_core import LO, chain


def tree_structure(parent, order):
    """Tree with root 0 given by a parent array, ``order`` listing elements by ``<``."""
    n = len(parent)
    anc = {x: set() for x in range(n)}
    for x in range(1, n):
        y = parent[x]
        while y is not None:
            anc[x].add(y)
            y = parent[y]
    tree = {(a, x) for x in range(n) for a in anc[x]}
    pos = {x: i for i, x in enumerate(order)}
    lt = {(x, y) for x in range(n) for y in range(n) if pos[x] < pos[y]}
    meet = {}
    for y1, y2 in itertools.permutations(range(n), 2):
        if y1 in anc[y2] or y2 in anc[y1]:
            continue
        common = anc[y1] & anc[y2]
        meet[y1, y2] = max(common, key=lambda a: len(anc[a]))
    R = {(m, a, b) for (a, b), m in meet.items()}
    split = {(a, b, c) for a, b, c in itertools.product(range(n), repeat=3)
             if (a, b) in meet and (a, c) in meet and meet[a, c] in anc[meet[a, b]]}
    return Structure(TREE_SIG, n, {"<": lt, "tree": tree, "R": R, "split": split}, {"0": 0})


def brute_trees(n):
    out = []
    for parents in itertools.product(range(n), repeat=n - 1):
        parent = (None,) + parents
        ok = True
        for x in range(1, n):
            seen, y = set(), x
            while y is not None and y not in seen:
                seen.add(y)
                y = parent[y]
            if y is not None:
                ok = False
        if not ok or any(parent[x] == x for x in range(1, n)):
            continue
        for order in itertools.permutations(range(n)):
            s = tree_structure(parent, order)
            if not s.table("tree") <= s.table("<"):
                continue
            lt = s.table("<")
            if all((c, a) in lt or (b, c) in lt for a, b, c in s.table("split") if (a, b) in lt):
                out.append(s)
    return out


def test_get_class_examples():
    cer = get_class("convex-er")
    lt = chain(3).table("<")
    og = cer.signature
    bad = Structure(og, 3, {"<": lt, "E": [(0, 0), (1, 1), (2, 2), (0, 2), (2, 0)]})
    assert not is_member(cer, bad)
    trees = get_class("ordered-trees")
    # root 0, children a=1, b=2, a before b
    s = Structure(TREE_SIG, 3, {"<": [(0, 1), (0, 2), (1, 2)], "tree": [(0, 1), (0, 2)],
                                "R": [(0, 1, 2), (0, 2, 1)], "split": []}, {"0": 0})
    assert is_member(trees, s)
    lo = get_class("linear-orders")
    names = {oracles.brute_code(f) for f in lo.forbidden}
    antichain = Structure(LO, 2)
    two_cycle = Structure(LO, 2, {"<": [(0, 1), (1, 0)]})
    loop = Structure(LO, 1, {"<": [(0, 0)]})
    for f in (antichain, two_cycle, loop):
        assert oracles.brute_code(f) in names
    with pytest.raises(UnknownClass):
        get_class("posets")


def test_tree_membership_rejects_bad_tables():
    trees = get_class("ordered-trees")
    base = {"<": [(0, 1), (0, 2), (1, 2)], "tree": [(0, 1), (0, 2)], "split": []}
    missing_meet = Structure(TREE_SIG, 3, {**base, "R": []}, {"0": 0})
    assert not is_member(trees, missing_meet)
    one_sided = Structure(TREE_SIG, 3, {**base, "R": [(0, 1, 2)]}, {"0": 0})
    assert not is_member(trees, one_sided)
    not_extending = Structure(TREE_SIG, 2, {"<": [(1, 0)], "tree": [(0, 1)], "R": [],
                                            "split": []}, {"0": 0})
    assert not is_member(trees, not_extending)


def test_tree_axiom5_convexity():
    # 0 -> m -> {x, y}, plus z a child of 0: x < z < y violates convexity
    parent = (None, 0, 1, 1, 0)  # m=1, x=2, y=3, z=4
    good = tree_structure(parent, [0, 1, 2, 3, 4])
    bad = tree_structure(parent, [0, 1, 2, 4, 3])
    trees = get_class("ordered-trees")
    assert is_member(trees, good)
    assert not is_member(trees, bad)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_tree_enumeration_matches_brute_force(n):
    expect = oracles.iso_classes(brute_trees(n))
    got = enumerate_models(get_class("ordered-trees"), n).of_size(n)
    assert len(got) == len(expect)
    assert {oracles.brute_code(s) for s in got} == set(expect)


def test_tree_successor_observation():
    for s in enumerate_models(get_class("ordered-trees"), 5).all():
        assert tree_successor_ok(s)


def test_list_classes():
    entries = list_classes()
    assert [e.spec.name for e in entries] == list(CLASS_NAMES)
    by = {e.spec.name: e for e in entries}
    assert by["convex-er"].expected == {"hp": True, "jep": True, "ap": True,
                                        "rigidity": True, "order": 4}
    assert by["graphs"].expected["rigidity"] is False
    assert by["maxdeg2-graphs"].expected["ap"] is False


@pytest.mark.parametrize("name", CLASS_NAMES)
def test_expected_verdicts_replay(name):
    entry = [e for e in list_classes() if e.spec.name == name][0]
    assert run_expected(entry) == entry.expected


def test_forbidden_sets_are_minimal():
    for e in list_classes():
        spec = e.spec
        for f in spec.forbidden:
            for x in range(f.size):
                sub = Structure(f.signature, f.size - 1,
                                {n: [tuple(v - (v > x) for v in t) for t in rows if x not in t]
                                 for n, rows in f.tables.items()})
                assert is_member(spec, sub)


def test_aliases():
    lo = get_class("linear-orders")
    assert build_alias("chain4", lo) == chain(4)
    gr = get_class("graphs")
    assert len(build_alias("K4", gr).table("E")) == 12
    assert build_alias("empty3", gr).table("E") == frozenset()
    er = get_class("equivalence-relations")
    assert is_member(er, build_alias("empty3", er))
    assert is_member(er, build_alias("K3", er))
    cer = get_class("convex-er")
    assert is_member(cer, build_alias("chain3", cer))
    with pytest.raises(ValueError):
        build_alias("chain3", gr)
    with pytest.raises(ValueError):
        build_alias("chain3", get_class("ordered-trees"))
    with pytest.raises(ValueError):
        build_alias("tri", gr)
