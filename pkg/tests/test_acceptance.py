"""Acceptance criteria 1-9.

Each test carries a ``criterion`` marker; conftest prints one PASS/FAIL line
per criterion at the end of the run.
"""
import json
import random
import subprocess
import sys
import time

import pytest

import oracles
from rwb.catalog import get_class
from rwb.cli import main
from rwb.core import _hom_cached, is_isomorphic
from rwb.fraisse import (
    ClassSpec,
    check_ap,
    check_extension_property,
    check_hp,
    check_jep,
    enumerate_models,
    grow_generic,
    type_census,
)
from rwb.order import find_order_types
from rwb.ramsey import (
    check_rigidity,
    copy_hypergraph,
    decide_arrow,
    extract_indiscernible,
    nonrigid_bad_coloring,
    verify_coloring,
)
from test_core import chain, graph
from test_ramsey import _instances, r33_palette, symmetric_palette

crit = pytest.mark.criterion


def fresh(name):
    """Spec rebuilt from its json form, so it starts with empty caches."""
    return ClassSpec.from_dict(get_class(name).to_dict())


@crit(1, "arrow ground truth: 6-chain arrows (3-chain)^(2-chain)_2, 5-chain does not")
def test_c1_r33():
    t = time.perf_counter()
    yes = decide_arrow(chain(6), chain(3), chain(2), 2)
    assert yes.holds and time.perf_counter() - t < 5
    t = time.perf_counter()
    no = decide_arrow(chain(5), chain(3), chain(2), 2)
    assert not no.holds and time.perf_counter() - t < 5
    assert verify_coloring(no.coloring, copy_hypergraph(chain(2), chain(3), chain(5)))
    # exhaustive: all 2^15 colorings of the 6-chain's pairs
    assert len(oracles.homs(chain(2), chain(6))) == 15
    assert oracles.brute_arrow(chain(6), chain(3), chain(2), 2) is True
    assert oracles.brute_arrow(chain(5), chain(3), chain(2), 2) is False


@crit(2, "decide_arrow equals brute-force coloring enumeration on >= 50 catalog instances")
def test_c2_oracle_equivalence():
    inst = _instances()
    assert len(inst) >= 50
    for _, a, b, c, k in inst:
        assert len(oracles.homs(a, c)) <= 16
        assert decide_arrow(c, b, a, k).holds == oracles.brute_arrow(c, b, a, k)


@crit(3, "hp/jep/ap at bound 5 for three classes; maxdeg2 ap fails with edge/triangle/path")
def test_c3_fraisse_suite():
    _hom_cached.cache_clear()
    t = time.perf_counter()
    for name in ("linear-orders", "convex-er", "ordered-graphs"):
        spec = fresh(name)
        for check in (check_hp, check_jep, check_ap):
            v = check(spec, 5)
            assert v.passed, (name, v.check)
            assert v.bound == 5
    v = check_ap(fresh("maxdeg2-graphs"), 5)
    elapsed = time.perf_counter() - t
    assert not v.passed
    cert = v.certificate
    edge = graph(2, [(0, 1)])
    tri = graph(3, [(0, 1), (1, 2), (0, 2)])
    path = graph(3, [(0, 1), (1, 2)])
    assert is_isomorphic(cert.base, edge)
    sides = [cert.left, cert.right]
    assert any(is_isomorphic(s, tri) for s in sides)
    assert any(is_isomorphic(s, path) for s in sides)
    assert elapsed < 60


@crit(4, "non-rigid classes: every C of size <= 6 fails C -> (A)^A_2 with a re-verified coloring")
@pytest.mark.parametrize("name", ["graphs", "equivalence-relations"])
def test_c4_rigidity(name):
    spec = get_class(name)
    v = check_rigidity(spec, 6)
    assert not v.passed
    a, sigma = v.certificate.model, v.certificate.sigma
    assert all(sigma.map[sigma.map[x]] == x for x in range(a.size))
    models = enumerate_models(spec, 6).all()
    assert len(models) == {"graphs": 209, "equivalence-relations": 30}[name]
    for c in models:
        assert not decide_arrow(c, a, a, 2).holds
        col = nonrigid_bad_coloring(a, sigma, c)
        assert verify_coloring(col, copy_hypergraph(a, a, c))


@crit(5, "order candidates 2/4/0/0 at bound 5, unchanged at 6")
def test_c5_order_extraction():
    want = {"linear-orders": 2, "convex-er": 4, "equivalence-relations": 0, "graphs": 0}
    for name, count in want.items():
        spec = get_class(name)
        five = [c.W for c in find_order_types(spec, 5)]
        six = [c.W for c in find_order_types(spec, 6)]
        assert len(five) == count, name
        assert five == six


@crit(6, "2-type census 3 and 5 at bound 4, stable at 6; 4 convex-er models of size 3")
def test_c6_type_census():
    for name, count in (("linear-orders", 3), ("convex-er", 5)):
        spec = get_class(name)
        assert len(type_census(spec, 2, 4)) == count
        assert type_census(spec, 2, 6) == type_census(spec, 2, 4)
    assert len(enumerate_models(get_class("convex-er"), 3).of_size(3)) == 4


@crit(7, "generic growth: extension property at m=2, 8-chain, deterministic")
def test_c7_generic_growth():
    gr, lo = get_class("graphs"), get_class("linear-orders")
    for seed in (0, 1, 2):
        runs = {grow_generic(gr, 12, seed, workers=w).to_json() for w in (1, 4) for _ in range(3)}
        assert len(runs) == 1
        g = grow_generic(gr, 12, seed)
        assert check_extension_property(gr, g, 2).passed
        chains = {grow_generic(lo, 8, seed, workers=w).to_json() for w in (1, 4) for _ in range(3)}
        assert len(chains) == 1
        assert is_isomorphic(grow_generic(lo, 8, seed), chain(8))


@crit(8, "100 random pair palettes on the 6-chain give a 3-chain; the R(3,3) palette on 5 does not")
def test_c8_indiscernibles():
    rnd = random.Random(2024)
    for _ in range(100):
        pal = symmetric_palette(6, rnd)
        g = extract_indiscernible(chain(6), chain(3), pal)
        assert g is not None and g.is_valid()
    bad = r33_palette(decide_arrow(chain(5), chain(3), chain(2), 2))
    assert extract_indiscernible(chain(5), chain(3), bad) is None


DETERMINISM_RUNS = [
    ["enumerate", "--class", "ordered-graphs", "--max-size", "4"],
    ["check", "--class", "convex-er", "--props", "hp,jep,ap,rigidity,types", "--max-size", "4"],
    ["check", "--class", "maxdeg2-graphs", "--props", "ap", "--max-size", "4"],
    ["check", "--class", "graphs", "--props", "extension", "--model", "K3", "--m", "2",
     "--max-size", "3"],
    ["arrow", "--class", "linear-orders", "--A", "chain2", "--B", "chain3", "--C", "chain5"],
    ["arrow", "--class", "linear-orders", "--A", "chain2", "--B", "chain3", "--search",
     "--max-size", "8"],
    ["arrow", "--A", "chain2", "--B", "chain3", "--C", "chain16", "--k", "3", "--budget", "1000"],
    ["witness", "--class", "convex-er", "--A", "chain1", "--B", "chain2", "--max-size", "4"],
    ["order", "--class", "convex-er", "--max-size", "5"],
    ["indiscernible", "--A", "chain3", "--C", "chain6", "--seed", "7"],
    ["generic", "--class", "graphs", "--size-budget", "8", "--seed", "5"],
    ["catalog"],
]


@crit(9, "CLI json byte-identical across runs and worker counts")
def test_c9_cli_determinism(capsys):
    for argv in DETERMINISM_RUNS:
        outs = set()
        for w in ("1", "4", "1", "4"):
            main(argv + ["--format", "json", "--workers", w])
            outs.add(capsys.readouterr().out)
        assert len(outs) == 1, argv
        json.loads(outs.pop())
    # separate processes too
    argv = [sys.executable, "-m", "rwb.cli"] + DETERMINISM_RUNS[8] + ["--format", "json"]
    procs = [subprocess.run(argv + ["--workers", w], capture_output=True, text=True)
             for w in ("1", "4")]
    assert procs[0].stdout == procs[1].stdout and procs[0].returncode == 0
