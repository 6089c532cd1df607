import itertools
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from rwb.core import (
    Embedding,
    QfType,
    Signature,
    Structure,
    automorphisms,
    canonical_form,
    canonical_relabel,
    enumerate_embeddings,
    hom_images,
    induced_substructure,
    is_isomorphic,
    qf_type,
    relabel,
)
from rwb.errors import FormatError, MissingConstant, OutOfRange, SignatureMismatch

LO = Signature((("<", 2),))
GR = Signature((("E", 2),))
OG = Signature((("<", 2), ("E", 2)))


def chain(n):
    return Structure(LO, n, {"<": [(i, j) for i in range(n) for j in range(n) if i < j]})


def graph(n, edges):
    return Structure(GR, n, {"E": [e for a, b in edges for e in ((a, b), (b, a))]})


def convex(classes):
    """Ordered structure whose E-classes are consecutive blocks of the given sizes."""
    n = sum(classes)
    label = []
    for i, c in enumerate(classes):
        label += [i] * c
    return Structure(OG, n, {
        "<": [(i, j) for i in range(n) for j in range(n) if i < j],
        "E": [(i, j) for i in range(n) for j in range(n) if label[i] == label[j]],
    })


@st.composite
def structures(draw, sig=OG, max_size=5):
    n = draw(st.integers(0, max_size))
    tabs = {}
    for name, arity in sig.relations:
        tups = list(itertools.product(range(n), repeat=arity))
        bits = draw(st.lists(st.booleans(), min_size=len(tups), max_size=len(tups)))
        tabs[name] = [t for t, b in zip(tups, bits) if b]
    return Structure(sig, n, tabs)


def test_signature_validation():
    with pytest.raises(ValueError):
        Signature((("R", 0),))
    with pytest.raises(ValueError):
        Signature((("R", 2), ("R", 1)))
    with pytest.raises(ValueError):
        Signature((("R", 2),), ("R",))


def test_structure_json_round_trip():
    text = ('{"signature":{"relations":[{"name":"<","arity":2},{"name":"E","arity":2}],'
            '"constants":[]},"size":3,"tables":{"<":[[0,1],[0,2],[1,2]],'
            '"E":[[0,0],[1,1],[2,2],[0,1],[1,0]]},"constant_map":{}}')
    s = Structure.from_json(text)
    assert s.size == 3 and s.holds("E", (1, 0))
    assert Structure.from_json(s.to_json()) == s


def test_structure_json_relabels_universe():
    d = {"signature": {"relations": [{"name": "<", "arity": 2}], "constants": []},
         "size": 2, "universe": ["b", "a"], "tables": {"<": [["b", "a"]]}, "constant_map": {}}
    assert Structure.from_dict(d) == chain(2)


@pytest.mark.parametrize("bad", [
    "{", '{"size":1}',
    '{"signature":{"relations":[{"name":"<","arity":2}],"constants":[]},"size":2,'
    '"tables":{"<":[[0,5]]},"constant_map":{}}',
    '{"signature":{"relations":[{"name":"<","arity":2}],"constants":[]},"size":2,'
    '"tables":{},"constant_map":{}}',
])
def test_malformed_json(bad):
    with pytest.raises(FormatError):
        Structure.from_json(bad)


def test_induced_substructure_examples():
    assert induced_substructure(chain(3), {0, 2}) == chain(2)
    s = convex([2, 1])
    assert induced_substructure(s, range(3)) == s
    sub = induced_substructure(s, {0, 2})
    assert sub == convex([1, 1])


def test_induced_substructure_needs_constants():
    sig = Signature((("<", 2),), ("0",))
    s = Structure(sig, 2, {"<": [(0, 1)]}, {"0": 0})
    with pytest.raises(MissingConstant):
        induced_substructure(s, {1})
    with pytest.raises(OutOfRange):
        induced_substructure(s, {0, 7})


def test_qf_type_examples():
    c3 = chain(3)
    t = qf_type(c3, (0, 0))
    assert t.equality_pattern == ((0, 1),)
    assert qf_type(c3, (0, 2)) == qf_type(c3, (1, 2))
    s = convex([2, 1])
    assert qf_type(s, (0, 1)) != qf_type(s, (0, 2))
    with pytest.raises(OutOfRange):
        qf_type(c3, (0, 3))


def test_qf_type_json():
    s = convex([2, 1])
    t = qf_type(s, (0, 2))
    d = t.to_dict()
    assert d == {"arity": 2, "equal": False,
                 "relations": {"<": [[0, 1]], "E": [[0, 0], [1, 1]]}}
    assert QfType.from_dict(d, OG) == t


def test_embedding_counts():
    assert len(enumerate_embeddings(chain(2), chain(3))) == 3
    k2 = graph(2, [(0, 1)])
    k3 = graph(3, [(0, 1), (0, 2), (1, 2)])
    assert len(enumerate_embeddings(k2, k3)) == 6
    assert [e.map for e in enumerate_embeddings(chain(4), chain(4))] == [(0, 1, 2, 3)]
    with pytest.raises(SignatureMismatch):
        enumerate_embeddings(chain(2), k3)


def test_embeddings_lex_order():
    maps = hom_images(graph(2, []), graph(4, [(0, 1)]))
    assert maps == sorted(maps)
    assert len(maps) == 10


def test_automorphism_examples():
    assert len(automorphisms(graph(2, []))) == 2
    assert len(automorphisms(chain(5))) == 1
    c4 = graph(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
    auts = automorphisms(c4)
    assert len(auts) == 8 == len(oracles.homs(c4, c4))
    assert auts[0].map == (0, 1, 2, 3)


def test_canonical_examples():
    assert canonical_form(chain(3)) != canonical_form(Structure(LO, 3))
    codes = {canonical_form(convex(c)) for c in ([3], [2, 1], [1, 2], [1, 1, 1])}
    assert len(codes) == 4
    assert canonical_form(graph(0, [])) < canonical_form(graph(2, [(0, 1)]))


def test_canonical_relabel_is_isomorphic():
    s = graph(4, [(0, 3), (3, 2)])
    r = canonical_relabel(s)
    assert canonical_form(r) == canonical_form(s)
    assert oracles.brute_iso(r, s)


def test_canonical_form_agrees_with_brute_force_small():
    structs = [s for n in range(4) for s in oracles.all_structures(GR, n)]
    by_code = {}
    for s in structs:
        by_code.setdefault(canonical_form(s), set()).add(oracles.brute_code(s))
    assert all(len(v) == 1 for v in by_code.values())
    # 1, 2, 10, 104 directed graphs with loops on 0..3 vertices (up to iso)
    assert len(by_code) == len({oracles.brute_code(s) for s in structs}) == 1 + 2 + 10 + 104


@settings(max_examples=150, deadline=None)
@given(structures(max_size=5), st.randoms())
def test_canonical_form_invariant(s, rnd):
    perm = list(range(s.size))
    rnd.shuffle(perm)
    t = relabel(s, perm)
    assert canonical_form(s) == canonical_form(t)
    assert is_isomorphic(s, t)


@settings(max_examples=120, deadline=None)
@given(structures(max_size=5), structures(max_size=5))
def test_canonical_form_matches_brute_force(s, t):
    assert (canonical_form(s) == canonical_form(t)) == oracles.brute_iso(s, t)
    assert is_isomorphic(s, t) == oracles.brute_iso(s, t)


@settings(max_examples=80, deadline=None)
@given(structures(max_size=4), structures(max_size=6))
def test_embedding_count_matches_brute_force(a, c):
    assert hom_images(a, c) == oracles.homs(a, c)


@settings(max_examples=60, deadline=None)
@given(structures(GR, max_size=3), structures(GR, max_size=4), structures(GR, max_size=5))
def test_composition_of_embeddings(a, b, c):
    for f in enumerate_embeddings(a, b)[:4]:
        for g in enumerate_embeddings(b, c)[:4]:
            h = g.compose(f)
            assert h.is_valid()
            for tup in itertools.product(range(a.size), repeat=2):
                assert qf_type(a, tup) == qf_type(c, h.apply(tup))


@settings(max_examples=60, deadline=None)
@given(structures(max_size=5))
def test_automorphisms_form_a_group(s):
    auts = automorphisms(s)
    maps = {e.map for e in auts}
    for f in auts:
        inv = [0] * s.size
        for i, x in enumerate(f.map):
            inv[x] = i
        assert tuple(inv) in maps
        for g in auts:
            assert g.compose(f).map in maps


def test_embedding_validity_detects_bad_maps():
    assert not Embedding(chain(2), chain(3), (1, 0)).is_valid()
    assert not Embedding(chain(2), chain(3), (1, 1)).is_valid()
    assert Embedding(chain(2), chain(3), (0, 2)).is_valid()


def test_constants_are_respected():
    sig = Signature((("<", 2),), ("0",))
    a = Structure(sig, 2, {"<": [(0, 1)]}, {"0": 0})
    c = Structure(sig, 3, {"<": [(0, 1), (0, 2), (1, 2)]}, {"0": 1})
    assert hom_images(a, c) == [(1, 2)]
    assert hom_images(a, c) == oracles.homs(a, c)


def test_pickle_round_trip():
    import pickle

    s = convex([1, 2])
    assert pickle.loads(pickle.dumps(s)) == s
    json.dumps(s.to_dict())
