"""Partition arrows over copy hypergraphs, rigidity, and indiscernible extraction."""
from __future__ import annotations

import itertools
import os
from array import array
from dataclasses import dataclass, field

from rwb import kernels
from rwb.core import Embedding, Structure, _same_signature, automorphisms, hom_images, qf_type
from rwb.errors import EmptyHom, FormatError, NotInvolution, ResourceLimit
from rwb.fraisse import ClassSpec, Verdict, enumerate_models

DEFAULT_BUDGET = 10**7
SPLIT_DEPTH = 2


def default_budget() -> int:
    env = os.environ.get("RWB_BUDGET")
    return int(env) if env else DEFAULT_BUDGET


@dataclass
class CopyHypergraph:
    """Vertices are the images of embeddings A -> C in lex order; each edge
    lists the vertices landing inside one copy of B."""

    A: Structure
    B: Structure
    C: Structure
    vertices: list
    edges: list

    @property
    def embeddings(self):
        return [Embedding(self.A, self.C, v) for v in self.vertices]

    def degrees(self):
        deg = [0] * len(self.vertices)
        for e in self.edges:
            for v in e:
                deg[v] += 1
        return deg


def copy_hypergraph(A: Structure, B: Structure, C: Structure) -> CopyHypergraph:
    _same_signature(A, B)
    _same_signature(B, C)
    inner = hom_images(A, B)
    if not inner:
        raise EmptyHom("A does not embed into B; the arrow is vacuous")
    verts = hom_images(A, C)
    index = {v: i for i, v in enumerate(verts)}
    edges, seen = [], set()
    for outer in hom_images(B, C):
        edge = tuple(sorted({index[tuple(outer[x] for x in f)] for f in inner}))
        if edge not in seen:
            seen.add(edge)
            edges.append(edge)
    return CopyHypergraph(A, B, C, list(verts), edges)


# ---------------------------------------------------------------------------
# colorings and palettes


@dataclass
class Coloring:
    """A coloring of embeddings A -> C keyed by image sequence."""

    A_size: int
    k: int
    assignments: dict

    def color(self, image):
        return self.assignments[tuple(image)]

    def to_dict(self):
        return {"A_size": self.A_size, "k": self.k,
                "assignments": [{"image": list(img), "color": c}
                                for img, c in sorted(self.assignments.items())]}

    @classmethod
    def from_dict(cls, d):
        try:
            return cls(int(d["A_size"]), int(d["k"]),
                       {tuple(int(x) for x in a["image"]): int(a["color"])
                        for a in d["assignments"]})
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"bad coloring: {exc}") from exc


def verify_coloring(coloring: Coloring, hg: CopyHypergraph) -> bool:
    """Total on hom(A, C), colors in range, and no monochromatic copy of B."""
    if coloring.A_size != hg.A.size or set(coloring.assignments) != set(hg.vertices):
        return False
    cols = [coloring.assignments[v] for v in hg.vertices]
    if any(c < 0 or c >= coloring.k for c in cols):
        return False
    return all(len({cols[v] for v in e}) > 1 for e in hg.edges)


@dataclass
class Palette:
    arity: int
    default: int = 0
    colormap: dict = field(default_factory=dict)

    def __call__(self, tup):
        return self.colormap.get(tuple(tup), self.default)

    def to_dict(self):
        return {"arity": self.arity, "default": self.default,
                "colormap": [{"tuple": list(t), "color": c}
                             for t, c in sorted(self.colormap.items())]}

    @classmethod
    def from_dict(cls, d):
        try:
            arity = int(d["arity"])
            cmap = {tuple(int(x) for x in e["tuple"]): e["color"] for e in d["colormap"]}
            default = d.get("default", 0)
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"bad palette: {exc}") from exc
        if any(len(t) != arity for t in cmap):
            raise FormatError("palette tuple of wrong arity")
        return cls(arity, default, cmap)


# ---------------------------------------------------------------------------
# arrow decision


@dataclass
class ArrowVerdict:
    holds: bool
    coloring: Coloring | None
    stats: dict
    hypergraph: CopyHypergraph = field(repr=False, compare=False, default=None)

    def __bool__(self):
        return self.holds


def _plan(hg: CopyHypergraph):
    nv = len(hg.vertices)
    deg = hg.degrees()
    order = sorted(range(nv), key=lambda v: (-deg[v], v))
    edge_ptr = [0]
    for e in hg.edges:
        edge_ptr.append(edge_ptr[-1] + len(e))
    inc = [[] for _ in range(nv)]
    for ei, e in enumerate(hg.edges):
        for v in e:
            inc[v].append(ei)
    inc_ptr, inc_edges = [0], []
    for lst in inc:
        inc_edges.extend(lst)
        inc_ptr.append(len(inc_edges))
    return order, edge_ptr, inc_ptr, inc_edges


def _prefixes(depth, k):
    """Color-normalized assignments of the first ``depth`` positions, lex order."""
    out = [()]
    for _ in range(depth):
        nxt = []
        for p in out:
            top = max(p, default=-1)
            nxt.extend(p + (c,) for c in range(min(k - 1, top + 1) + 1))
        out = nxt
    return out


def _run_prefix(args):
    nv, k, order, edge_ptr, inc_ptr, inc_edges, prefix, budget = args
    return kernels.color_search(nv, k, array("i", order), array("i", edge_ptr),
                                array("i", inc_ptr), array("i", inc_edges),
                                array("i", prefix), budget)


def decide_arrow(C: Structure, B: Structure, A: Structure, k: int,
                 budget: int | None = None, workers: int = 1) -> ArrowVerdict:
    """Decide whether every k-coloring of hom(A, C) is constant on some copy of B.

    Searches for a k-coloring of the copy hypergraph with no monochromatic
    edge; the arrow holds iff none exists.  The search tree is cut into
    subtrees at depth two and the first subtree (in order) holding a
    coloring wins, so certificates and node counts do not depend on
    ``workers``.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    budget = default_budget() if budget is None else budget
    hg = copy_hypergraph(A, B, C)
    nv = len(hg.vertices)
    order, edge_ptr, inc_ptr, inc_edges = _plan(hg)
    prefixes = _prefixes(min(SPLIT_DEPTH, nv), k)
    stats = {"vertices": nv, "edges": len(hg.edges), "subtrees": len(prefixes)}
    base = (nv, k, order, edge_ptr, inc_ptr, inc_edges)

    def finish(results):
        used = 0
        for prefix, (colors, nodes, exhausted) in zip(prefixes, results):
            used += len(prefix) + nodes
            if exhausted or used > budget:
                raise ResourceLimit(f"node budget {budget} exhausted",
                                    {**stats, "nodes": budget})
            if colors is not None:
                return colors, used
        return None, used

    if workers > 1 and len(prefixes) > 1:
        from rwb._parallel import pmap

        results = pmap(_run_prefix, [base + (p, budget) for p in prefixes], workers)
        colors, used = finish(results)
    else:
        results = []
        used = 0
        colors = None
        for p in prefixes:
            r = _run_prefix(base + (p, max(0, budget - used)))
            results.append(r)
            used += len(p) + r[1]
            if r[0] is not None or r[2] or used > budget:
                break
        colors, used = finish(results)
    stats["nodes"] = used
    if colors is None:
        return ArrowVerdict(True, None, stats, hg)
    col = Coloring(A.size, k, {v: colors[i] for i, v in enumerate(hg.vertices)})
    if not verify_coloring(col, hg):
        raise AssertionError("search produced an invalid coloring")
    return ArrowVerdict(False, col, stats, hg)


@dataclass
class NotFoundUpTo:
    max_size: int

    def __bool__(self):
        return False


def find_witness(spec: ClassSpec, A: Structure, B: Structure, k: int, max_size: int,
                 budget: int | None = None, workers: int = 1):
    """Smallest catalog model C (catalog order) with C -> (B)^A_k."""
    copy_hypergraph(A, B, B)
    for C in enumerate_models(spec, max_size, workers).all():
        if C.size < B.size or not hom_images(B, C, limit=1):
            continue
        if decide_arrow(C, B, A, k, budget, workers).holds:
            return C
    return NotFoundUpTo(max_size)


# ---------------------------------------------------------------------------
# rigidity


@dataclass
class RigidityCertificate:
    model: Structure
    sigma: Embedding


def _is_involution(sigma: Embedding) -> bool:
    m = sigma.map
    return any(m[x] != x for x in range(len(m))) and all(m[m[x]] == x for x in range(len(m)))


def check_rigidity(spec: ClassSpec, n: int, workers: int = 1) -> Verdict:
    """Every catalog model up to n has only the identity automorphism.

    A failure reports the first non-rigid model together with an involution
    when the group has one (otherwise its first non-identity element).
    """
    for m in enumerate_models(spec, n, workers).all():
        auts = automorphisms(m)
        if len(auts) > 1:
            inv = [s for s in auts[1:] if _is_involution(s)]
            sigma = inv[0] if inv else auts[1]
            return Verdict("rigidity", False, n, RigidityCertificate(m, sigma),
                           {"group_order": len(auts)})
    return Verdict("rigidity", True, n)


def nonrigid_bad_coloring(A: Structure, sigma: Embedding, C: Structure) -> Coloring:
    """2-coloring of hom(A, C) with h(e∘sigma) != h(e) for every e."""
    if sigma.source != A or sigma.target != A or not sigma.is_valid():
        raise NotInvolution("sigma is not an automorphism of A")
    if not _is_involution(sigma):
        raise NotInvolution("sigma must be a non-identity automorphism of order 2")
    out = {}
    for img in hom_images(A, C):
        partner = tuple(img[x] for x in sigma.map)
        out[img] = 0 if img < partner else 1
    return Coloring(A.size, 2, out)


# ---------------------------------------------------------------------------
# indiscernibles


def _type_classes(A: Structure, r: int):
    groups = {}
    for t in itertools.product(range(A.size), repeat=r):
        groups.setdefault(qf_type(A, t), []).append(t)
    return [groups[p] for p in sorted(groups)]


def _uniform(g, palette, tuples):
    first = palette(tuple(g[x] for x in tuples[0]))
    return all(palette(tuple(g[x] for x in t)) == first for t in tuples[1:])


def extract_indiscernible(C: Structure, A: Structure, palette: Palette,
                          iterated: bool = False) -> Embedding | None:
    """First embedding g: A -> C (lex order) under which palette colors of
    r-tuples depend only on their atomic type in A.

    With ``iterated`` the candidate set is filtered one type class at a
    time; the answer is the same.
    """
    _same_signature(A, C)
    r = palette.arity
    if r > A.size:
        raise ValueError("palette arity exceeds |A|")
    classes = _type_classes(A, r)
    cands = hom_images(A, C)
    if iterated:
        for tuples in classes:
            cands = [g for g in cands if _uniform(g, palette, tuples)]
        return Embedding(A, C, cands[0]) if cands else None
    for g in cands:
        if all(_uniform(g, palette, tuples) for tuples in classes):
            return Embedding(A, C, g)
    return None
