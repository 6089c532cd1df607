"""Class specifications and bounded checks of the amalgamation-class axioms.

Every verdict is "up to a size bound": PASS means no counterexample among the
catalog models of the stated size, FAIL carries a certificate that replays.
"""
from __future__ import annotations

import itertools
import random
import warnings
from dataclasses import dataclass, field
from typing import Any

from rwb.core import (
    QfType,
    Signature,
    Structure,
    canonical_form,
    canonical_relabel,
    embeds,
    hom_images,
    induced_substructure,
    qf_type,
)
from rwb.errors import ApFailure, FormatError, ResourceLimit, SignatureMismatch, UnknownClass

DEFAULT_MAX_MODELS = 200_000


@dataclass(frozen=True)
class ClassSpec:
    """A class of finite structures: forbidden induced substructures plus an
    optional named semantic checker (built-in names only)."""

    name: str
    signature: Signature
    forbidden: tuple = ()
    checker: str | None = None
    notes: str = ""
    _memo: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "forbidden", tuple(self.forbidden))
        for f in self.forbidden:
            if f.signature != self.signature:
                raise SignatureMismatch(f"forbidden structure has signature {f.signature}")
        if self.checker is not None:
            get_checker(self.checker)

    @property
    def semantic(self):
        return get_checker(self.checker) if self.checker else None

    @property
    def locality(self) -> int:
        """Non-constant elements a local check must look at."""
        m = max((f.size - len(f.constant_elements) for f in self.forbidden), default=0)
        if self.checker:
            m = max(m, self.semantic.locality)
        return m

    @property
    def base_relations(self) -> tuple:
        if self.checker:
            return self.semantic.base_relations
        return self.signature.names

    def to_dict(self):
        return {
            "name": self.name,
            "signature": self.signature.to_dict(),
            "forbidden": [f.to_dict() for f in self.forbidden],
            "checker": self.checker,
            "notes": self.notes,
        }

    @classmethod
    def from_dict(cls, d):
        try:
            sig = Signature.from_dict(d["signature"])
            forb = [Structure.from_dict(x) for x in d["forbidden"]]
            checker = d["checker"]
            name = d["name"]
            notes = d.get("notes", "")
        except (KeyError, TypeError) as exc:
            raise FormatError(f"bad class spec: {exc}") from exc
        if checker is not None:
            try:
                get_checker(checker)
            except UnknownClass as exc:
                raise FormatError(str(exc)) from exc
        try:
            return cls(name, sig, tuple(forb), checker, notes)
        except SignatureMismatch as exc:
            raise FormatError(str(exc)) from exc


def get_checker(name):
    from rwb.catalog import CHECKERS

    try:
        return CHECKERS[name]
    except KeyError:
        raise UnknownClass(f"unknown checker {name!r}; known: {sorted(CHECKERS)}") from None


def is_member(spec: ClassSpec, s: Structure) -> bool:
    if s.signature != spec.signature:
        raise SignatureMismatch(f"{s.signature} vs {spec.signature}")
    memo = spec._memo.setdefault("member", {})
    hit = memo.get(s)
    if hit is None:
        hit = all(not embeds(f, s) for f in spec.forbidden)
        if hit and spec.checker:
            hit = spec.semantic.global_ok(s)
        memo[s] = hit
    return hit


# ---------------------------------------------------------------------------
# completion search: fill in unknown atoms of a partial structure


class _Completion:
    """Backtracking over unknown base atoms of a structure on ``0..size-1``.

    ``known[name]`` maps tuples to booleans.  Atoms are grouped by their set of
    non-constant elements and those sets are visited in colex order, so that
    after a set's atoms are fixed every subset of it is fixed too and the
    local membership check of that set can run immediately.  ``prevalid``
    names element sets already known to induce a member.
    """

    def __init__(self, spec: ClassSpec, size: int, cmap: dict, known: dict, prevalid):
        self.spec = spec
        self.sig = spec.signature
        self.size = size
        self.cmap = dict(cmap)
        self.consts = tuple(sorted(set(self.cmap.values())))
        self.val = {n: dict(known.get(n, {})) for n in self.sig.names}
        base = set(spec.base_relations)
        self.derived = [n for n in self.sig.names if n not in base]
        self.locality = spec.locality
        cset = set(self.consts)
        free_elems = [x for x in range(size) if x not in cset]
        max_ar = max((self.sig.arity(n) for n in base), default=1)
        top = max(self.locality, max_ar)
        levels = []
        subsets = [()]
        for r in range(1, min(top, len(free_elems)) + 1):
            subsets.extend(itertools.combinations(free_elems, r))
        subsets.sort(key=lambda t: tuple(reversed(t)))
        for t in subsets:
            if prevalid(t):
                continue
            elems = tuple(sorted(set(t) | cset))
            atoms = []
            tset = set(t)
            for name in self.sig.names:
                if name not in base:
                    continue
                table = self.val[name]
                for tup in itertools.product(elems, repeat=self.sig.arity(name)):
                    if set(tup) - cset == tset and tup not in table:
                        atoms.append((name, tup))
            check = len(t) <= self.locality
            if atoms or check:
                levels.append((elems, atoms, check))
        self.levels = levels

    def _local_ok(self, elems):
        spec = self.spec
        key_parts = []
        for name in spec.base_relations:
            table = self.val[name]
            key_parts.append(tuple(table.get(t, False) for t in
                                   itertools.product(elems, repeat=self.sig.arity(name))))
        cpos = tuple(elems.index(v) for v in (self.cmap[c] for c in self.sig.constants))
        key = (len(elems), tuple(key_parts), cpos)
        memo = spec._memo.setdefault("local", {})
        hit = memo.get(key)
        if hit is None:
            idx = {x: i for i, x in enumerate(elems)}
            tables = {}
            for name in spec.base_relations:
                table = self.val[name]
                tables[name] = [tuple(idx[x] for x in t) for t in
                                itertools.product(elems, repeat=self.sig.arity(name))
                                if table.get(t, False)]
            small = Structure(self.sig, len(elems), tables,
                              {c: idx[self.cmap[c]] for c in self.sig.constants})
            if spec.checker:
                hit = (all(not embeds(f, small) for f in spec.forbidden)
                       and spec.semantic.local_ok(small))
            else:
                hit = is_member(spec, small)
            memo[key] = hit
        return hit

    def _leaf(self):
        tables = {n: [t for t, v in self.val[n].items() if v] for n in self.sig.names}
        s = Structure(self.sig, self.size, tables, self.cmap)
        if not self.spec.checker:
            return s
        checker = self.spec.semantic
        if self.derived:
            derived = checker.derive(s)
            for name in self.derived:
                rows = derived[name]
                for t, v in self.val[name].items():
                    if (t in rows) != v:
                        return None
                tables[name] = rows
            s = Structure(self.sig, self.size, tables, self.cmap)
        if all(not embeds(f, s) for f in self.spec.forbidden) and checker.global_ok(s):
            return s
        return None

    def run(self):
        """Yield every completed member structure."""
        levels = self.levels
        depth = len(levels)
        cnt = [-1] * (depth + 1)
        i = 0
        while i >= 0:
            if i == depth:
                leaf = self._leaf()
                if leaf is not None:
                    yield leaf
                i -= 1
                continue
            elems, atoms, check = levels[i]
            cnt[i] += 1
            if cnt[i] >= (1 << len(atoms)):
                for name, tup in atoms:
                    self.val[name].pop(tup, None)
                cnt[i] = -1
                i -= 1
                continue
            bits = cnt[i]
            for b, (name, tup) in enumerate(atoms):
                self.val[name][tup] = bool(bits >> b & 1)
            if check and not self._local_ok(elems):
                continue
            i += 1
            cnt[i] = -1


def _known_atoms(s: Structure, relabel=None):
    """All atoms (true and false) of ``s`` as tuple -> bool, optionally renamed."""
    out = {}
    for name, arity in s.signature.relations:
        rows = s.table(name)
        d = {}
        for t in itertools.product(range(s.size), repeat=arity):
            key = t if relabel is None else tuple(relabel[x] for x in t)
            d[key] = t in rows
        out[name] = d
    return out


def one_point_extensions(spec: ClassSpec, m: Structure):
    """Members on ``m.size + 1`` elements whose restriction to ``0..size-1`` is ``m``."""
    n = m.size
    comp = _Completion(spec, n + 1, m.constant_map, _known_atoms(m),
                       lambda t: all(x < n for x in t))
    yield from comp.run()


def _constant_bases(spec: ClassSpec):
    """Members whose universe consists of constants only."""
    consts = spec.signature.constants
    if not consts:
        s = Structure(spec.signature, 0)
        return [s] if is_member(spec, s) else []
    out = []
    for blocks in _set_partitions(list(consts)):
        cmap = {c: i for i, b in enumerate(blocks) for c in b}
        comp = _Completion(spec, len(blocks), cmap, {}, lambda t: False)
        out.extend(comp.run())
    return out


def _set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


# ---------------------------------------------------------------------------
# model catalogs


@dataclass
class ModelCatalog:
    spec: ClassSpec
    max_size: int
    models: dict  # size -> list of canonical representatives, sorted by code

    def all(self, up_to: int | None = None):
        top = self.max_size if up_to is None else min(up_to, self.max_size)
        return [m for k in sorted(self.models) if k <= top for m in self.models[k]]

    def of_size(self, k):
        return list(self.models.get(k, []))

    def counts(self):
        return {k: len(v) for k, v in sorted(self.models.items())}


def _children(args):
    spec, parent = args
    out = {}
    for child in one_point_extensions(spec, parent):
        code = canonical_form(child)
        if code not in out:
            out[code] = child
    return [(code, canonical_relabel(s)) for code, s in out.items()]


def _parallel_map(fn, items, workers):
    from rwb._parallel import pmap

    return pmap(fn, items, workers)


def enumerate_models(spec: ClassSpec, n: int, workers: int = 1,
                     max_models: int = DEFAULT_MAX_MODELS) -> ModelCatalog:
    """All members of size <= n up to isomorphism, by one-point augmentation.

    Each level extends every model of the previous level by one element and
    keeps one canonical representative per isomorphism class.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    cache = spec._memo.setdefault("catalog", {})
    if cache.get("max_size", -1) >= n:
        full = cache["catalog"]
        return ModelCatalog(spec, n, {k: v for k, v in full.models.items() if k <= n})
    if "catalog" in cache:
        models = dict(cache["catalog"].models)
        start = cache["max_size"]
    else:
        bases = {}
        for b in _constant_bases(spec):
            bases.setdefault(b.size, {})[canonical_form(b)] = canonical_relabel(b)
        models = {k: [v[c] for c in sorted(v)] for k, v in bases.items()}
        start = max(models, default=-1)
        if start < 0:
            start = 0
            models[0] = []
    total = sum(len(v) for v in models.values())
    for k in range(start, n):
        found = {}
        for batch in _parallel_map(_children, [(spec, p) for p in models.get(k, [])], workers):
            for code, s in batch:
                found.setdefault(code, s)
        total += len(found)
        if total > max_models:
            raise ResourceLimit(f"more than {max_models} models up to size {k + 1}",
                                {"models": total, "size": k + 1})
        models[k + 1] = [found[c] for c in sorted(found)]
    cat = ModelCatalog(spec, n, {k: v for k, v in models.items() if k <= n})
    cache["catalog"] = ModelCatalog(spec, n, models)
    cache["max_size"] = n
    return cat


# ---------------------------------------------------------------------------
# verdicts and certificates


@dataclass
class Verdict:
    check: str
    passed: bool
    bound: int
    certificate: Any = None
    stats: dict = field(default_factory=dict)

    def __bool__(self):
        return self.passed


@dataclass
class HpCertificate:
    model: Structure
    subset: tuple


@dataclass
class JepCertificate:
    left: Structure
    right: Structure


@dataclass
class ApCertificate:
    """A span ``A1 <- A0 -> A2`` with no amalgam within ``bound`` elements."""

    base: Structure
    left: Structure
    right: Structure
    left_map: tuple
    right_map: tuple
    bound: int


@dataclass
class ExtensionCertificate:
    demand: Structure
    base_subset: tuple
    embedding: tuple


def _subsets(elems, proper=False):
    top = len(elems) - (1 if proper else 0)
    for r in range(top + 1):
        yield from itertools.combinations(elems, r)


def hp_witness(spec: ClassSpec, b: Structure, subset) -> tuple | None:
    """Smallest (then lex-least) member-inducing superset of ``subset`` in ``b``."""
    consts = b.constant_elements
    core = set(subset) | consts
    rest = [x for x in range(b.size) if x not in core]
    for extra in _subsets(rest):
        cand = tuple(sorted(core | set(extra)))
        if is_member(spec, induced_substructure(b, cand)):
            return cand
    return None


def check_hp(spec: ClassSpec, n: int, workers: int = 1) -> Verdict:
    """Every subset of every model up to n lies in a member-inducing subset."""
    cat = enumerate_models(spec, n, workers)
    checked = 0
    for b in cat.all():
        free = [x for x in range(b.size) if x not in b.constant_elements]
        for sub in _subsets(free):
            checked += 1
            if hp_witness(spec, b, sub) is None:
                return Verdict("hp", False, n, HpCertificate(b, sub), {"subsets": checked})
    return Verdict("hp", True, n, None, {"subsets": checked})


# -- amalgamation ------------------------------------------------------------


def _partial_injections(q, p):
    """Partial injective maps from range(q) to range(p), fewest pairs first."""
    for j in range(min(q, p) + 1):
        for dom in itertools.combinations(range(q), j):
            for img in itertools.permutations(range(p), j):
                yield dict(zip(dom, img))


def amalgams(spec: ClassSpec, a0: Structure, a1: Structure, f1, a2: Structure, f2,
             max_size: int | None = None):
    """Yield ``(B, g1, g2)`` with ``g1 ∘ f1 = g2 ∘ f2``; ``g1`` is the identity on A1.

    Candidates run over all identifications of A2's new points with A1's new
    points (fewest identifications first) and all completions of the cross
    atoms that keep B in the class.
    """
    n1 = a1.size
    p_elems = [x for x in range(n1) if x not in set(f1)]
    q_elems = [y for y in range(a2.size) if y not in set(f2)]
    if max_size is None:
        max_size = n1 + len(q_elems)
    a1_known = _known_atoms(a1)
    for ident in _partial_injections(len(q_elems), len(p_elems)):
        size = n1 + len(q_elems) - len(ident)
        if size > max_size:
            continue
        g2 = [None] * a2.size
        for x0, y in enumerate(f2):
            g2[y] = f1[x0]
        nxt = n1
        for qi, y in enumerate(q_elems):
            if qi in ident:
                g2[y] = p_elems[ident[qi]]
            else:
                g2[y] = nxt
                nxt += 1
        known = {name: dict(d) for name, d in a1_known.items()}
        ok = True
        for name, d in _known_atoms(a2, g2).items():
            tgt = known[name]
            for t, v in d.items():
                old = tgt.get(t)
                if old is None:
                    tgt[t] = v
                elif old != v:
                    ok = False
                    break
            if not ok:
                break
        if not ok:
            continue
        side2 = set(g2)

        def prevalid(t, side2=side2):
            return all(x < n1 for x in t) or all(x in side2 for x in t)

        comp = _Completion(spec, size, a1.constant_map, known, prevalid)
        for b in comp.run():
            yield b, tuple(range(n1)), tuple(g2)


def amalgamate(spec, a0, a1, f1, a2, f2, max_size=None):
    for hit in amalgams(spec, a0, a1, f1, a2, f2, max_size):
        return hit
    return None


def _extensions_of(a0: Structure, models):
    out = []
    for a1 in models:
        if a1.size <= a0.size:
            continue
        for img in hom_images(a0, a1):
            out.append((a1, img))
    return out


def check_ap(spec: ClassSpec, n: int, workers: int = 1) -> Verdict:
    """Amalgamation for every span whose free amalgam has at most n elements.

    Spans are visited by free-amalgam size, then base, then extension pairs;
    the first span without an amalgam of at most that size is the certificate.
    """
    cat = enumerate_models(spec, n, workers)
    models = cat.all()
    exts = {a0: _extensions_of(a0, [m for m in models if m.size < n]) for a0 in models
            if a0.size <= n - 2}
    spans = 0
    for total in range(2, n + 1):
        for a0 in models:
            if a0 not in exts:
                continue
            k = a0.size
            lst = exts[a0]
            for i, (a1, f1) in enumerate(lst):
                for a2, f2 in lst[:i + 1]:
                    if a1.size + a2.size - k != total:
                        continue
                    spans += 1
                    if amalgamate(spec, a0, a1, f1, a2, f2, total) is None:
                        cert = ApCertificate(a0, a1, a2, f1, f2, total)
                        return Verdict("ap", False, n, cert, {"spans": spans})
    return Verdict("ap", True, n, None, {"spans": spans})


def replay_ap(spec: ClassSpec, cert: ApCertificate) -> bool:
    """True iff the span in ``cert`` still has no amalgam within its bound."""
    return amalgamate(spec, cert.base, cert.left, cert.left_map, cert.right,
                      cert.right_map, cert.bound) is None


# -- joint embedding ---------------------------------------------------------


def _constant_core(s: Structure):
    elems = tuple(sorted(s.constant_elements))
    return induced_substructure(s, elems), elems


def joint_embedding(spec: ClassSpec, a1: Structure, a2: Structure, max_size=None):
    core1, f1 = _constant_core(a1)
    core2, _ = _constant_core(a2)
    if core1 != core2:
        return None
    cm2 = a2.constant_map
    inv = {v: c for c, v in core1.constant_map.items()}
    f2 = tuple(cm2[inv[x]] for x in range(core1.size))
    if max_size is None:
        max_size = a1.size + a2.size - core1.size
    return amalgamate(spec, core1, a1, f1, a2, f2, max_size)


def _jep_rules(sig: Signature):
    """Cross-atom rules for side-uniform joint embeddings, all-false first."""
    pats = []
    for name, arity in sig.relations:
        for sides in itertools.product((1, 2), repeat=arity):
            if 1 in sides and 2 in sides:
                pats.append((name, sides))
    if len(pats) > 8:
        return [frozenset()]
    return [frozenset(p for b, p in enumerate(pats) if mask >> b & 1)
            for mask in range(1 << len(pats))]


def _glue(sig, x: Structure, y: Structure, rule):
    i, j = x.size, y.size
    side = [1] * i + [2] * j
    tables = {}
    for name, arity in sig.relations:
        rows = set(x.table(name))
        rows.update(tuple(v + i for v in t) for t in y.table(name))
        for t in itertools.product(range(i + j), repeat=arity):
            sides = tuple(side[v] for v in t)
            if 1 in sides and 2 in sides and (name, sides) in rule:
                rows.add(t)
        tables[name] = rows
    return Structure(sig, i + j, tables)


def _profile(spec, s: Structure, m):
    out = set()
    for r in range(1, min(m - 1, s.size) + 1):
        for sub in itertools.combinations(range(s.size), r):
            out.add(induced_substructure(s, sub))
    return frozenset(out)


def _fast_joint(spec, prof1, prof2, m, rules):
    for rule in rules:
        ok = True
        for x in prof1:
            for y in prof2:
                if x.size + y.size > m:
                    continue
                if not is_member(spec, _glue(spec.signature, x, y, rule)):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return True
    return False


def check_jep(spec: ClassSpec, n: int, target: int | None = None,
              workers: int = 1) -> Verdict:
    """Every pair of models up to n jointly embeds into a member.

    ``target`` caps the joint model's size (default ``2n``).  For classes
    given by forbidden substructures alone, pairs whose small-substructure
    profiles admit a side-uniform disjoint union are settled without search.
    """
    cat = enumerate_models(spec, n, workers)
    models = cat.all()
    target = 2 * n if target is None else target
    fast = not spec.checker and not spec.signature.constants
    m = spec.locality
    group = {}
    if fast:
        profs = {}
        for s in models:
            p = _profile(spec, s, m)
            group[s] = profs.setdefault(p, len(profs))
        plist = sorted(profs, key=profs.get)
        rules = _jep_rules(spec.signature)
        verdicts = {}
    pairs = searched = 0
    for i, a1 in enumerate(models):
        for a2 in models[:i + 1]:
            pairs += 1
            if fast:
                g = (group[a1], group[a2])
                if g not in verdicts:
                    verdicts[g] = _fast_joint(spec, plist[g[0]], plist[g[1]], m, rules)
                if verdicts[g]:
                    continue
            searched += 1
            if joint_embedding(spec, a1, a2, target) is None:
                return Verdict("jep", False, n, JepCertificate(a1, a2),
                               {"pairs": pairs, "searched": searched, "target": target})
    return Verdict("jep", True, n, None, {"pairs": pairs, "searched": searched,
                                          "target": target})


# ---------------------------------------------------------------------------
# atomic types


def type_census(spec: ClassSpec, k: int, n: int, workers: int = 1) -> list[QfType]:
    """Sorted atomic types of k-tuples realized in some model up to size n."""
    found = set()
    for s in enumerate_models(spec, n, workers).all():
        for tup in itertools.product(range(s.size), repeat=k):
            found.add(qf_type(s, tup))
    return sorted(found)


# ---------------------------------------------------------------------------
# extension property and generic growth


def _demands(spec: ClassSpec, m: int):
    """(B, B0 subset, induced B0) for members B up to size m and proper B0."""
    for b in enumerate_models(spec, m).all():
        free = [x for x in range(b.size) if x not in b.constant_elements]
        for sub in _subsets(free, proper=True):
            base = tuple(sorted(set(sub) | b.constant_elements))
            if len(base) == b.size:
                continue
            yield b, base, induced_substructure(b, base)


def _extends(b, base, e, target):
    fixed = {x: e[i] for i, x in enumerate(base)}
    return bool(hom_images(b, target, fixed, 1))


def check_extension_property(spec: ClassSpec, model: Structure, m: int) -> Verdict:
    """Each embedding of a proper substructure of a member of size <= m into
    ``model`` extends to the whole member."""
    count = 0
    for b, base, b0 in _demands(spec, m):
        for e in hom_images(b0, model):
            count += 1
            if not _extends(b, base, e, model):
                return Verdict("extension", False, m, ExtensionCertificate(b, base, e),
                               {"demands": count})
    return Verdict("extension", True, m, None, {"demands": count})


def _demand_code(b: Structure, base):
    sig = Signature(b.signature.relations + (("__base__", 1),), b.signature.constants)
    tables = dict(b.tables)
    tables["__base__"] = [(x,) for x in base]
    return canonical_form(Structure(sig, b.size, tables, b.constant_map))


def realized_demands(spec: ClassSpec, model: Structure, cap: int) -> int:
    """Number of (B, B0, e) demands with |B| <= cap that ``model`` realizes."""
    return sum(1 for b, base, b0 in _demands(spec, cap)
               for e in hom_images(b0, model) if _extends(b, base, e, model))


def grow_generic(spec: ClassSpec, budget: int, seed: int = 0, cap: int = 2,
                 precheck: bool = True, workers: int = 1, stages: list | None = None) -> Structure:
    """Grow a member by amalgamating in unrealized extension demands.

    Demands wait in a queue keyed by (stage first seen, demand code, seeded
    random tie-break) and are served first-in first-out; growth stops when the
    next amalgam would exceed ``budget`` elements or nothing is left to serve.
    """
    if precheck:
        for check in (check_ap, check_jep):
            v = check(spec, 3)
            if not v.passed:
                warnings.warn(f"{spec.name}: {v.check} fails at bound 3; growth may stall")
    rng = random.Random(seed)
    cat = enumerate_models(spec, max(cap, 1), workers)
    start = cat.all()[0]
    if start.size > budget:
        raise ResourceLimit(f"smallest member has {start.size} > {budget} elements")
    model = start
    demands = list(_demands(spec, cap))
    codes = [_demand_code(b, base) for b, base, _ in demands]
    queue = []
    seen = set()
    stage = 0
    while True:
        if stages is not None:
            stages.append(model)
        for di, (b, base, b0) in enumerate(demands):
            for e in hom_images(b0, model):
                key = (di, e)
                if key in seen or _extends(b, base, e, model):
                    continue
                seen.add(key)
                queue.append(((stage, codes[di], rng.random()), di, e))
        queue.sort(key=lambda item: item[0])
        while queue:
            _, di, e = queue.pop(0)
            b, base, b0 = demands[di]
            if not _extends(b, base, e, model):
                break
        else:
            return model
        hit = amalgamate(spec, b0, model, e, b, base, budget)
        if hit is None:
            if model.size + b.size - len(base) > budget:
                return model
            raise ApFailure(f"no amalgam for demand {b} over {base} within {budget}")
        model = hit[0]
        stage += 1
