"""Finite relational structures, atomic types, embeddings and isomorphism.

Embeddings here are induced-substructure embeddings: injective maps that
preserve and reflect every relation and send constants to constants.
"""
from __future__ import annotations

import itertools
import json
from array import array
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Mapping, Sequence

from rwb import kernels
from rwb.errors import FormatError, MissingConstant, OutOfRange, SignatureMismatch

CanonicalCode = bytes


@dataclass(frozen=True)
class Signature:
    relations: tuple  # of (name, arity)
    constants: tuple = ()

    def __post_init__(self):
        rels = tuple((str(n), int(a)) for n, a in self.relations)
        consts = tuple(str(c) for c in self.constants)
        object.__setattr__(self, "relations", rels)
        object.__setattr__(self, "constants", consts)
        names = [n for n, _ in rels] + list(consts)
        if any(not n for n in names):
            raise ValueError("relation and constant names must be nonempty")
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate symbol in signature: {names}")
        for n, a in rels:
            if a < 1:
                raise ValueError(f"relation {n!r} has arity {a} < 1")

    @property
    def names(self):
        return tuple(n for n, _ in self.relations)

    @cached_property
    def _arity(self):
        return dict(self.relations)

    def arity(self, name):
        return self._arity[name]

    @property
    def max_arity(self):
        return max((a for _, a in self.relations), default=1)

    def to_dict(self):
        return {
            "relations": [{"name": n, "arity": a} for n, a in self.relations],
            "constants": list(self.constants),
        }

    @classmethod
    def from_dict(cls, d):
        try:
            rels = [(r["name"], r["arity"]) for r in d["relations"]]
            return cls(tuple(rels), tuple(d["constants"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"bad signature: {exc}") from exc


class Structure:
    """A finite structure on the universe ``0..size-1``.

    Immutable after construction.  ``tables`` maps each relation name to a set
    of tuples and ``constant_map`` maps each constant name to an element.
    """

    __slots__ = ("signature", "size", "_tables", "_constants", "__dict__")

    def __init__(self, signature: Signature, size: int,
                 tables: Mapping[str, Iterable[Sequence[int]]] | None = None,
                 constant_map: Mapping[str, int] | None = None):
        tables = dict(tables or {})
        constant_map = dict(constant_map or {})
        if size < 0:
            raise ValueError("size must be >= 0")
        unknown = set(tables) - set(signature.names)
        if unknown:
            raise SignatureMismatch(f"tables for unknown relations {sorted(unknown)}")
        built = []
        for name, arity in signature.relations:
            rows = frozenset(tuple(int(x) for x in t) for t in tables.get(name, ()))
            for t in rows:
                if len(t) != arity:
                    raise ValueError(f"tuple {t} has wrong arity for {name!r}")
                if any(x < 0 or x >= size for x in t):
                    raise OutOfRange(f"tuple {t} of {name!r} leaves universe 0..{size - 1}")
            built.append(rows)
        if set(constant_map) != set(signature.constants):
            raise MissingConstant(
                f"constant map keys {sorted(constant_map)} != {list(signature.constants)}")
        consts = []
        for c in signature.constants:
            v = int(constant_map[c])
            if v < 0 or v >= size:
                raise OutOfRange(f"constant {c!r} -> {v} outside universe")
            consts.append(v)
        self.signature = signature
        self.size = size
        self._tables = tuple(built)
        self._constants = tuple(consts)

    # -- access ---------------------------------------------------------

    def table(self, name) -> frozenset:
        return self._tables[self.signature.names.index(name)]

    @property
    def tables(self):
        return dict(zip(self.signature.names, self._tables))

    @property
    def constant_map(self):
        return dict(zip(self.signature.constants, self._constants))

    @property
    def constant_elements(self):
        return frozenset(self._constants)

    def holds(self, name, tup) -> bool:
        return tuple(tup) in self.table(name)

    def __eq__(self, other):
        if not isinstance(other, Structure):
            return NotImplemented
        return (self.size == other.size and self.signature == other.signature
                and self._tables == other._tables and self._constants == other._constants)

    def __hash__(self):
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((self.signature, self.size, self._tables, self._constants))
            self.__dict__["_hash"] = h
        return h

    def __reduce__(self):
        return (Structure, (self.signature, self.size, self.tables, self.constant_map))

    def __repr__(self):
        parts = [f"{n}={sorted(t)}" for n, t in zip(self.signature.names, self._tables)]
        if self._constants:
            parts.append(f"consts={self.constant_map}")
        return f"Structure(n={self.size}, {', '.join(parts)})"

    # -- packed forms used by the kernels ---------------------------------

    @cached_property
    def packed(self):
        """Membership bytes for every relation, concatenated in signature order.

        Tuple ``t`` of relation number ``i`` lives at ``offsets[i] + index(t)``
        where ``index`` is the base-``size`` mixed-radix value of ``t``.
        """
        n = self.size
        chunks = []
        offsets = []
        off = 0
        for (name, arity), rows in zip(self.signature.relations, self._tables):
            buf = bytearray(n ** arity)
            for t in rows:
                idx = 0
                for x in t:
                    idx = idx * n + x
                buf[idx] = 1
            offsets.append(off)
            off += len(buf)
            chunks.append(bytes(buf))
        return b"".join(chunks), tuple(offsets)

    @cached_property
    def point_profiles(self):
        """Per element: diagonal relation bits plus the constants naming it."""
        out = []
        for x in range(self.size):
            diag = tuple((x,) * a in rows for (_, a), rows
                         in zip(self.signature.relations, self._tables))
            names = tuple(c for c, v in zip(self.signature.constants, self._constants) if v == x)
            out.append((diag, names))
        return tuple(out)

    @cached_property
    def embed_plan(self):
        """Check lists for embedding this structure as the source."""
        sig = self.signature
        max_ar = sig.max_arity
        chk_ptr = [0]
        chk_ar, chk_rel, chk_pos, chk_val = [], [], [], []
        for i in range(self.size):
            for ri, ((name, arity), rows) in enumerate(zip(sig.relations, self._tables)):
                for t in itertools.product(range(i + 1), repeat=arity):
                    if i not in t:
                        continue
                    chk_ar.append(arity)
                    chk_rel.append(ri)
                    chk_pos.extend(t)
                    chk_pos.extend([0] * (max_ar - arity))
                    chk_val.append(1 if t in rows else 0)
            chk_ptr.append(len(chk_ar))
        return (array("i", chk_ptr), array("i", chk_ar), tuple(chk_rel),
                array("i", chk_pos), array("i", chk_val), max_ar)

    # -- serialization ----------------------------------------------------

    def to_dict(self):
        return {
            "signature": self.signature.to_dict(),
            "size": self.size,
            "tables": {n: [list(t) for t in sorted(rows)]
                       for n, rows in zip(self.signature.names, self._tables)},
            "constant_map": self.constant_map,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_dict(cls, d):
        """Load the JSON form; an optional ``universe`` label list is relabeled to 0..n-1."""
        try:
            sig = Signature.from_dict(d["signature"])
            size = int(d["size"])
            tables = d["tables"]
            cmap = d["constant_map"]
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"bad structure: missing or malformed key {exc}") from exc
        if not isinstance(tables, dict) or not isinstance(cmap, dict):
            raise FormatError("tables and constant_map must be objects")
        labels = d.get("universe")
        if labels is not None:
            if len(labels) != size or len(set(map(json.dumps, labels))) != size:
                raise FormatError("universe must list size distinct labels")
            index = {json.dumps(lab): i for i, lab in enumerate(labels)}
            try:
                tables = {n: [[index[json.dumps(x)] for x in t] for t in rows]
                          for n, rows in tables.items()}
                cmap = {c: index[json.dumps(v)] for c, v in cmap.items()}
            except KeyError as exc:
                raise FormatError(f"unknown universe label {exc}") from exc
        for n in sig.names:
            if n not in tables:
                raise FormatError(f"missing table for relation {n!r}")
        try:
            return cls(sig, size, tables, cmap)
        except (ValueError, TypeError, SignatureMismatch, OutOfRange, MissingConstant) as exc:
            raise FormatError(str(exc)) from exc

    @classmethod
    def from_json(cls, text):
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise FormatError(f"invalid JSON: {exc}") from exc


def _same_signature(a: Structure, b: Structure):
    if a.signature != b.signature:
        raise SignatureMismatch(f"{a.signature} vs {b.signature}")


# ---------------------------------------------------------------------------
# substructures and types


def induced_substructure(s: Structure, subset: Iterable[int]) -> Structure:
    """Restriction of ``s`` to ``subset``, relabeled in increasing order."""
    elems = sorted(set(subset))
    for x in elems:
        if x < 0 or x >= s.size:
            raise OutOfRange(f"element {x} outside universe of size {s.size}")
    index = {x: i for i, x in enumerate(elems)}
    for c, v in s.constant_map.items():
        if v not in index:
            raise MissingConstant(f"constant {c!r} (= {v}) not in subset")
    tables = {}
    for name, rows in zip(s.signature.names, s._tables):
        tables[name] = [tuple(index[x] for x in t) for t in rows
                        if all(x in index for x in t)]
    cmap = {c: index[v] for c, v in s.constant_map.items()}
    return Structure(s.signature, len(elems), tables, cmap)


@dataclass(frozen=True, order=True)
class QfType:
    """Atomic type of a tuple: which coordinates coincide, which atoms hold.

    ``equality_pattern`` is the partition of ``0..arity-1`` into blocks of
    equal coordinates; ``relation_pattern`` lists, per relation, the tuples of
    coordinate positions on which the relation holds; ``constant_pattern``
    lists, per constant, the positions equal to it.
    """

    arity: int
    equality_pattern: tuple
    relation_pattern: tuple
    constant_pattern: tuple = ()

    @property
    def irreflexive(self):
        return all(len(b) == 1 for b in self.equality_pattern)

    def holds(self, name, positions):
        for n, rows in self.relation_pattern:
            if n == name:
                return tuple(positions) in rows
        raise KeyError(name)

    def to_dict(self):
        d = {"arity": self.arity}
        if self.arity == 2:
            d["equal"] = len(self.equality_pattern) == 1
        else:
            d["partition"] = [list(b) for b in self.equality_pattern]
        d["relations"] = {n: [list(t) for t in rows] for n, rows in self.relation_pattern}
        if self.constant_pattern:
            d["constants"] = {c: list(p) for c, p in self.constant_pattern}
        return d

    def describe(self):
        atoms = [f"{n}{t}" for n, rows in self.relation_pattern for t in rows]
        eq = "=".join("".join(map(str, b)) for b in self.equality_pattern if len(b) > 1)
        return f"<{self.arity}: {eq + ' ' if eq else ''}{' '.join(atoms) or '-'}>"

    @classmethod
    def from_dict(cls, d, signature: Signature):
        try:
            k = int(d["arity"])
            if "partition" in d:
                blocks = tuple(sorted(tuple(sorted(b)) for b in d["partition"]))
            elif k == 2:
                blocks = ((0, 1),) if d["equal"] else ((0,), (1,))
            else:
                blocks = tuple((i,) for i in range(k))
            rels = tuple((n, tuple(sorted(tuple(t) for t in d["relations"].get(n, []))))
                         for n in signature.names)
            consts = tuple((c, tuple(d.get("constants", {}).get(c, [])))
                           for c in signature.constants)
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"bad type descriptor: {exc}") from exc
        if not any(p for _, p in consts):
            consts = () if not signature.constants else consts
        return cls(k, blocks, rels, consts)


def qf_type(s: Structure, tup: Sequence[int]) -> QfType:
    tup = tuple(tup)
    for x in tup:
        if x < 0 or x >= s.size:
            raise OutOfRange(f"element {x} outside universe of size {s.size}")
    k = len(tup)
    blocks = {}
    for i, x in enumerate(tup):
        blocks.setdefault(x, []).append(i)
    eq = tuple(sorted(tuple(b) for b in blocks.values()))
    rels = []
    for (name, arity), rows in zip(s.signature.relations, s._tables):
        hits = tuple(pos for pos in itertools.product(range(k), repeat=arity)
                     if tuple(tup[p] for p in pos) in rows)
        rels.append((name, hits))
    consts = ()
    if s.signature.constants:
        consts = tuple((c, tuple(i for i, x in enumerate(tup) if x == v))
                       for c, v in s.constant_map.items())
    return QfType(k, eq, tuple(rels), consts)


# ---------------------------------------------------------------------------
# embeddings


@dataclass(frozen=True)
class Embedding:
    source: Structure
    target: Structure
    map: tuple

    def __call__(self, x):
        return self.map[x]

    def apply(self, tup):
        return tuple(self.map[x] for x in tup)

    @property
    def image(self):
        return frozenset(self.map)

    def compose(self, inner: "Embedding") -> "Embedding":
        """``self ∘ inner`` (apply ``inner`` first)."""
        if inner.target != self.source:
            raise SignatureMismatch("embeddings do not compose")
        return Embedding(inner.source, self.target, tuple(self.map[x] for x in inner.map))

    def is_valid(self) -> bool:
        """Re-verify injectivity, constants, preservation and reflection."""
        s, t, m = self.source, self.target, self.map
        if len(m) != s.size or len(set(m)) != len(m):
            return False
        if any(x < 0 or x >= t.size for x in m):
            return False
        tc = t.constant_map
        if any(m[v] != tc[c] for c, v in s.constant_map.items()):
            return False
        for (name, arity) in s.signature.relations:
            src, dst = s.table(name), t.table(name)
            for tup in itertools.product(range(s.size), repeat=arity):
                if (tup in src) != (tuple(m[x] for x in tup) in dst):
                    return False
        return True


def _domains(a: Structure, c: Structure, fixed):
    prof_c = c.point_profiles
    by_profile = {}
    for y, p in enumerate(prof_c):
        by_profile.setdefault(p, []).append(y)
    ptr = [0]
    val = []
    for x, p in enumerate(a.point_profiles):
        cands = by_profile.get(p, [])
        if fixed and x in fixed:
            cands = [fixed[x]] if fixed[x] in cands else []
        val.extend(cands)
        ptr.append(len(val))
    return array("i", ptr), array("i", val)


def hom_images(a: Structure, c: Structure, fixed: Mapping[int, int] | None = None,
               limit: int = 0) -> list:
    """Image sequences of all embeddings ``a -> c`` in lexicographic order."""
    _same_signature(a, c)
    if not fixed and not limit:
        return _hom_cached(a, c)
    return _hom_run(a, c, fixed, limit)


def _hom_run(a, c, fixed, limit):
    if a.size > c.size:
        return []
    chk_ptr, chk_ar, chk_rel, chk_pos, chk_val, max_ar = a.embed_plan
    ctab, offsets = c.packed
    chk_off = array("i", [offsets[r] for r in chk_rel])
    dom_ptr, dom_val = _domains(a, c, fixed)
    return kernels.embed_search(a.size, c.size, dom_ptr, dom_val, chk_ptr, chk_ar,
                                chk_off, chk_pos, chk_val, max_ar, ctab, limit)


@lru_cache(maxsize=65536)
def _hom_cached(a, c):
    return _hom_run(a, c, None, 0)


def enumerate_embeddings(a: Structure, c: Structure,
                         fixed: Mapping[int, int] | None = None,
                         limit: int = 0) -> list[Embedding]:
    return [Embedding(a, c, m) for m in hom_images(a, c, fixed, limit)]


def embeds(a: Structure, c: Structure, fixed=None) -> bool:
    return bool(hom_images(a, c, fixed, 1))


def automorphisms(s: Structure) -> list[Embedding]:
    """The automorphism group, identity first (it is the lex-least image)."""
    return enumerate_embeddings(s, s)


# ---------------------------------------------------------------------------
# canonical labeling: colour refinement plus individualization


def _refine(s: Structure, colors: list) -> list:
    rel_rows = [(ri, rows) for ri, rows in enumerate(s._tables)]
    ncol = len(set(colors))
    while True:
        sig = []
        for x in range(s.size):
            sig.append([colors[x]])
        for ri, rows in rel_rows:
            for t in rows:
                pattern = tuple(colors[y] for y in t)
                for x in set(t):
                    sig[x].append((ri, tuple(-1 if y == x else colors[y] for y in t), pattern))
        keys = [(row[0], tuple(sorted(row[1:]))) for row in sig]
        rank = {k: i for i, k in enumerate(sorted(set(keys)))}
        new = [rank[k] for k in keys]
        if len(rank) == ncol:
            return new
        colors, ncol = new, len(rank)


def _encode(s: Structure, label: Sequence[int]) -> bytes:
    n = s.size
    out = bytearray([n & 0xFF, n >> 8])
    out.extend(label[v] for v in s._constants)
    for (name, arity), rows in zip(s.signature.relations, s._tables):
        nbits = n ** arity
        bits = bytearray((nbits + 7) // 8)
        for t in rows:
            idx = 0
            for x in t:
                idx = idx * n + label[x]
            bits[idx >> 3] |= 0x80 >> (idx & 7)
        out.extend(bits)
    return bytes(out)


def canonical_form(s: Structure) -> CanonicalCode:
    """Isomorphism-invariant byte code; equal codes iff isomorphic.

    Codes of smaller structures sort first; within a size the code is the
    minimum encoding over the leaves of the individualization tree.
    """
    code = s.__dict__.get("_canon")
    if code is not None:
        return code
    n = s.size
    prof = s.point_profiles
    rank = {p: i for i, p in enumerate(sorted(set(prof)))}
    colors = _refine(s, [rank[p] for p in prof]) if n else []
    best = [None]

    def search(cols):
        if len(set(cols)) == n:
            enc = _encode(s, cols)
            if best[0] is None or enc < best[0]:
                best[0] = enc
            return
        counts = {}
        for c in cols:
            counts[c] = counts.get(c, 0) + 1
        target = min(c for c, k in counts.items() if k > 1)
        for x in range(n):
            if cols[x] != target:
                continue
            keyed = [(c, 0 if (y == x or c != target) else 1) for y, c in enumerate(cols)]
            r = {k: i for i, k in enumerate(sorted(set(keyed)))}
            search(_refine(s, [r[k] for k in keyed]))

    search(colors)
    code = best[0]
    s.__dict__["_canon"] = code
    return code


def is_isomorphic(s: Structure, t: Structure) -> bool:
    _same_signature(s, t)
    if s.size != t.size:
        return False
    return canonical_form(s) == canonical_form(t)


def canonical_relabel(s: Structure) -> Structure:
    """The isomorphic copy of ``s`` whose plain encoding is its canonical code."""
    n = s.size
    if n == 0:
        return s
    prof = s.point_profiles
    rank = {p: i for i, p in enumerate(sorted(set(prof)))}
    target = canonical_form(s)
    for perm in _leaf_labelings(s, _refine(s, [rank[p] for p in prof])):
        if _encode(s, perm) == target:
            return relabel(s, perm)
    raise AssertionError("canonical leaf not reproduced")


def _leaf_labelings(s, cols):
    n = s.size
    if len(set(cols)) == n:
        yield list(cols)
        return
    counts = {}
    for c in cols:
        counts[c] = counts.get(c, 0) + 1
    target = min(c for c, k in counts.items() if k > 1)
    for x in range(n):
        if cols[x] != target:
            continue
        keyed = [(c, 0 if (y == x or c != target) else 1) for y, c in enumerate(cols)]
        r = {k: i for i, k in enumerate(sorted(set(keyed)))}
        yield from _leaf_labelings(s, _refine(s, [r[k] for k in keyed]))


def relabel(s: Structure, label: Sequence[int]) -> Structure:
    """Copy of ``s`` with element ``x`` renamed ``label[x]`` (a permutation)."""
    tables = {n: [tuple(label[x] for x in t) for t in rows]
              for n, rows in zip(s.signature.names, s._tables)}
    cmap = {c: label[v] for c, v in s.constant_map.items()}
    return Structure(s.signature, s.size, tables, cmap)
