"""Buchberger's algorithm for submodules of free modules over a polynomial ring.

Vectors are dicts keyed by ``(component, monomial)``.  Ideals are the rank-1
case.  Module orders are position-over-term (``"pot"``, component 0 most
significant) or term-over-position (``"top"``).
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .arith import ModP, Poly, PolyRing, mono_div, mono_divides, mono_lcm, mono_mul
from .errors import DomainError

CACHE_ENV = "WPRKIT_CACHE_DIR"


class FreeVector:
    """An element of the free module ``S^rank`` over a polynomial ring ``S``."""

    __slots__ = ("ring", "rank", "terms", "_hash")

    def __init__(self, ring: PolyRing, rank: int, terms: dict):
        self.ring = ring
        self.rank = rank
        self.terms = terms
        self._hash = None

    @classmethod
    def zero(cls, ring: PolyRing, rank: int) -> FreeVector:
        return cls(ring, rank, {})

    @classmethod
    def unit(cls, ring: PolyRing, rank: int, i: int, coeff=None) -> FreeVector:
        c = ring.field.one if coeff is None else ring.field(coeff)
        return cls(ring, rank, {(i, ring.unit_mono): c})

    @classmethod
    def from_polys(cls, ring: PolyRing, polys: Sequence) -> FreeVector:
        terms = {}
        for i, p in enumerate(polys):
            p = ring(p)
            for m, c in p.terms.items():
                terms[(i, m)] = c
        return cls(ring, len(polys), terms)

    @classmethod
    def from_pairs(cls, ring: PolyRing, rank: int, pairs: Iterable) -> FreeVector:
        v = cls.zero(ring, rank)
        for i, p in pairs:
            if not 0 <= i < rank:
                raise DomainError(f"component {i} outside rank {rank}")
            v = v + cls.from_polys(ring, [ring.zero] * i + [p] + [ring.zero] * (rank - i - 1))
        return v

    def component(self, i: int) -> Poly:
        return Poly(self.ring, {m: c for (j, m), c in self.terms.items() if j == i})

    def components(self) -> list:
        out = [dict() for _ in range(self.rank)]
        for (j, m), c in self.terms.items():
            out[j][m] = c
        return [Poly(self.ring, t) for t in out]

    def pairs(self) -> list:
        """Nonzero entries as ``(component, Poly)`` pairs."""
        return [(i, p) for i, p in enumerate(self.components()) if p]

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def _same(self, other: FreeVector):
        if not isinstance(other, FreeVector):
            return False
        if other.ring != self.ring or other.rank != self.rank:
            raise DomainError("free vectors over different free modules")
        return True

    def __add__(self, other):
        if not self._same(other):
            return NotImplemented
        return FreeVector(self.ring, self.rank, _add(self.terms, other.terms))

    def __sub__(self, other):
        if not self._same(other):
            return NotImplemented
        return FreeVector(self.ring, self.rank, _axpy(dict(self.terms), other.terms, -self.ring.field.one))

    def __neg__(self):
        return FreeVector(self.ring, self.rank, {k: -c for k, c in self.terms.items()})

    def scale(self, f) -> FreeVector:
        """Multiply by a polynomial or scalar."""
        if not isinstance(f, Poly):
            f = self.ring.constant(f)
        return FreeVector(self.ring, self.rank, _poly_times(f.terms, self.terms))

    def __rmul__(self, f):
        return self.scale(f)

    def __eq__(self, other):
        if not isinstance(other, FreeVector):
            return NotImplemented
        return self.ring == other.ring and self.rank == other.rank and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.rank, frozenset(self.terms.items())))
        return self._hash

    def frozen(self) -> tuple:
        return tuple(sorted(self.terms.items(), key=lambda t: t[0]))

    def embed(self, rank: int, offset: int = 0) -> FreeVector:
        """Place this vector into ``S^rank`` starting at component ``offset``."""
        return FreeVector(self.ring, rank, {(i + offset, m): c for (i, m), c in self.terms.items()})

    def restrict(self, start: int, stop: int) -> FreeVector:
        """Components ``start..stop-1`` as a vector of rank ``stop - start``."""
        return FreeVector(
            self.ring, stop - start,
            {(i - start, m): c for (i, m), c in self.terms.items() if start <= i < stop},
        )

    def __repr__(self):
        return f"FreeVector({self})"

    def __str__(self):
        return "(" + ", ".join(str(p) for p in self.components()) + ")"


# ---------------------------------------------------------------------------
# raw term-dict arithmetic


def _add(a: dict, b: dict) -> dict:
    out = dict(a)
    for k, c in b.items():
        v = out.get(k)
        if v is None:
            out[k] = c
        else:
            v = v + c
            if v:
                out[k] = v
            else:
                del out[k]
    return out


def _axpy(p: dict, g: dict, c, mono=None) -> dict:
    """In place: ``p += c * x^mono * g``."""
    if mono is None:
        for k, gc in g.items():
            v = p.get(k)
            t = gc * c
            if v is None:
                p[k] = t
            else:
                v = v + t
                if v:
                    p[k] = v
                else:
                    del p[k]
        return p
    for (comp, m), gc in g.items():
        k = (comp, tuple(a + b for a, b in zip(m, mono)))
        v = p.get(k)
        t = gc * c
        if v is None:
            p[k] = t
        else:
            v = v + t
            if v:
                p[k] = v
            else:
                del p[k]
    return p


def _poly_times(f: dict, v: dict) -> dict:
    out: dict = {}
    for m, c in f.items():
        _axpy(out, v, c, m)
    return out


def combine(vectors: Sequence[FreeVector], coeffs: FreeVector, ring: PolyRing, rank: int) -> FreeVector:
    """Return ``sum_k coeffs_k * vectors[k]``."""
    out: dict = {}
    for (k, m), c in coeffs.terms.items():
        _axpy(out, vectors[k].terms, c, m)
    return FreeVector(ring, rank, out)


# ---------------------------------------------------------------------------
# module orders


def term_key_function(ring: PolyRing, order: str):
    mkey = ring.key
    if order == "pot":
        def key(t):
            return (-t[0], mkey(t[1]))
    elif order == "top":
        def key(t):
            return (mkey(t[1]), -t[0])
    else:
        raise DomainError(f"unknown module order {order!r}")
    return lru_cache(maxsize=None)(key)


_KEYS: dict = {}
_KEYS_LOCK = threading.Lock()


def _term_key(ring: PolyRing, order: str):
    k = (ring, order)
    f = _KEYS.get(k)
    if f is None:
        with _KEYS_LOCK:
            f = _KEYS.get(k)
            if f is None:
                f = term_key_function(ring, order)
                _KEYS[k] = f
    return f


# ---------------------------------------------------------------------------
# reduction


class _Elem:
    __slots__ = ("terms", "lt", "comp", "mono")

    def __init__(self, terms: dict, key):
        lt = max(terms, key=key)
        lc = terms[lt]
        if lc != 1:
            inv = 1 / lc if not isinstance(lc, int) else Fraction(1, lc)
            terms = {k: c * inv for k, c in terms.items()}
        self.terms = terms
        self.lt = lt
        self.comp, self.mono = lt


def _find_reducer(by_comp: dict, comp: int, mono):
    for e in by_comp.get(comp, ()):
        if mono_divides(e.mono, mono):
            return e
    return None


def _index(basis: Sequence[_Elem]) -> dict:
    by_comp: dict = {}
    for e in basis:
        by_comp.setdefault(e.comp, []).append(e)
    return by_comp


def _reduce(f: dict, by_comp: dict, key, full: bool = True) -> dict:
    """Remainder of ``f`` on division by the (monic) elements in ``by_comp``."""
    p = dict(f)
    r: dict = {}
    while p:
        t = max(p, key=key)
        c = p[t]
        comp, mono = t
        e = _find_reducer(by_comp, comp, mono)
        if e is None:
            if not full:
                r.update(p)
                return r
            r[t] = c
            del p[t]
            continue
        _axpy(p, e.terms, -c, mono_div(mono, e.mono))
    return r


# ---------------------------------------------------------------------------
# Buchberger


def _spoly(f: _Elem, g: _Elem, lcm) -> dict:
    p = _axpy({}, f.terms, 1, mono_div(lcm, f.mono))
    return _axpy(p, g.terms, -1, mono_div(lcm, g.mono))


def _coprime(a, b) -> bool:
    return all(x == 0 or y == 0 for x, y in zip(a, b))


def _buchberger(gens: list, key, rank: int) -> list:
    """Return a reduced Groebner basis (list of monic term dicts).

    Normal selection strategy; Gebauer-Moeller pair update.  The product
    criterion is used only for ideals (rank 1), where it is valid.
    """
    basis: list = []
    active: list = []  # indices of basis elements still generating pairs
    pairs: dict = {}  # (i, j) -> lcm

    use_product = rank == 1

    def lcm_of(i, j):
        return mono_lcm(basis[i].mono, basis[j].mono)

    def update(h: int):
        eh = basis[h]
        cands = [(g, lcm_of(g, h)) for g in active if basis[g].comp == eh.comp]
        kept = []
        while cands:
            g1, l1 = cands.pop(0)
            disjoint = use_product and _coprime(basis[g1].mono, eh.mono)
            if disjoint or not any(mono_divides(l2, l1) for _, l2 in cands + kept):
                kept.append((g1, l1))
        new_pairs = {
            (g, h): l for g, l in kept
            if not (use_product and _coprime(basis[g].mono, eh.mono))
        }
        for (i, j), l in list(pairs.items()):
            if basis[i].comp != eh.comp:
                continue
            if mono_divides(eh.mono, l) and lcm_of(i, h) != l and lcm_of(j, h) != l:
                del pairs[(i, j)]
        pairs.update(new_pairs)
        active[:] = [
            g for g in active
            if not (basis[g].comp == eh.comp and mono_divides(eh.mono, basis[g].mono))
        ]
        active.append(h)

    index: dict = {}
    for t in gens:
        r = _reduce(t, index, key) if index else dict(t)
        if not r:
            continue
        e = _Elem(r, key)
        basis.append(e)
        index.setdefault(e.comp, []).append(e)
        update(len(basis) - 1)

    while pairs:
        (i, j), l = min(pairs.items(), key=lambda kv: (key((basis[kv[0][0]].comp, kv[1])), kv[0]))
        del pairs[(i, j)]
        s = _spoly(basis[i], basis[j], l)
        r = _reduce(s, index, key)
        if not r:
            continue
        e = _Elem(r, key)
        basis.append(e)
        index.setdefault(e.comp, []).append(e)
        update(len(basis) - 1)

    return _interreduce(basis, key)


def _interreduce(basis: list, key) -> list:
    # minimal basis: drop elements whose leading term is divisible by another's
    ordered = sorted(basis, key=lambda e: key(e.lt))
    minimal: list = []
    for e in ordered:
        if not any(m.comp == e.comp and mono_divides(m.mono, e.mono) for m in minimal):
            minimal.append(e)
    out = []
    for i, e in enumerate(minimal):
        others = _index(minimal[:i] + minimal[i + 1:])
        r = _reduce(e.terms, others, key)
        out.append(_Elem(r, key))
    out.sort(key=lambda e: key(e.lt))
    return [e.terms for e in out]


# ---------------------------------------------------------------------------
# memo cache


class _Cache:
    """In-memory memo of Groebner bases, optionally mirrored to disk."""

    def __init__(self):
        self._lock = threading.Lock()
        self._data: dict = {}
        self.hits = 0
        self.misses = 0

    def get(self, k):
        with self._lock:
            v = self._data.get(k)
            if v is not None:
                self.hits += 1
                return v
        v = _disk_load(k)
        with self._lock:
            if v is not None:
                self._data[k] = v
                self.hits += 1
            else:
                self.misses += 1
        return v

    def put(self, k, v):
        with self._lock:
            self._data.setdefault(k, v)
        _disk_store(k, v)

    def clear(self):
        with self._lock:
            self._data.clear()
            self.hits = self.misses = 0


CACHE = _Cache()


def _coeff_to_json(c):
    if isinstance(c, ModP):
        return ["p", c.v, c.p]
    c = Fraction(c)
    return ["q", c.numerator, c.denominator]


def _coeff_from_json(x):
    if x[0] == "p":
        return ModP(x[1], x[2])
    return Fraction(x[1], x[2])


def _key_digest(k) -> str:
    return hashlib.sha256(repr(k).encode()).hexdigest()


def _disk_path(k):
    d = os.environ.get(CACHE_ENV)
    if not d:
        return None
    return os.path.join(d, _key_digest(k) + ".json")


def _disk_load(k):
    path = _disk_path(k)
    if path is None or not os.path.exists(path):
        return None
    try:
        with open(path) as fh:
            raw = json.load(fh)
        return [
            {(t[0], tuple(t[1])): _coeff_from_json(t[2]) for t in elem}
            for elem in raw
        ]
    except (OSError, ValueError, KeyError, IndexError):
        return None


def _disk_store(k, v):
    path = _disk_path(k)
    if path is None:
        return
    try:
        os.makedirs(os.path.dirname(path), exist_ok=True)
        raw = [[[c, list(m), _coeff_to_json(x)] for (c, m), x in sorted(e.items())] for e in v]
        tmp = path + f".{os.getpid()}.{threading.get_ident()}.tmp"
        with open(tmp, "w") as fh:
            json.dump(raw, fh)
        os.replace(tmp, path)
    except OSError:
        pass


def _raw_groebner(ring: PolyRing, rank: int, order: str, gens: Sequence[dict]) -> list:
    key = _term_key(ring, order)
    frozen = tuple(tuple(sorted(g.items(), key=lambda t: t[0])) for g in gens if g)
    ck = (repr(ring), rank, order, frozen)
    hit = CACHE.get(ck)
    if hit is not None:
        return hit
    result = _buchberger([dict(g) for g in gens if g], key, rank)
    CACHE.put(ck, result)
    return result


# ---------------------------------------------------------------------------
# public interface


class GroebnerBasis:
    """A reduced Groebner basis of a submodule of ``S^rank`` (rank 1: an ideal)."""

    def __init__(self, ring: PolyRing, rank: int, elements: Sequence[FreeVector], order: str = "pot", reduced=True):
        self.ring = ring
        self.rank = rank
        self.order = order
        self.elements = tuple(elements)
        self.reduced = reduced
        self._key = _term_key(ring, order)
        self._index = _index([_Elem(dict(e.terms), self._key) for e in self.elements])

    @classmethod
    def compute(cls, generators: Sequence[FreeVector], ring: PolyRing | None = None, rank: int | None = None, order: str = "pot") -> GroebnerBasis:
        generators = list(generators)
        if ring is None or rank is None:
            if not generators:
                raise DomainError("ring and rank are required for an empty generator list")
            ring, rank = generators[0].ring, generators[0].rank
        for g in generators:
            if g.ring != ring or g.rank != rank:
                raise DomainError("generators live in different free modules")
        raw = _raw_groebner(ring, rank, order, [g.terms for g in generators])
        return cls(ring, rank, [FreeVector(ring, rank, t) for t in raw], order)

    def normal_form(self, v: FreeVector) -> FreeVector:
        if v.ring != self.ring or v.rank != self.rank:
            raise DomainError("vector is not in the ambient free module of this basis")
        if not self.elements:
            return v
        return FreeVector(self.ring, self.rank, _reduce(v.terms, self._index, self._key))

    def contains(self, v: FreeVector) -> bool:
        return self.normal_form(v).is_zero()

    def leading_terms(self) -> list:
        return [max(e.terms, key=self._key) for e in self.elements]

    def is_zero(self) -> bool:
        return not self.elements

    def is_whole(self) -> bool:
        """True when the submodule is all of ``S^rank``."""
        return all(self.contains(FreeVector.unit(self.ring, self.rank, i)) for i in range(self.rank))

    def spoly_audit(self) -> bool:
        """Check that every S-vector of the basis reduces to zero."""
        elems = [_Elem(dict(e.terms), self._key) for e in self.elements]
        for i in range(len(elems)):
            for j in range(i + 1, len(elems)):
                if elems[i].comp != elems[j].comp:
                    continue
                l = mono_lcm(elems[i].mono, elems[j].mono)
                if _reduce(_spoly(elems[i], elems[j], l), self._index, self._key):
                    return False
        return True

    def same_submodule(self, other: GroebnerBasis) -> bool:
        return all(other.contains(e) for e in self.elements) and all(self.contains(e) for e in other.elements)

    # ideal conveniences
    def polys(self) -> list:
        if self.rank != 1:
            raise DomainError("not an ideal basis")
        return [e.component(0) for e in self.elements]

    def reduce_poly(self, f: Poly) -> Poly:
        return self.normal_form(FreeVector.from_polys(self.ring, [f])).component(0)

    def contains_poly(self, f: Poly) -> bool:
        return self.reduce_poly(f).is_zero()

    def is_unit(self) -> bool:
        return self.rank == 1 and self.contains_poly(self.ring.one)

    def __eq__(self, other):
        if not isinstance(other, GroebnerBasis):
            return NotImplemented
        return (self.ring, self.rank, self.order) == (other.ring, other.rank, other.order) and set(self.elements) == set(other.elements)

    def __hash__(self):
        return hash((self.rank, frozenset(self.elements)))

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __repr__(self):
        return f"GroebnerBasis([{', '.join(str(e) for e in self.elements)}])"


def ideal_basis(polys: Sequence[Poly], ring: PolyRing | None = None, order: str = "pot") -> GroebnerBasis:
    polys = list(polys)
    if ring is None:
        if not polys:
            raise DomainError("ring is required for an empty generator list")
        ring = polys[0].ring
    return GroebnerBasis.compute([FreeVector.from_polys(ring, [ring(p)]) for p in polys], ring, 1, order)


def buchberger(generators: Sequence, order: str = "pot", ring: PolyRing | None = None, rank: int | None = None) -> GroebnerBasis:
    """Reduced Groebner basis of the submodule (or ideal) spanned by ``generators``.

    Polynomials are accepted and treated as rank-1 vectors.
    """
    gens = list(generators)
    if gens and isinstance(gens[0], Poly):
        return ideal_basis(gens, ring, order)
    return GroebnerBasis.compute(gens, ring, rank, order)


def normal_form(v, gb: GroebnerBasis):
    if isinstance(v, Poly):
        return gb.reduce_poly(v)
    return gb.normal_form(v)


class Elimination:
    """Groebner basis of ``(g_k, e_k)`` for tracked ``g_k`` plus ``(u, 0)`` for untracked ``u``.

    Under position-over-term with the original components first, the basis
    elements with vanishing first block generate the relations
    ``{c : sum c_k g_k in <untracked>}``, and reducing ``(v, 0)`` expresses any
    ``v`` in ``<tracked> + <untracked>`` through the tracked generators.
    """

    def __init__(self, ring: PolyRing, rank: int, tracked: Sequence[FreeVector], untracked: Sequence[FreeVector] = ()):
        self.ring = ring
        self.rank = rank
        self.tracked = list(tracked)
        self.m = len(self.tracked)
        total = rank + self.m
        gens = []
        for k, g in enumerate(self.tracked):
            if g.ring != ring or g.rank != rank:
                raise DomainError("tracked vector in a different free module")
            t = dict(g.terms)
            t[(rank + k, ring.unit_mono)] = ring.field.one
            gens.append(t)
        for u in untracked:
            if u.ring != ring or u.rank != rank:
                raise DomainError("untracked vector in a different free module")
            if u.terms:
                gens.append(dict(u.terms))
        self._key = _term_key(ring, "pot")
        raw = _raw_groebner(ring, total, "pot", gens)
        self._elems = [_Elem(dict(t), self._key) for t in raw]
        self._index = _index(self._elems)

    def relations(self) -> list:
        """Generators of the relation module among the tracked vectors."""
        out = []
        for e in self._elems:
            if e.comp >= self.rank:
                out.append(FreeVector(self.ring, self.m, {(c - self.rank, mm): x for (c, mm), x in e.terms.items()}))
        return out

    def projection_basis(self) -> GroebnerBasis:
        """Groebner basis of ``<tracked> + <untracked>`` itself."""
        elems = [
            FreeVector(self.ring, self.rank, {(c, mm): x for (c, mm), x in e.terms.items() if c < self.rank})
            for e in self._elems if e.comp < self.rank
        ]
        return GroebnerBasis(self.ring, self.rank, elems, "pot")

    def express(self, v: FreeVector):
        """Coefficients ``c`` with ``v = sum c_k g_k`` modulo untracked, or None."""
        if v.ring != self.ring or v.rank != self.rank:
            raise DomainError("vector is not in the ambient free module")
        p = dict(v.terms)
        key = self._key
        rank = self.rank
        while p:
            t = max(p, key=key)
            comp, mono = t
            if comp >= rank:
                break
            e = _find_reducer(self._index, comp, mono)
            if e is None:
                return None
            _axpy(p, e.terms, -p[t], mono_div(mono, e.mono))
        return FreeVector(self.ring, self.m, {(c - rank, mm): -x for (c, mm), x in p.items()})


def syzygy_module(generators: Sequence[FreeVector], ring: PolyRing | None = None, rank: int | None = None) -> list:
    """Generators of ``{c : sum c_i g_i = 0}`` over the polynomial ring."""
    gens = list(generators)
    if not gens:
        return []
    if isinstance(gens[0], Poly):
        ring = gens[0].ring
        gens = [FreeVector.from_polys(ring, [g]) for g in gens]
    ring = ring or gens[0].ring
    rank = gens[0].rank if rank is None else rank
    return Elimination(ring, rank, gens).relations()


def colon(submodule: GroebnerBasis, f: Poly) -> GroebnerBasis:
    """Groebner basis of ``(N : f) = {m : f m in N}``."""
    if f.is_zero():
        raise DomainError("colon by the zero polynomial")
    ring, rank = submodule.ring, submodule.rank
    tracked = [FreeVector.unit(ring, rank, i).scale(f) for i in range(rank)]
    rel = Elimination(ring, rank, tracked, submodule.elements).relations()
    return GroebnerBasis.compute(rel, ring, rank, submodule.order)
