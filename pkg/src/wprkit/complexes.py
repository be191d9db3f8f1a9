"""Bounded cochain complexes of finitely presented modules.

Indexing is cohomological: ``d^n : X^n -> X^(n+1)``.  A ``FreeComplex``
is a ``ModuleComplex`` whose terms are free.
"""

from __future__ import annotations

from functools import cached_property
from typing import Sequence

from .errors import DomainError
from .groebner import Elimination, FreeVector
from .modules import (
    FpModule,
    ModuleMap,
    Subquotient,
    direct_sum,
    homology_at,
    kernel_subquotient,
    scalar_matrix_map,
    tensor,
)
from .rings import QuotientRing


class ModuleComplex:
    """Terms ``modules[i]`` in degree ``lo + i`` with differentials ``diffs[i]`` out of that degree."""

    def __init__(self, ring: QuotientRing, lo: int, modules: Sequence[FpModule], diffs: Sequence[ModuleMap], check: bool = True):
        modules = list(modules)
        diffs = list(diffs)
        if len(diffs) != max(len(modules) - 1, 0):
            raise DomainError("need one differential between each pair of adjacent terms")
        for M in modules:
            if M.ring != ring:
                raise DomainError("complex term over the wrong ring")
        for i, d in enumerate(diffs):
            if d.source.rank != modules[i].rank or d.target.rank != modules[i + 1].rank:
                raise DomainError(f"differential out of degree {lo + i} has the wrong shape")
        self.ring = ring
        self.lo = lo
        self.modules = modules
        self.diffs = diffs
        if check:
            self.check_square_zero()

    # -- access
    @property
    def hi(self) -> int:
        return self.lo + len(self.modules) - 1

    def degrees(self) -> range:
        return range(self.lo, self.hi + 1)

    def module(self, n: int) -> FpModule:
        if self.lo <= n <= self.hi:
            return self.modules[n - self.lo]
        return FpModule.zero(self.ring)

    def diff(self, n: int) -> ModuleMap:
        if self.lo <= n < self.hi:
            return self.diffs[n - self.lo]
        return ModuleMap.zero_map(self.module(n), self.module(n + 1))

    def rank(self, n: int) -> int:
        return self.module(n).rank

    def ranks(self) -> dict:
        return {n: self.rank(n) for n in self.degrees()}

    def matrix(self, n: int) -> list:
        return self.diff(n).matrix()

    def is_free(self) -> bool:
        return all(not M.relations for M in self.modules)

    def check_square_zero(self):
        for n in range(self.lo, self.hi - 1):
            if not self.diff(n + 1).compose(self.diff(n)).is_zero():
                raise DomainError(f"d o d != 0 at degree {n}")

    # -- cohomology
    @cached_property
    def _homology(self) -> dict:
        return {}

    def cohomology_subquotient(self, n: int) -> Subquotient:
        if n not in self._homology:
            M = self.module(n)
            d_in = self.diff(n - 1) if self.lo <= n - 1 else None
            d_out = self.diff(n) if n < self.hi else None
            self._homology[n] = homology_at(M, d_in, d_out)
        return self._homology[n]

    def cohomology(self, n: int) -> FpModule:
        if not self.lo <= n <= self.hi:
            return FpModule.zero(self.ring)
        return self.cohomology_subquotient(n).module

    def cohomology_all(self) -> dict:
        return {n: self.cohomology(n) for n in self.degrees()}

    def nonzero_degrees(self) -> list:
        return [n for n in self.degrees() if not self.cohomology(n).is_zero()]

    def is_acyclic(self) -> bool:
        return not self.nonzero_degrees()

    def sup(self):
        nz = self.nonzero_degrees()
        return max(nz) if nz else None

    def inf(self):
        nz = self.nonzero_degrees()
        return min(nz) if nz else None

    def amplitude(self):
        nz = self.nonzero_degrees()
        return max(nz) - min(nz) if nz else None

    # -- constructions
    def change_ring(self, ring: QuotientRing) -> ModuleComplex:
        mods = [M.change_ring(ring) for M in self.modules]
        diffs = [ModuleMap(mods[i], mods[i + 1], d.images, check=False) for i, d in enumerate(self.diffs)]
        return _make(ring, self.lo, mods, diffs)

    def equal_matrices(self, other: ModuleComplex) -> bool:
        if (self.lo, self.hi) != (other.lo, other.hi) or self.ranks() != other.ranks():
            return False
        return all(self.diff(n).equals(other.diff(n)) for n in range(self.lo, self.hi))

    def to_json(self) -> dict:
        out = {
            "lo": self.lo,
            "hi": self.hi,
            "ranks": {str(n): self.rank(n) for n in self.degrees()},
            "differentials": {str(n): self.diff(n).matrix_strings() for n in range(self.lo, self.hi)},
        }
        rels = {str(n): [[str(p) for p in r.components()] for r in self.module(n).relations] for n in self.degrees() if self.module(n).relations}
        if rels:
            out["relations"] = rels
        return out

    def pretty(self) -> str:
        lines = [f"complex over {self.ring}, degrees {self.lo}..{self.hi}"]
        for n in self.degrees():
            lines.append(f"  degree {n}: {self.module(n)}")
        for n in range(self.lo, self.hi):
            lines.append(f"  d^{n} = {self.diff(n).matrix_strings()}")
        return "\n".join(lines)

    def __str__(self):
        return self.pretty()


class FreeComplex(ModuleComplex):
    """A bounded complex of finite free modules, built from ranks and matrices.

    ``matrices[i]`` is the differential out of degree ``lo + i`` with rows
    indexing the target basis.
    """

    def __init__(self, ring: QuotientRing, lo: int, ranks: Sequence[int], matrices: Sequence[Sequence[Sequence]], check: bool = True):
        mods = [FpModule.free(ring, r) for r in ranks]
        if len(matrices) != max(len(ranks) - 1, 0):
            raise DomainError("need one matrix between each pair of adjacent terms")
        diffs = [ModuleMap.from_matrix(mods[i], mods[i + 1], m, check=False) for i, m in enumerate(matrices)]
        super().__init__(ring, lo, mods, diffs, check)

    @classmethod
    def from_modules(cls, ring, lo, modules, diffs, check=True) -> FreeComplex:
        obj = cls.__new__(cls)
        ModuleComplex.__init__(obj, ring, lo, modules, diffs, check)
        return obj

    @classmethod
    def concentrated(cls, ring: QuotientRing, rank: int, degree: int = 0) -> FreeComplex:
        return cls(ring, degree, [rank], [])

    @classmethod
    def zero(cls, ring: QuotientRing) -> FreeComplex:
        return cls(ring, 0, [0], [])


def _make(ring, lo, mods, diffs, check=True) -> ModuleComplex:
    if all(not M.relations for M in mods):
        return FreeComplex.from_modules(ring, lo, mods, diffs, check)
    return ModuleComplex(ring, lo, mods, diffs, check)


def module_complex(M: FpModule, degree: int = 0) -> ModuleComplex:
    """A module as a complex concentrated in one degree."""
    return _make(M.ring, degree, [M], [])


# ---------------------------------------------------------------------------
# chain maps


class ChainMap:
    """A strict (degree 0) map of complexes; commutation is checked on construction."""

    def __init__(self, source: ModuleComplex, target: ModuleComplex, components: dict, check: bool = True):
        self.source = source
        self.target = target
        comps = {}
        for n in range(min(source.lo, target.lo), max(source.hi, target.hi) + 1):
            S, T = source.module(n), target.module(n)
            f = components.get(n)
            if f is None or S.rank == 0 or T.rank == 0:
                comps[n] = ModuleMap.zero_map(S, T)
            else:
                if f.source.rank != S.rank or f.target.rank != T.rank:
                    raise DomainError(f"component in degree {n} has the wrong shape")
                comps[n] = ModuleMap(S, T, f.images, check=False)
        self.components = comps
        if check:
            for f in comps.values():
                f._check()
            self.check_commutes()

    @classmethod
    def from_matrices(cls, source, target, matrices: dict, check=True) -> ChainMap:
        comps = {n: ModuleMap.from_matrix(source.module(n), target.module(n), m, check=False) for n, m in matrices.items()}
        return cls(source, target, comps, check)

    @classmethod
    def identity(cls, C: ModuleComplex) -> ChainMap:
        return cls(C, C, {n: ModuleMap.identity(C.module(n)) for n in C.degrees()}, check=False)

    def component(self, n: int) -> ModuleMap:
        if n in self.components:
            return self.components[n]
        return ModuleMap.zero_map(self.source.module(n), self.target.module(n))

    def degrees(self) -> range:
        return range(min(self.source.lo, self.target.lo), max(self.source.hi, self.target.hi) + 1)

    def check_commutes(self):
        for n in self.degrees():
            lhs = self.component(n + 1).compose(self.source.diff(n))
            rhs = self.target.diff(n).compose(self.component(n))
            if not lhs.equals(rhs):
                raise DomainError(f"chain map does not commute with the differentials at degree {n}")

    def compose(self, inner: ChainMap) -> ChainMap:
        """``self o inner``."""
        comps = {n: self.component(n).compose(inner.component(n)) for n in inner.degrees() if self.source.lo <= n <= self.source.hi}
        return ChainMap(inner.source, self.target, comps, check=False)

    def equals(self, other: ChainMap) -> bool:
        degs = set(self.degrees()) | set(other.degrees())
        return all(self.component(n).equals(other.component(n)) for n in degs)

    def is_zero(self) -> bool:
        return all(f.is_zero() for f in self.components.values())

    def matrices(self) -> dict:
        return {n: f.matrix_strings() for n, f in self.components.items() if f.source.rank and f.target.rank}

    def to_json(self) -> dict:
        return {str(n): m for n, m in sorted(self.matrices().items())}


def induced_map(f: ChainMap, n: int) -> ModuleMap:
    """``H^n(f)`` in the presentations returned by ``cohomology``."""
    S, T = f.source, f.target
    HS = S.cohomology_subquotient(n) if S.lo <= n <= S.hi else None
    HT = T.cohomology_subquotient(n) if T.lo <= n <= T.hi else None
    src = HS.module if HS else FpModule.zero(S.ring)
    tgt = HT.module if HT else FpModule.zero(T.ring)
    if HS is None or HT is None:
        return ModuleMap.zero_map(src, tgt)
    fn = f.component(n)
    images = [HT.coordinates(fn.apply(z)) for z in HS.generator_lifts()]
    return ModuleMap(src, tgt, images)


# ---------------------------------------------------------------------------
# operations on complexes


def shift(C: ModuleComplex, n: int) -> ModuleComplex:
    """``C[n]``: term ``C^(i+n)`` in degree ``i``, differential ``(-1)^n d``."""
    sign = -1 if n % 2 else 1
    diffs = [ModuleMap(d.source, d.target, [v.scale(C.ring.base.constant(sign)) for v in d.images], check=False) for d in C.diffs]
    return _make(C.ring, C.lo - n, C.modules, diffs, check=False)


def _tensor_vec(v: FreeVector, b: int, nq: int, rank: int, offset: int) -> FreeVector:
    """``v (x) e_b`` inside a block of a tensor term."""
    return FreeVector(v.ring, rank, {(offset + c * nq + b, m): x for (c, m), x in v.terms.items()})


def _vec_tensor(a: int, w: FreeVector, nq: int, rank: int, offset: int) -> FreeVector:
    """``e_a (x) w`` inside a block of a tensor term."""
    return FreeVector(w.ring, rank, {(offset + a * nq + c, m): x for (c, m), x in w.terms.items()})


def _blocks(P: ModuleComplex, Q: ModuleComplex, n: int) -> list:
    """``(i, offset, rank P^i, rank Q^(n-i))`` for the summands of ``(P (x) Q)^n``."""
    out = []
    off = 0
    for i in range(P.lo, P.hi + 1):
        j = n - i
        if Q.lo <= j <= Q.hi:
            out.append((i, off, P.rank(i), Q.rank(j)))
            off += P.rank(i) * Q.rank(j)
    return out


def tensor_complexes(P: ModuleComplex, Q: ModuleComplex) -> ModuleComplex:
    """``P (x) Q`` with the Koszul sign rule ``d(p (x) q) = dp (x) q + (-1)^i p (x) dq``.

    The basis of each term is ordered by (left degree, left index, right index).
    """
    if P.ring != Q.ring:
        raise DomainError("tensor of complexes over different rings")
    ring = P.ring
    lo, hi = P.lo + Q.lo, P.hi + Q.hi
    mods = []
    for n in range(lo, hi + 1):
        pieces = [tensor(P.module(i), Q.module(n - i)) for i, _, _, _ in _blocks(P, Q, n)]
        mods.append(direct_sum(*pieces) if pieces else FpModule.zero(ring))
    diffs = []
    for k, n in enumerate(range(lo, hi)):
        src, tgt = mods[k], mods[k + 1]
        tgt_off = {i: off for i, off, _, _ in _blocks(P, Q, n + 1)}
        images = []
        for i, off, np_, nq in _blocks(P, Q, n):
            j = n - i
            dP = P.diff(i)
            dQ = Q.diff(j)
            sign = ring.base.constant(-1 if i % 2 else 1)
            nq_next = Q.rank(j + 1)
            for a in range(np_):
                for b in range(nq):
                    v = FreeVector.zero(ring.base, tgt.rank)
                    if i + 1 in tgt_off:
                        v = v + _tensor_vec(dP.images[a], b, nq, tgt.rank, tgt_off[i + 1])
                    if i in tgt_off and nq_next:
                        v = v + _vec_tensor(a, dQ.images[b].scale(sign), nq_next, tgt.rank, tgt_off[i])
                    images.append(v)
        diffs.append(ModuleMap(src, tgt, images, check=False))
    return _make(ring, lo, mods, diffs)


def tensor_chain_map(f: ChainMap, Q: ModuleComplex, source=None, target=None) -> ChainMap:
    """``f (x) id_Q``."""
    source = source or tensor_complexes(f.source, Q)
    target = target or tensor_complexes(f.target, Q)
    comps = {}
    for n in source.degrees():
        tgt_off = {i: off for i, off, _, _ in _blocks(f.target, Q, n)}
        T = target.module(n)
        images = []
        for i, off, np_, nq in _blocks(f.source, Q, n):
            fi = f.component(i)
            for a in range(np_):
                for b in range(nq):
                    if i in tgt_off:
                        images.append(_tensor_vec(fi.images[a], b, nq, T.rank, tgt_off[i]))
                    else:
                        images.append(FreeVector.zero(T.ring.base, T.rank))
        comps[n] = ModuleMap(source.module(n), T, images, check=False)
    return ChainMap(source, target, comps, check=False)


def tensor_with_module(C: ModuleComplex, M: FpModule) -> ModuleComplex:
    """``C (x) M`` for a free complex ``C`` (termwise ``M^rank``)."""
    if not C.is_free():
        raise DomainError("tensor_with_module needs a free complex")
    if C.ring != M.ring:
        raise DomainError("complex and module over different rings")
    m = M.rank
    mods = [M.power(C.rank(n)) for n in C.degrees()]
    diffs = [scalar_matrix_map(C.matrix(n), mods[k], mods[k + 1], m) for k, n in enumerate(range(C.lo, C.hi))]
    return _make(C.ring, C.lo, mods, diffs)


def tensor_map_with_module(f: ChainMap, M: FpModule, source=None, target=None) -> ChainMap:
    source = source or tensor_with_module(f.source, M)
    target = target or tensor_with_module(f.target, M)
    comps = {n: scalar_matrix_map(f.component(n).matrix(), source.module(n), target.module(n), M.rank)
             for n in f.degrees() if source.module(n).rank and target.module(n).rank}
    return ChainMap(source, target, comps, check=False)


def _transpose(m: list, rows: int, cols: int) -> list:
    return [[m[i][j] for i in range(rows)] for j in range(cols)]


def hom_complex(P: ModuleComplex, M: FpModule) -> ModuleComplex:
    """``Hom(P, M)`` for a free complex ``P``: term ``M^rank(P^-n)`` in degree ``n``.

    The differential out of degree ``n`` is the transpose of ``d_P^(-n-1)``
    acting blockwise on ``M``.
    """
    if not P.is_free():
        raise DomainError("hom_complex needs a free complex")
    if P.ring != M.ring:
        raise DomainError("complex and module over different rings")
    m = M.rank
    lo = -P.hi
    mods = [M.power(P.rank(-n)) for n in range(lo, -P.lo + 1)]
    diffs = []
    for k, n in enumerate(range(lo, -P.lo)):
        D = P.matrix(-n - 1)
        T = _transpose(D, P.rank(-n), P.rank(-n - 1))
        diffs.append(scalar_matrix_map(T, mods[k], mods[k + 1], m))
    return _make(P.ring, lo, mods, diffs)


def hom_map(f: ChainMap, M: FpModule, source=None, target=None) -> ChainMap:
    """``Hom(f, M) : Hom(f.target, M) -> Hom(f.source, M)``."""
    source = source or hom_complex(f.target, M)
    target = target or hom_complex(f.source, M)
    comps = {}
    for n in target.degrees():
        F = f.component(-n).matrix()
        S, T = source.module(n), target.module(n)
        if S.rank and T.rank:
            comps[n] = scalar_matrix_map(_transpose(F, f.target.rank(-n), f.source.rank(-n)), S, T, M.rank)
    return ChainMap(source, target, comps, check=False)


def dual(P: ModuleComplex) -> ModuleComplex:
    return hom_complex(P, FpModule.free(P.ring, 1))


def cone(f: ChainMap) -> ModuleComplex:
    """``cone(f)^n = S^(n+1) (+) T^n`` with ``d(s, t) = (-d s, f(s) + d t)``."""
    S, T = f.source, f.target
    ring = S.ring
    base = ring.base
    lo = min(S.lo - 1, T.lo)
    hi = max(S.hi - 1, T.hi)
    mods = [direct_sum(S.module(n + 1), T.module(n)) for n in range(lo, hi + 1)]
    minus = base.constant(-1)
    diffs = []
    for k, n in enumerate(range(lo, hi)):
        src, tgt = mods[k], mods[k + 1]
        s_next = S.rank(n + 2)
        images = []
        dS = S.diff(n + 1)
        fn = f.component(n + 1)
        for i in range(S.rank(n + 1)):
            v = dS.images[i].scale(minus).embed(tgt.rank, 0) + fn.images[i].embed(tgt.rank, s_next)
            images.append(v)
        dT = T.diff(n)
        for j in range(T.rank(n)):
            images.append(dT.images[j].embed(tgt.rank, s_next))
        diffs.append(ModuleMap(src, tgt, images, check=False))
    return _make(ring, lo, mods, diffs)


def cone_inclusion(f: ChainMap, C: ModuleComplex | None = None) -> ChainMap:
    """``T -> cone(f)``, ``t -> (0, t)``."""
    C = C or cone(f)
    S, T = f.source, f.target
    comps = {}
    for n in T.degrees():
        off = S.rank(n + 1)
        comps[n] = ModuleMap(T.module(n), C.module(n), [e.embed(C.rank(n), off) for e in T.module(n).generators()], check=False)
    return ChainMap(T, C, comps, check=False)


def cone_projection(f: ChainMap, C: ModuleComplex | None = None) -> ChainMap:
    """``cone(f) -> S[1]``, ``(s, t) -> s``."""
    C = C or cone(f)
    S = f.source
    S1 = shift(S, 1)
    comps = {}
    for n in C.degrees():
        r = S.rank(n + 1)
        if not r:
            continue
        base = C.ring.base
        images = [FreeVector.unit(base, r, i) if i < r else FreeVector.zero(base, r) for i in range(C.rank(n))]
        comps[n] = ModuleMap(C.module(n), S1.module(n), images, check=False)
    return ChainMap(C, S1, comps, check=False)


def is_quasi_isomorphism(f: ChainMap, window: range | None = None) -> bool:
    """``f`` is a quasi-isomorphism on ``window`` iff its cone is acyclic on ``window``."""
    C = cone(f)
    window = window or C.degrees()
    return all(C.cohomology(n).is_zero() for n in window)


def exact_at(f: ModuleMap, g: ModuleMap) -> bool:
    """Exactness of ``X --f--> Y --g--> Z`` at ``Y``: ``g o f = 0`` and ``ker g`` inside ``im f``."""
    if not g.compose(f).is_zero():
        return False
    Y = f.target
    if Y.rank == 0:
        return True
    sq = kernel_subquotient(g)
    elim = Elimination(Y.ring.base, Y.rank, list(f.images), list(Y.gb.elements))
    return all(elim.express(z) is not None for z in sq.generator_lifts())
