"""Finitely presented modules over quotient rings, and maps between them.

A module over ``A = S/I`` with ``rank`` generators is stored through its
``A``-relations (vectors in ``S^rank``).  All membership questions are
answered in ``S^rank`` against the submodule spanned by the relations and
``I * S^rank``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Sequence

from .arith import Poly, determinant, mono_divides
from .errors import DomainError
from .groebner import Elimination, FreeVector, GroebnerBasis, combine, ideal_basis
from .rings import QuotientRing


def _reduce_vector(ring: QuotientRing, v: FreeVector) -> FreeVector:
    if ring.relations.is_zero() or not v.terms:
        return v
    return FreeVector.from_polys(ring.base, [ring.reduce(p) for p in v.components()])


class FpModule:
    """A finitely presented module ``A^rank / <relations>``."""

    def __init__(self, ring: QuotientRing, rank: int, relations: Sequence[FreeVector] = ()):
        if rank < 0:
            raise DomainError("negative rank")
        rels = []
        seen = set()
        for r in relations:
            if r.ring != ring.base or r.rank != rank:
                raise DomainError("relation is not a vector of the right free module")
            r = _reduce_vector(ring, r)
            if r.terms and r not in seen:
                seen.add(r)
                rels.append(r)
        self.ring = ring
        self.rank = rank
        self.relations = tuple(rels)

    # -- constructors
    @classmethod
    def free(cls, ring: QuotientRing, rank: int) -> FpModule:
        return cls(ring, rank, ())

    @classmethod
    def zero(cls, ring: QuotientRing) -> FpModule:
        return cls(ring, 0, ())

    @classmethod
    def cyclic(cls, ring: QuotientRing, ideal: Sequence) -> FpModule:
        """``A / (ideal)``."""
        base = ring.base
        return cls(ring, 1, [FreeVector.from_polys(base, [ring(f)]) for f in ideal])

    @classmethod
    def from_rows(cls, ring: QuotientRing, rank: int, rows: Sequence[Sequence]) -> FpModule:
        return cls(ring, rank, [FreeVector.from_polys(ring.base, [ring(x) for x in row]) for row in rows])

    # -- structure
    @property
    def base(self):
        return self.ring.base

    @cached_property
    def gb(self) -> GroebnerBasis:
        gens = list(self.relations)
        base = self.ring.base
        for g in self.ring.relations.polys():
            for i in range(self.rank):
                gens.append(FreeVector.from_polys(base, [g]).embed(self.rank, i))
        return GroebnerBasis.compute(gens, base, self.rank, "pot")

    def generator(self, i: int) -> FreeVector:
        return FreeVector.unit(self.ring.base, self.rank, i)

    def generators(self) -> list:
        return [self.generator(i) for i in range(self.rank)]

    def element(self, polys: Sequence) -> FreeVector:
        if len(polys) != self.rank:
            raise DomainError(f"expected {self.rank} components")
        return self.reduce(FreeVector.from_polys(self.ring.base, [self.ring(p) for p in polys]))

    def reduce(self, v: FreeVector) -> FreeVector:
        if self.rank == 0:
            return FreeVector.zero(self.ring.base, 0)
        return self.gb.normal_form(v)

    def is_zero_element(self, v: FreeVector) -> bool:
        return self.rank == 0 or self.gb.contains(v)

    def is_zero(self) -> bool:
        return all(self.is_zero_element(e) for e in self.generators())

    def is_free_presentation(self) -> bool:
        return not self.relations

    def presentation_matrix(self) -> list:
        """Relation rows, as lists of ring elements."""
        return [r.components() for r in self.relations]

    def ambient_relations(self) -> list:
        """Generators of the full relation submodule of ``S^rank`` (includes ``I * S^rank``)."""
        return list(self.gb.elements)

    def power(self, r: int) -> FpModule:
        """Direct sum of ``r`` copies; generator ``(block j, gen l)`` has index ``j*rank + l``."""
        m = self.rank
        rels = [rel.embed(m * r, j * m) for j in range(r) for rel in self.relations]
        return FpModule(self.ring, m * r, rels)

    def change_ring(self, ring: QuotientRing) -> FpModule:
        """Base change to a quotient ring ``ring`` of ``self.ring`` (i.e. ``-(x)_A ring``)."""
        if not ring.contains_relations_of(self.ring):
            raise DomainError(f"{ring} is not a quotient of {self.ring}")
        return FpModule(ring, self.rank, self.relations)

    def simplify(self) -> FpModule:
        return prune(self).module

    def __str__(self):
        if self.rank == 0:
            return "0"
        if not self.relations:
            return f"A^{self.rank}"
        rows = "; ".join(str(r) for r in self.relations)
        return f"A^{self.rank}/<{rows}>"

    def __repr__(self):
        return f"FpModule({self} over {self.ring})"


def direct_sum(*mods: FpModule) -> FpModule:
    if not mods:
        raise DomainError("empty direct sum")
    ring = mods[0].ring
    total = sum(m.rank for m in mods)
    rels = []
    off = 0
    for M in mods:
        if M.ring != ring:
            raise DomainError("direct sum of modules over different rings")
        rels.extend(r.embed(total, off) for r in M.relations)
        off += M.rank
    return FpModule(ring, total, rels)


# ---------------------------------------------------------------------------
# maps


class ModuleMap:
    """A homomorphism given by the images of the source generators."""

    def __init__(self, source: FpModule, target: FpModule, images: Sequence[FreeVector], check: bool = True):
        if source.ring.base != target.ring.base:
            raise DomainError("source and target live over different polynomial rings")
        if len(images) != source.rank:
            raise DomainError(f"need {source.rank} images, got {len(images)}")
        for v in images:
            if v.rank != target.rank or v.ring != target.ring.base:
                raise DomainError("image vector is not in the target's free module")
        self.source = source
        self.target = target
        self.images = tuple(target.reduce(v) for v in images)
        if check:
            self._check()

    @classmethod
    def from_matrix(cls, source: FpModule, target: FpModule, rows: Sequence[Sequence], check: bool = True) -> ModuleMap:
        """Matrix with rows = target generators and columns = source generators."""
        base = target.ring.base
        if len(rows) != target.rank or any(len(r) != source.rank for r in rows):
            raise DomainError("matrix shape does not match the modules")
        images = [
            FreeVector.from_polys(base, [target.ring(rows[i][j]) for i in range(target.rank)])
            for j in range(source.rank)
        ]
        return cls(source, target, images, check)

    @classmethod
    def identity(cls, M: FpModule) -> ModuleMap:
        return cls(M, M, M.generators(), check=False)

    @classmethod
    def zero_map(cls, source: FpModule, target: FpModule) -> ModuleMap:
        return cls(source, target, [FreeVector.zero(target.ring.base, target.rank)] * source.rank, check=False)

    @classmethod
    def canonical(cls, source: FpModule, target: FpModule) -> ModuleMap:
        """Generator ``i`` to generator ``i`` (e.g. a quotient map ``M -> M/N``)."""
        if source.rank != target.rank:
            raise DomainError("canonical map needs equal generator counts")
        return cls(source, target, target.generators())

    def _check(self):
        tgt = self.target
        for rel in self.source.relations:
            if not tgt.is_zero_element(self.apply(rel)):
                raise DomainError(f"map is not well defined: relation {rel} does not map to zero")
        if not tgt.ring.contains_relations_of(self.source.ring):
            for g in self.source.ring.relations.polys():
                for v in self.images:
                    if not tgt.is_zero_element(v.scale(g)):
                        raise DomainError("map is not well defined over the source ring")

    def apply(self, v: FreeVector) -> FreeVector:
        """Image of a vector in the source cover (result not reduced)."""
        if v.rank != self.source.rank:
            raise DomainError("vector is not in the source cover")
        return combine(self.images, v, self.target.ring.base, self.target.rank)

    def __call__(self, v: FreeVector) -> FreeVector:
        return self.target.reduce(self.apply(v))

    def compose(self, inner: ModuleMap) -> ModuleMap:
        """``self o inner``."""
        if inner.target.rank != self.source.rank:
            raise DomainError("maps are not composable")
        return ModuleMap(inner.source, self.target, [self.apply(v) for v in inner.images], check=False)

    def __matmul__(self, inner: ModuleMap) -> ModuleMap:
        return self.compose(inner)

    def is_zero(self) -> bool:
        return all(v.is_zero() for v in self.images)

    def is_identity(self) -> bool:
        return self.source.rank == self.target.rank and all(
            self.target.is_zero_element(v - e) for v, e in zip(self.images, self.target.generators())
        )

    def equals(self, other: ModuleMap) -> bool:
        return self.source.rank == other.source.rank and all(
            self.target.is_zero_element(u - v) for u, v in zip(self.images, other.images)
        )

    def matrix(self) -> list:
        base = self.target.ring.base
        rows = [[base.zero] * self.source.rank for _ in range(self.target.rank)]
        for j, v in enumerate(self.images):
            for i, p in enumerate(v.components()):
                rows[i][j] = p
        return rows

    def matrix_strings(self) -> list:
        return [[str(p) for p in row] for row in self.matrix()]

    def __repr__(self):
        return f"ModuleMap({self.matrix_strings()})"


def scalar_matrix_map(D: Sequence[Sequence], source: FpModule, target: FpModule, m: int) -> ModuleMap:
    """The map ``M^b -> M^a`` induced by an ``a x b`` ring matrix, where ``M`` has ``m`` generators."""
    a = len(D)
    b = source.rank // m if m else 0
    base = target.ring.base
    images = []
    for j in range(b):
        col = [D[i][j] for i in range(a)]
        for l in range(m):
            terms = {}
            for i, p in enumerate(col):
                for mono, c in p.terms.items():
                    terms[(i * m + l, mono)] = c
            images.append(FreeVector(base, target.rank, terms))
    return ModuleMap(source, target, images, check=False)


# ---------------------------------------------------------------------------
# pruning


@dataclass
class Pruned:
    module: FpModule
    to_new: list  # image of each old generator, in the new cover
    to_old: list  # each new generator, in the old cover


def prune(M: FpModule) -> Pruned:
    """Eliminate generators that occur with a unit coefficient in some relation."""
    ring = M.ring
    base = ring.base
    n = M.rank
    rows = [{i: p for i, p in enumerate(r.components()) if p} for r in M.relations]
    expr = {i: {i: base.one} for i in range(n)}
    alive = set(range(n))

    def red(p):
        return ring.reduce(p)

    while True:
        best = None
        for ri, row in enumerate(rows):
            for c, p in row.items():
                if p.is_constant():
                    cand = (len(row), sum(len(q.terms) for q in row.values()), c, ri)
                    if best is None or cand < best:
                        best = cand
        if best is None:
            break
        _, _, c, ri = best
        row = rows.pop(ri)
        u = row[c].constant_value()
        sub = {i: red(-(p / u)) for i, p in row.items() if i != c}
        new_rows = []
        for other in rows:
            if c in other:
                f = other.pop(c)
                for i, p in sub.items():
                    v = red(other.get(i, base.zero) + f * p)
                    if v:
                        other[i] = v
                    else:
                        other.pop(i, None)
            if other:
                new_rows.append(other)
        rows = new_rows
        for e in expr.values():
            if c in e:
                f = e.pop(c)
                for i, p in sub.items():
                    v = red(e.get(i, base.zero) + f * p)
                    if v:
                        e[i] = v
                    else:
                        e.pop(i, None)
        alive.discard(c)

    order = sorted(alive)
    newidx = {old: k for k, old in enumerate(order)}
    r = len(order)

    def vec(d):
        terms = {}
        for i, p in d.items():
            for mono, co in p.terms.items():
                terms[(newidx[i], mono)] = co
        return FreeVector(base, r, terms)

    module = FpModule(ring, r, [vec(row) for row in rows])
    to_new = [vec(expr[i]) for i in range(n)]
    to_old = [FreeVector.unit(base, n, old) for old in order]
    return Pruned(module, to_new, to_old)


# ---------------------------------------------------------------------------
# subquotients


class Subquotient:
    """``(<cycles> + B) / B`` inside ``ambient``, where ``B`` = boundaries + relations.

    ``module`` is a pruned presentation; ``coordinates`` and ``lift`` move
    between it and the ambient cover.
    """

    def __init__(self, ambient: FpModule, cycles: Sequence[FreeVector], boundaries: Sequence[FreeVector] = ()):
        self.ambient = ambient
        self.cycles = list(cycles)
        self.boundaries = list(boundaries)
        base = ambient.ring.base
        self._elim = Elimination(base, ambient.rank, self.cycles, self.boundaries + list(ambient.gb.elements))
        raw = FpModule(ambient.ring, len(self.cycles), self._elim.relations())
        p = prune(raw)
        self.module = p.module
        self._to_new = p.to_new
        self._to_old = p.to_old

    def coordinates(self, v: FreeVector) -> FreeVector:
        """Coordinates in ``module`` of an ambient vector lying in ``<cycles> + B``."""
        c = self._elim.express(v)
        if c is None:
            raise DomainError(f"{v} does not lie in the subquotient")
        base = self.ambient.ring.base
        return self.module.reduce(combine(self._to_new, c, base, self.module.rank))

    def contains(self, v: FreeVector) -> bool:
        return self._elim.express(v) is not None

    def lift(self, u: FreeVector) -> FreeVector:
        """An ambient representative of a module element."""
        base = self.ambient.ring.base
        old = combine(self._to_old, u, base, len(self.cycles))
        return combine(self.cycles, old, base, self.ambient.rank)

    def generator_lifts(self) -> list:
        return [self.lift(e) for e in self.module.generators()]

    def inclusion(self) -> ModuleMap:
        """The map ``module -> ambient`` (meaningful when there are no boundaries)."""
        return ModuleMap(self.module, self.ambient, self.generator_lifts(), check=False)


def kernel(f: ModuleMap):
    """``ker f`` as a module together with its inclusion into the source."""
    tgt = f.target
    base = tgt.ring.base
    K = Elimination(base, tgt.rank, list(f.images), list(tgt.gb.elements)).relations()
    sq = Subquotient(f.source, K)
    return sq.module, sq.inclusion()


def kernel_subquotient(f: ModuleMap) -> Subquotient:
    tgt = f.target
    base = tgt.ring.base
    K = Elimination(base, tgt.rank, list(f.images), list(tgt.gb.elements)).relations()
    return Subquotient(f.source, K)


def cokernel(f: ModuleMap) -> FpModule:
    """``target / im f``, keeping the target's generators."""
    tgt = f.target
    return FpModule(tgt.ring, tgt.rank, list(tgt.relations) + list(f.images))


def image(f: ModuleMap):
    """``im f`` as a module together with its inclusion into the target."""
    sq = Subquotient(f.target, list(f.images))
    return sq.module, sq.inclusion()


def is_surjective(f: ModuleMap) -> bool:
    return cokernel(f).is_zero()


def is_injective(f: ModuleMap) -> bool:
    return kernel(f)[0].is_zero()


def is_isomorphism(f: ModuleMap) -> bool:
    return find_inverse(f) is not None


def find_inverse(f: ModuleMap):
    """A two-sided inverse of ``f`` found by solving over the presentations, or None."""
    X, Y = f.source, f.target
    base = Y.ring.base
    elim = Elimination(base, Y.rank, list(f.images), list(Y.gb.elements))
    images = []
    for e in Y.generators():
        c = elim.express(e)
        if c is None:
            return None
        images.append(c)
    try:
        g = ModuleMap(Y, X, images)
    except DomainError:
        return None
    if not g.compose(f).is_identity() or not f.compose(g).is_identity():
        return None
    return g


def tensor(M: FpModule, N: FpModule) -> FpModule:
    """``M (x) N``; generator ``(i, j)`` has index ``i * N.rank + j``."""
    if M.ring != N.ring:
        raise DomainError("tensor product over different rings")
    m, n = M.rank, N.rank
    base = M.ring.base
    rels = []
    for r in M.relations:
        comps = r.components()
        for j in range(n):
            rels.append(FreeVector.from_polys(base, [comps[i] if jj == j else base.zero for i in range(m) for jj in range(n)]))
    for r in N.relations:
        comps = r.components()
        for i in range(m):
            rels.append(FreeVector.from_polys(base, [comps[jj] if ii == i else base.zero for ii in range(m) for jj in range(n)]))
    return FpModule(M.ring, m * n, rels)


def tensor_over_quotient(M: FpModule, a, k: int) -> FpModule:
    """``M_k = M / a^(k+1) M`` as a module over the same ring."""
    if a.ring != M.ring:
        raise DomainError("the ideal is not an ideal of the module's ring")
    base = M.ring.base
    rels = list(M.relations)
    for g in a.power_generators(k + 1):
        for i in range(M.rank):
            rels.append(FreeVector.from_polys(base, [g]).embed(M.rank, i))
    return FpModule(M.ring, M.rank, rels)


def submodule_times_ideal(M: FpModule, gens: Sequence[Poly]) -> list:
    """Vectors spanning ``J * M`` in the cover, for ``J = (gens)``."""
    return [M.generator(i).scale(g) for g in gens for i in range(M.rank)]


# ---------------------------------------------------------------------------
# ideals attached to modules


def annihilator(M: FpModule) -> GroebnerBasis:
    """``ann(M)`` as an ideal of the base polynomial ring (containing the ring relations)."""
    ring = M.ring
    r = M.rank
    if r == 0:
        return ring.ideal_gb([ring.base.one])
    big = M.power(r)
    base = ring.base
    v = FreeVector(base, r * r, {(j * r + j, base.unit_mono): base.field.one for j in range(r)})
    f = ModuleMap(FpModule.free(ring, 1), big, [v], check=False)
    K = Elimination(base, big.rank, [v], list(big.gb.elements)).relations()
    polys = [k.component(0) for k in K]
    return ring.ideal_gb(polys)


def _trim_rows(M: FpModule) -> list:
    """Drop relation rows implied by the others (keeps a generating subset)."""
    rows = sorted(M.relations, key=lambda r: (len(r.terms), r.frozen()))
    base = M.ring.base
    ring_part = []
    for g in M.ring.relations.polys():
        for i in range(M.rank):
            ring_part.append(FreeVector.from_polys(base, [g]).embed(M.rank, i))
    kept = []
    for k, r in enumerate(rows):
        rest = kept + rows[k + 1:]
        gb = GroebnerBasis.compute(rest + ring_part, base, M.rank, "pot")
        if not gb.contains(r):
            kept.append(r)
    return kept


def fitting_ideal(M: FpModule, r: int) -> GroebnerBasis:
    """``Fitt_r(M)``: the ideal of ``(rank - r)``-minors of the presentation matrix."""
    if r < 0:
        raise DomainError("Fitting index must be nonnegative")
    ring = M.ring
    P = prune(M).module
    n = P.rank
    s = n - r
    if s <= 0:
        return ring.ideal_gb([ring.base.one])
    rows = _trim_rows(P) if len(P.relations) > s else list(P.relations)
    mat = [row.components() for row in rows]
    if s > len(mat):
        return ring.ideal_gb([])
    minors = []
    for rs in combinations(range(len(mat)), s):
        for cs in combinations(range(n), s):
            sub = [[mat[i][j] for j in cs] for i in rs]
            d = ring.reduce(determinant(sub, ring.base))
            if d:
                minors.append(d)
    return ring.ideal_gb(minors)


def ideal_is_zero(ring: QuotientRing, gb: GroebnerBasis) -> bool:
    return all(ring.relations.contains_poly(p) for p in gb.polys())


def ideal_is_unit(gb: GroebnerBasis) -> bool:
    return gb.is_unit()


def ideal_is_idempotent(ring: QuotientRing, gb: GroebnerBasis) -> bool:
    gens = gb.polys()
    sq = ring.ideal_gb([f * g for i, f in enumerate(gens) for g in gens[i:]])
    return all(sq.contains_poly(f) for f in gens)


@dataclass
class ProjectivityResult:
    verdict: str  # "yes", "no" or "inconclusive"
    rank: int | None = None
    detail: str = ""
    fitting: list = field(default_factory=list)

    def __bool__(self):
        return self.verdict == "yes"


def is_projective_const_rank(M: FpModule) -> ProjectivityResult:
    """Decide whether ``M`` is projective of constant rank via its Fitting ideals.

    ``yes(r)`` when ``Fitt_(r-1) = 0`` and ``Fitt_r = (1)``.  Otherwise, if
    every Fitting ideal is idempotent the module is locally free of
    non-constant rank and the verdict is ``inconclusive``; a non-idempotent
    Fitting ideal certifies ``no``.
    """
    ring = M.ring
    P = prune(M).module
    n = P.rank
    fits = [fitting_ideal(P, i) for i in range(n + 1)]
    for r in range(n + 1):
        prev_zero = True if r == 0 else ideal_is_zero(ring, fits[r - 1])
        if prev_zero and fits[r].is_unit():
            return ProjectivityResult("yes", r, f"Fitt_{r - 1} = 0 and Fitt_{r} = (1)", fits)
    for i, F in enumerate(fits):
        if not ideal_is_idempotent(ring, F):
            return ProjectivityResult("no", None, f"Fitt_{i} is not idempotent", fits)
    return ProjectivityResult("inconclusive", None, "all Fitting ideals idempotent: locally free of non-constant rank", fits)


# ---------------------------------------------------------------------------
# resolutions and Tor


def free_resolution(M: FpModule, length: int) -> tuple:
    """Ranks ``f_0..f_length`` and matrices ``D_1..D_length`` (``D_k: A^f_k -> A^f_(k-1)``)."""
    ring = M.ring
    base = ring.base
    ranks = [M.rank]
    cols = list(M.relations)
    mats = []
    for k in range(1, length + 1):
        ranks.append(len(cols))
        prev = ranks[k - 1]
        mats.append([[c.component(i) for c in cols] for i in range(prev)])
        if k == length:
            break
        ideal_part = []
        for g in ring.relations.polys():
            for i in range(prev):
                ideal_part.append(FreeVector.from_polys(base, [g]).embed(prev, i))
        rel = Elimination(base, prev, cols, ideal_part).relations() if cols else []
        nxt = []
        seen = set()
        for v in rel:
            v = _reduce_vector(ring, v)
            if v.terms and v not in seen:
                seen.add(v)
                nxt.append(v)
        cols = nxt
    return ranks, mats


def homology_at(middle: FpModule, d_in: ModuleMap | None, d_out: ModuleMap | None) -> Subquotient:
    """``ker(d_out) / im(d_in)`` at ``middle``."""
    base = middle.ring.base
    if d_out is None or d_out.target.rank == 0:
        cycles = middle.generators()
    else:
        tgt = d_out.target
        cycles = Elimination(base, tgt.rank, list(d_out.images), list(tgt.gb.elements)).relations()
    boundaries = list(d_in.images) if d_in is not None else []
    return Subquotient(middle, cycles, boundaries)


def tor(M: FpModule, N: FpModule, i: int) -> FpModule:
    """``Tor_i(M, N)`` from a free resolution of ``M`` tensored with ``N``."""
    if i < 0:
        raise DomainError("Tor degree must be nonnegative")
    if M.ring != N.ring:
        raise DomainError("Tor of modules over different rings")
    ranks, mats = free_resolution(M, i + 1)
    n = N.rank
    mods = [N.power(r) for r in ranks]
    d_out = scalar_matrix_map(mats[i - 1], mods[i], mods[i - 1], n) if i >= 1 else None
    d_in = scalar_matrix_map(mats[i], mods[i + 1], mods[i], n) if len(mats) > i else None
    return homology_at(mods[i], d_in, d_out).module


# ---------------------------------------------------------------------------
# invariants


def vector_space_dim(M: FpModule):
    """``dim_k M`` when finite, else None."""
    if M.rank == 0:
        return 0
    nv = M.ring.base.nvars
    by_comp = {i: [] for i in range(M.rank)}
    key = M.gb._key
    for e in M.gb.elements:
        c, mono = max(e.terms, key=key)
        by_comp[c].append(mono)
    total = 0
    for c in range(M.rank):
        lts = by_comp[c]
        bounds = []
        for v in range(nv):
            pure = [m[v] for m in lts if all(m[w] == 0 for w in range(nv) if w != v)]
            if not pure:
                return None
            bounds.append(min(pure))
        if any(sum(m) == 0 for m in lts):
            continue
        stack = [(0,) * nv]
        seen = {stack[0]}
        while stack:
            mono = stack.pop()
            if any(mono_divides(l, mono) for l in lts):
                continue
            total += 1
            for v in range(nv):
                nxt = mono[:v] + (mono[v] + 1,) + mono[v + 1:]
                if nxt[v] < bounds[v] and nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
    return total


def invariants(M: FpModule) -> dict:
    """Isomorphism invariants: annihilator, Fitting ideals and k-dimension."""
    P = prune(M).module
    return {
        "annihilator": annihilator(P),
        "fitting": [fitting_ideal(P, i) for i in range(P.rank + 1)],
        "dim": vector_space_dim(P),
    }


def same_invariants(M: FpModule, N: FpModule) -> bool:
    """Compare invariant fingerprints.  Equal fingerprints do not prove isomorphism."""
    a, b = invariants(M), invariants(N)
    if a["dim"] != b["dim"]:
        return False
    if not a["annihilator"].same_submodule(b["annihilator"]):
        return False
    fa, fb = a["fitting"], b["fitting"]
    n = max(len(fa), len(fb))
    unit = M.ring.ideal_gb([M.ring.base.one])
    fa = fa + [unit] * (n - len(fa))
    fb = fb + [unit] * (n - len(fb))
    return all(x.same_submodule(y) for x, y in zip(fa, fb))


def same_submodule_quotient(M: FpModule, N: FpModule) -> bool:
    """True when ``M`` and ``N`` are the same quotient of the same free module."""
    return M.rank == N.rank and M.ring == N.ring and M.gb.same_submodule(N.gb)
