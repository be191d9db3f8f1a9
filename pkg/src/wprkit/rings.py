"""Quotient rings ``k[x]/I``, ideal sequences and adic truncations ``A/a^(k+1)``."""

from __future__ import annotations

from functools import cached_property
from itertools import combinations_with_replacement
from typing import Sequence

from .arith import QQ, Poly, PolyRing
from .errors import DomainError
from .groebner import GroebnerBasis, ideal_basis


class QuotientRing:
    """A finitely presented commutative ring ``base / I``.

    ``I`` is held as a reduced Groebner basis, so equality of ring elements
    is decided by normal forms.
    """

    def __init__(self, base: PolyRing, relations: Sequence = ()):
        self.base = base
        rels = [base(r) for r in relations]
        self.relations = ideal_basis(rels, base)

    @classmethod
    def polynomial(cls, names: Sequence[str], field=QQ, order="grevlex") -> QuotientRing:
        return cls(PolyRing(names, field, order))

    @classmethod
    def from_strings(cls, names: Sequence[str], relations: Sequence[str] = (), field=QQ, order="grevlex") -> QuotientRing:
        base = PolyRing(names, field, order)
        return cls(base, [base.parse(r) for r in relations])

    # -- elements
    @property
    def names(self):
        return self.base.names

    @property
    def field(self):
        return self.base.field

    @property
    def gens(self) -> tuple:
        return tuple(self.reduce(g) for g in self.base.gens)

    @property
    def one(self) -> Poly:
        return self.reduce(self.base.one)

    @property
    def zero(self) -> Poly:
        return self.base.zero

    def reduce(self, f) -> Poly:
        f = self.base(f)
        if self.relations.is_zero():
            return f
        return self.relations.reduce_poly(f)

    def __call__(self, x) -> Poly:
        return self.reduce(self.base(x))

    def parse(self, text: str) -> Poly:
        return self.reduce(self.base.parse(text))

    def is_zero(self, f: Poly) -> bool:
        return self.reduce(f).is_zero()

    def equal(self, f: Poly, g: Poly) -> bool:
        return self.is_zero(self.base(f) - self.base(g))

    def is_polynomial_ring(self) -> bool:
        return self.relations.is_zero()

    def is_zero_ring(self) -> bool:
        return self.relations.is_unit()

    # -- constructions
    def quotient(self, extra: Sequence) -> QuotientRing:
        """The ring ``base / (I + extra)``."""
        return QuotientRing(self.base, list(self.relations.polys()) + [self.base(e) for e in extra])

    def adjoin(self, names: Sequence[str]) -> QuotientRing:
        """``A[names]``: the same relations in a polynomial ring with more variables."""
        clash = set(names) & set(self.base.names)
        if clash:
            raise DomainError(f"variables {sorted(clash)} already exist")
        big = self.base.extend(names)
        return QuotientRing(big, [self.base.embed(r, big) for r in self.relations.polys()])

    def embed(self, f: Poly, target: QuotientRing) -> Poly:
        return target.reduce(self.base.embed(f, target.base))

    def contains_relations_of(self, other: QuotientRing) -> bool:
        """True when every relation of ``other`` holds here (so ``other -> self`` is a quotient map)."""
        if other.base != self.base:
            return False
        return all(self.relations.contains_poly(r) for r in other.relations.polys())

    def ideal_gb(self, gens: Sequence[Poly]) -> GroebnerBasis:
        """Groebner basis in ``base`` of ``(gens) + I``; ideals of the quotient live here."""
        return ideal_basis([self.base(g) for g in gens] + list(self.relations.polys()), self.base)

    @cached_property
    def _frozen(self):
        return (self.base, frozenset(self.relations.elements))

    def __eq__(self, other):
        return isinstance(other, QuotientRing) and self._frozen == other._frozen

    def __hash__(self):
        return hash(self._frozen)

    def __str__(self):
        if self.relations.is_zero():
            return str(self.base)
        return f"{self.base}/({', '.join(str(p) for p in self.relations.polys())})"

    def __repr__(self):
        return f"QuotientRing({self})"


RingPresentation = QuotientRing


class IdealSpec:
    """A finite sequence ``a = (a_1, ..., a_p)`` of ring elements, generating an ideal."""

    def __init__(self, ring: QuotientRing, generators: Sequence):
        gens = tuple(ring.reduce(g) for g in generators)
        if not gens:
            raise DomainError("an ideal sequence needs at least one generator")
        self.ring = ring
        self.generators = gens

    @classmethod
    def parse(cls, ring: QuotientRing, texts: Sequence[str]) -> IdealSpec:
        return cls(ring, [ring.parse(t) for t in texts])

    def __len__(self):
        return len(self.generators)

    def __iter__(self):
        return iter(self.generators)

    def __getitem__(self, i):
        return self.generators[i]

    def power_generators(self, k: int) -> tuple:
        """All ``k``-fold products of the generators, spanning ``a^k``."""
        if k < 0:
            raise DomainError("negative ideal power")
        if k == 0:
            return (self.ring.one,)
        seen = []
        for combo in combinations_with_replacement(range(len(self.generators)), k):
            f = self.ring.base.one
            for i in combo:
                f = f * self.generators[i]
            f = self.ring.reduce(f)
            if f and f not in seen:
                seen.append(f)
        return tuple(seen)

    def powers(self, j: int) -> IdealSpec:
        """The sequence ``a^j = (a_1^j, ..., a_p^j)``."""
        return IdealSpec(self.ring, [g ** j for g in self.generators])

    def gb(self) -> GroebnerBasis:
        return self.ring.ideal_gb(self.generators)

    def power_gb(self, k: int) -> GroebnerBasis:
        return self.ring.ideal_gb(self.power_generators(k))

    def extend_to(self, ring: QuotientRing) -> IdealSpec:
        """The generated ideal in a ring whose variables extend ours."""
        return IdealSpec(ring, [self.ring.embed(g, ring) for g in self.generators])

    def over(self, ring: QuotientRing) -> IdealSpec:
        """The same generators read in a quotient ring of ours."""
        if ring.base != self.ring.base:
            raise DomainError("rings have different polynomial bases")
        return IdealSpec(ring, self.generators)

    def __eq__(self, other):
        return isinstance(other, IdealSpec) and self.ring == other.ring and self.generators == other.generators

    def __hash__(self):
        return hash((self.ring, self.generators))

    def __str__(self):
        return "(" + ", ".join(str(g) for g in self.generators) + ")"

    def __repr__(self):
        return f"IdealSpec{self}"


def truncate_ring(A: QuotientRing, a: IdealSpec, k: int) -> QuotientRing:
    """Presentation of ``A_k = A / a^(k+1)``."""
    if k < 0:
        raise DomainError("truncation level must be nonnegative")
    if a.ring != A:
        raise DomainError("the ideal is not an ideal of this ring")
    return A.quotient(a.power_generators(k + 1))
