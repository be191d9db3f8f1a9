"""Koszul complexes of sequences and their powers, transition maps, duals.

Degree ``-k`` of ``K(A; a)`` has basis ``e_S`` over ``k``-subsets ``S`` of
``{1..p}``.  Subsets are sorted ascending internally and ordered colexi-
cographically (by largest element first), which is exactly the order the
iterated tensor product ``K(a_1) (x) ... (x) K(a_p)`` produces.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

from .complexes import ChainMap, FreeComplex, dual, hom_complex, hom_map, tensor_complexes
from .errors import DomainError
from .modules import FpModule
from .rings import IdealSpec


@lru_cache(maxsize=None)
def subsets(p: int, k: int) -> tuple:
    """``k``-subsets of ``range(p)`` in colex order."""
    return tuple(sorted(combinations(range(p), k), key=lambda s: tuple(reversed(s))))


@dataclass(frozen=True)
class KoszulSpec:
    seq: IdealSpec
    power: int = 1

    def __post_init__(self):
        if self.power < 1:
            raise DomainError("Koszul power must be at least 1")

    @property
    def ring(self):
        return self.seq.ring

    @property
    def length(self) -> int:
        return len(self.seq)

    def elements(self) -> tuple:
        return tuple(self.ring.reduce(g ** self.power) for g in self.seq)


_complex_cache: dict = {}


def koszul_complex(spec_or_seq, power: int = 1) -> FreeComplex:
    """``K(A; a^j)`` in degrees ``-p..0``: ``d(e_S) = sum_t (-1)^t a_(s_t)^j e_(S - s_t)``."""
    spec = spec_or_seq if isinstance(spec_or_seq, KoszulSpec) else KoszulSpec(spec_or_seq, power)
    key = (spec.ring, spec.seq.generators, spec.power)
    if key in _complex_cache:
        return _complex_cache[key]
    ring = spec.ring
    base = ring.base
    a = spec.elements()
    p = spec.length
    ranks = [len(subsets(p, k)) for k in range(p, -1, -1)]
    mats = []
    for k in range(p, 0, -1):
        src = subsets(p, k)
        tgt = {s: i for i, s in enumerate(subsets(p, k - 1))}
        m = [[base.zero] * len(src) for _ in tgt]
        for col, S in enumerate(src):
            for t, s in enumerate(S):
                rest = S[:t] + S[t + 1:]
                m[tgt[rest]][col] = a[s] if t % 2 == 0 else -a[s]
        mats.append(m)
    K = FreeComplex(ring, -p, ranks, mats, check=False)
    _complex_cache[key] = K
    return K


def two_term(ring, f) -> FreeComplex:
    """``A --f--> A`` in degrees ``-1, 0``."""
    return FreeComplex(ring, -1, [1, 1], [[[ring(f)]]], check=False)


def koszul_by_tensor(seq: IdealSpec, power: int = 1):
    """The iterated tensor product of the two-term complexes ``K(a_i^j)``."""
    ring = seq.ring
    K = two_term(ring, seq[0] ** power)
    for g in seq.generators[1:]:
        K = tensor_complexes(K, two_term(ring, g ** power))
    return K


def _transition_matrices(seq: IdealSpec, j1: int, j0: int) -> dict:
    ring = seq.ring
    base = ring.base
    p = len(seq)
    out = {}
    for k in range(p + 1):
        S_list = subsets(p, k)
        n = len(S_list)
        m = [[base.zero] * n for _ in range(n)]
        for i, S in enumerate(S_list):
            f = base.one
            for s in S:
                f = f * seq[s] ** (j1 - j0)
            m[i][i] = ring.reduce(f)
        out[-k] = m
    return out


_transition_cache: dict = {}


def koszul_transition(seq: IdealSpec, j1: int, j0: int) -> ChainMap:
    """``K(A; a^j1) -> K(A; a^j0)``: multiplication by ``prod_(s in S) a_s^(j1-j0)`` on ``e_S``."""
    if j0 < 1 or j1 < j0:
        raise DomainError(f"need j1 >= j0 >= 1, got j1={j1}, j0={j0}")
    key = (seq.ring, seq.generators, j1, j0)
    if key not in _transition_cache:
        src = koszul_complex(seq, j1)
        tgt = koszul_complex(seq, j0)
        _transition_cache[key] = ChainMap.from_matrices(src, tgt, _transition_matrices(seq, j1, j0), check=False)
    return _transition_cache[key]


def dual_koszul(spec_or_seq, power: int = 1) -> FreeComplex:
    """``Hom(K(A; a^j), A)`` in degrees ``0..p``."""
    return dual(koszul_complex(spec_or_seq, power))


def koszul_hom(seq: IdealSpec, M: FpModule, power: int):
    """``Hom(K(A; a^j), M)``."""
    return hom_complex(koszul_complex(seq, power), M)


def koszul_hom_transition(seq: IdealSpec, M: FpModule, j0: int, j1: int, source=None, target=None) -> ChainMap:
    """``Hom(K(a^j0), M) -> Hom(K(a^j1), M)``, dual to the Koszul transition."""
    return hom_map(koszul_transition(seq, j1, j0), M, source, target)
