"""Adic completion and torsion at finite level, Complete Nakayama lifting, adic flatness.

A complete module is never materialized: it is represented by its tower
``M_k = M / a^(k+1) M`` together with certificates about that tower.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import DomainError, NotSurjectiveError
from .groebner import Elimination, FreeVector, combine
from .modules import (
    FpModule,
    ModuleMap,
    Subquotient,
    cokernel,
    is_projective_const_rank,
    same_submodule_quotient,
    tensor_over_quotient,
    tor,
    vector_space_dim,
)
from .rings import IdealSpec, truncate_ring
from .towers import INCONCLUSIVE, Certificate, DirectSystem, ModuleTower, module_to_json, ring_to_json, stabilization


def _check_same_ring(M: FpModule, a: IdealSpec):
    if a.ring != M.ring:
        raise DomainError(f"the ideal {a} is not an ideal of the module's ring {M.ring}")


# ---------------------------------------------------------------------------
# completion


class CompletionTower:
    """Levels ``M_k = M (x) A_k`` for ``k = 0..kmax`` with the canonical surjections."""

    def __init__(self, M: FpModule, a: IdealSpec, kmax: int):
        if kmax < 1:
            raise DomainError("completion tower needs kmax >= 1")
        _check_same_ring(M, a)
        self.module = M
        self.ideal = a
        self.kmax = kmax
        self.tower = ModuleTower(self.level, self.transition, 0, kmax, f"completion of {M}")

    def level(self, k: int) -> FpModule:
        return tensor_over_quotient(self.module, self.ideal, k)

    def level_over_truncation(self, k: int) -> FpModule:
        """``M_k`` as a module over ``A_k``."""
        return self.level(k).change_ring(truncate_ring(self.module.ring, self.ideal, k))

    def transition(self, k: int) -> ModuleMap:
        """``M_(k+1) -> M_k``."""
        return ModuleMap.canonical(self.tower.level(k + 1), self.tower.level(k))

    def surjective_transitions(self) -> bool:
        return all(cokernel(self.tower.transition(k)).is_zero() for k in range(self.kmax))

    def level_compatible(self, k: int, k2: int) -> bool:
        """``(M_k2) (x) A_k`` equals ``M_k`` as a quotient of the same free module."""
        if k2 < k:
            raise DomainError("need k2 >= k")
        return same_submodule_quotient(tensor_over_quotient(self.tower.level(k2), self.ideal, k), self.tower.level(k))

    def stabilization(self) -> Certificate:
        return stabilization(self.tower, self.kmax)

    def dims(self) -> list:
        return [vector_space_dim(self.tower.level(k)) for k in range(self.kmax + 1)]


def completion_tower(M: FpModule, a: IdealSpec, kmax: int) -> CompletionTower:
    return CompletionTower(M, a, kmax)


@dataclass
class CompleteElement:
    """Coherent representatives ``reps[k]`` of an element of the completion, ``k = 0..precision``."""

    module: FpModule
    ideal: IdealSpec
    reps: dict

    @property
    def precision(self) -> int:
        return max(self.reps)

    def at(self, k: int) -> FreeVector:
        return tensor_over_quotient(self.module, self.ideal, k).reduce(self.reps[k])

    def is_coherent(self) -> bool:
        for k in range(self.precision):
            Mk = tensor_over_quotient(self.module, self.ideal, k)
            if not Mk.is_zero_element(self.reps[k + 1] - self.reps[k]):
                return False
        return True

    @classmethod
    def constant(cls, M: FpModule, a: IdealSpec, v: FreeVector, precision: int) -> CompleteElement:
        return cls(M, a, {k: tensor_over_quotient(M, a, k).reduce(v) for k in range(precision + 1)})


# ---------------------------------------------------------------------------
# torsion


def annihilated_by(M: FpModule, gens) -> Subquotient:
    """``{m in M : g m = 0 for every g in gens}`` as a subquotient of ``M``."""
    base = M.ring.base
    r = M.rank
    gens = list(gens)
    big = M.power(len(gens))
    images = []
    for i in range(r):
        terms = {}
        for b, g in enumerate(gens):
            for mono, c in g.terms.items():
                terms[(b * r + i, mono)] = c
        images.append(FreeVector(base, big.rank, terms))
    K = Elimination(base, big.rank, images, list(big.gb.elements)).relations()
    return Subquotient(M, K)


@dataclass
class TorsionResult:
    module: FpModule
    inclusion: ModuleMap | None
    certificate: Certificate
    index: int | None
    whole: bool | None
    zero: bool | None

    @property
    def certified(self) -> bool:
        return self.certificate.certified


def torsion_chain(M: FpModule, a: IdealSpec, bound: int) -> DirectSystem:
    """The ascending chain ``ann_M(a^i)``, ``i = 1..bound``, with inclusion maps."""
    cache = {}

    def sq(i):
        if i not in cache:
            cache[i] = annihilated_by(M, a.power_generators(i))
        return cache[i]

    def inc(i):
        lo, hi = sq(i), sq(i + 1)
        return ModuleMap(lo.module, hi.module, [hi.coordinates(lo.lift(e)) for e in lo.module.generators()], check=False)

    system = DirectSystem(lambda i: sq(i).module, inc, 1, bound, f"ann_M(a^i) for M = {M}")
    system.subquotient = sq
    return system


def torsion_submodule(M: FpModule, a: IdealSpec, bound: int) -> TorsionResult:
    """``Gamma_a(M)`` from the chain ``ann_M(a^i)``.

    Once two consecutive members agree the chain is constant from there on
    (``a^(i+2) m = 0`` forces ``a m`` into ``ann(a^(i+1)) = ann(a^i)``), so a
    single verified isomorphism certifies the value.  The chain is built to
    ``bound + 1`` so that level ``bound`` can be tested.
    """
    if bound < 1:
        raise DomainError("torsion bound must be at least 1")
    _check_same_ring(M, a)
    chain = torsion_chain(M, a, bound + 1)
    cert = None
    evidence = []
    for i in range(1, bound + 1):
        c = stabilization(_window(chain, i))
        evidence.extend(c.evidence)
        if c.certified:
            cert = c
            break
    if cert is None:
        cert = Certificate(INCONCLUSIVE, "direct", 1, bound + 1, evidence=evidence, ring=ring_to_json(M.ring), label=chain.label)
        return TorsionResult(chain.level(bound), None, cert, None, None, None)
    i = cert.stable_from
    sq = chain.subquotient(i)
    gens = a.power_generators(i)
    whole = all(M.is_zero_element(e.scale(g)) for e in M.generators() for g in gens)
    return TorsionResult(sq.module, sq.inclusion(), cert, i, whole, sq.module.is_zero())


def _window(chain: DirectSystem, i: int) -> DirectSystem:
    return DirectSystem(chain.level, chain.transition, i, i + 1, chain.label)


# ---------------------------------------------------------------------------
# Complete Nakayama


@dataclass
class LiftResult:
    element: CompleteElement
    corrections: list  # m_0, ..., m_k with m_i in a^i * source
    residuals: list  # n - phi(m_0 + ... + m_i), verified in a^(i+1) * target
    verified: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "precision": self.element.precision,
            "corrections": [str(v) for v in self.corrections],
            "residuals": [str(v) for v in self.residuals],
            "residual_checks": self.verified,
            "lift": {str(k): str(v) for k, v in sorted(self.element.reps.items())},
        }


class NakayamaLifter:
    """Lift elements through ``phi : M -> N`` on completions, given surjectivity mod ``a``."""

    def __init__(self, phi: ModuleMap, a: IdealSpec):
        M, N = phi.source, phi.target
        _check_same_ring(N, a)
        if M.ring != N.ring:
            raise DomainError("source and target over different rings")
        self.phi, self.ideal = phi, a
        base = N.ring.base
        aN = [e.scale(g) for g in a.generators for e in N.generators()]
        elim = Elimination(base, N.rank, list(phi.images), aN + list(N.gb.elements))
        pre = []
        for l, e in enumerate(N.generators()):
            c = elim.express(e)
            if c is None:
                witness = cokernel(ModuleMap(M, tensor_over_quotient(N, a, 0), phi.images, check=False))
                raise NotSurjectiveError(
                    f"the map is not surjective modulo {a}: generator {l} of the target is not hit",
                    witness={"generator": l, "cokernel": module_to_json(witness.simplify())},
                )
            pre.append(c)
        self._pre = pre  # m'_l with e_l - phi(m'_l) in aN
        self._elims = {}

    def _power_elim(self, i: int):
        if i not in self._elims:
            N = self.phi.target
            hs = self.ideal.power_generators(i)
            tracked = [e.scale(h) for h in hs for e in N.generators()]
            self._elims[i] = (hs, Elimination(N.ring.base, N.rank, tracked, list(N.gb.elements)))
        return self._elims[i]

    def _correction(self, r: FreeVector, i: int) -> FreeVector:
        """``m_i`` with ``phi(m_i) = r`` modulo ``a^(i+1) N``, for ``r`` in ``a^i N``."""
        M, N = self.phi.source, self.phi.target
        base = N.ring.base
        hs, elim = self._power_elim(i)
        c = elim.express(r)
        if c is None:
            raise DomainError(f"residual {r} is not in a^{i} N")
        comps = c.components()
        m = FreeVector.zero(base, M.rank)
        for b, h in enumerate(hs):
            w = FreeVector.from_polys(base, comps[b * N.rank:(b + 1) * N.rank])
            m = m + combine(self._pre, w, base, M.rank).scale(h)
        return m

    def lift(self, n, k: int) -> LiftResult:
        if k < 0:
            raise DomainError("precision must be nonnegative")
        M, N, a = self.phi.source, self.phi.target, self.ideal
        if isinstance(n, CompleteElement):
            if n.precision < k:
                raise DomainError("target element known to lower precision than requested")
            n = n.reps[k]
        r = n
        total = FreeVector.zero(M.ring.base, M.rank)
        corrections, residuals, checks, reps = [], [], [], {}
        for i in range(k + 1):
            m_i = tensor_over_quotient(M, a, k).reduce(self._correction(r, i))
            corrections.append(m_i)
            total = total + m_i
            r = n - self.phi.apply(total)
            Ni = tensor_over_quotient(N, a, i)
            ok = Ni.is_zero_element(r)
            checks.append(ok)
            residuals.append(Ni.reduce(r) if not ok else r)
            if not ok:
                raise DomainError(f"residual after step {i} is not in a^{i + 1} N")
            reps[i] = tensor_over_quotient(M, a, i).reduce(total)
        return LiftResult(CompleteElement(M, a, reps), corrections, residuals, checks)


def nakayama_lift(phi: ModuleMap, n, k: int, a: IdealSpec) -> LiftResult:
    """Lift ``n`` through ``phi`` to precision ``k``; refused when ``phi`` is not onto mod ``a``."""
    return NakayamaLifter(phi, a).lift(n, k)


# ---------------------------------------------------------------------------
# generators and flatness


@dataclass
class GeneratorsResult:
    verdict: str  # "yes" or "no"
    missing: list = field(default_factory=list)

    def __bool__(self):
        return self.verdict == "yes"


def adic_generators_check(T: CompletionTower, candidates) -> GeneratorsResult:
    """Do the candidates generate the completion?  Equivalent to generating ``M_0`` over ``A_0``."""
    M0 = T.tower.level(0)
    cands = [c if isinstance(c, FreeVector) else M0.element(c) for c in candidates]
    src = FpModule.free(M0.ring, len(cands))
    C = cokernel(ModuleMap(src, M0, cands, check=False))
    missing = [i for i, e in enumerate(C.generators()) if not C.is_zero_element(e)]
    return GeneratorsResult("no" if missing else "yes", missing)


@dataclass
class FlatnessReport:
    verdict: str  # "consistent" or "violation"
    kmax: int
    tor_depth: int
    levels: list
    violation: dict | None = None

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "kmax": self.kmax, "tor_depth": self.tor_depth, "levels": self.levels, "violation": self.violation}


def adically_flat_check(P: FpModule, a: IdealSpec, kmax: int, tor_depth: int | None = None) -> FlatnessReport:
    """Check ``Tor_i(A_k, P) = 0`` for ``1 <= i <= tor_depth`` and flatness of ``P_k`` over ``A_k``, for ``k <= kmax``.

    ``P_k`` counts as flat when its Fitting ideals are all idempotent (a
    projective module whose rank may vary).
    """
    _check_same_ring(P, a)
    if kmax < 0:
        raise DomainError("kmax must be nonnegative")
    tor_depth = len(a) if tor_depth is None else tor_depth
    if tor_depth < 1:
        raise DomainError("tor_depth must be at least 1")
    A = P.ring
    levels = []
    violation = None
    for k in range(kmax + 1):
        Ak = FpModule.cyclic(A, a.power_generators(k + 1))
        entry = {"level": k, "tor": {}, "projective": None}
        for i in range(1, tor_depth + 1):
            T = tor(P, Ak, i).simplify()
            zero = T.is_zero()
            entry["tor"][str(i)] = "0" if zero else module_to_json(T)
            if not zero and violation is None:
                violation = {"level": k, "tor_degree": i, "witness": module_to_json(T), "dim": vector_space_dim(T)}
        proj = is_projective_const_rank(P.change_ring(truncate_ring(A, a, k)))
        entry["projective"] = {"verdict": proj.verdict, "rank": proj.rank, "detail": proj.detail}
        if proj.verdict == "no" and violation is None:
            violation = {"level": k, "projective": proj.detail}
        levels.append(entry)
        if violation is not None:
            break
    return FlatnessReport("violation" if violation else "consistent", kmax, tor_depth, levels, violation)
