"""Weak proregularity, and the Koszul-tower model of derived completion and torsion.

Derived completion of ``M`` in degree ``i`` is modeled by the inverse system
``H^i(K(A; a^j) (x) M)``; derived torsion by the direct system
``H^i(Hom(K(A; a^j), M))``.  A degree gets a value only when its system is
certified (zero or stabilized); otherwise it is reported inconclusive.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .complexes import (
    ChainMap,
    FreeComplex,
    ModuleComplex,
    induced_map,
    module_complex,
    tensor_chain_map,
    tensor_complexes,
    tensor_map_with_module,
    tensor_with_module,
)
from .errors import DomainError, RefusedError
from .koszul import koszul_complex, koszul_hom, koszul_hom_transition, koszul_transition
from .modules import FpModule, ModuleMap, cokernel, find_inverse, is_injective, tensor_over_quotient, vector_space_dim
from .rings import IdealSpec, QuotientRing, truncate_ring
from .towers import (
    INCONCLUSIVE,
    PRO_ZERO,
    STABILIZED,
    Certificate,
    ComplexTower,
    DirectSystem,
    ModuleTower,
    certify,
    is_pro_zero_up_to,
    module_to_json,
)


def koszul_tower(a: IdealSpec, J: int) -> ComplexTower:
    return ComplexTower(lambda j: koszul_complex(a, j), lambda j: koszul_transition(a, j + 1, j), 1, J, f"K(A; {a}^j)")


def koszul_cohomology_tower(A: QuotientRing, a: IdealSpec, i: int, J: int) -> ModuleTower:
    """``H^i(K(A; a^j))`` for ``j = 1..J`` with the induced transitions."""
    if a.ring != A:
        raise DomainError("the sequence does not live in this ring")
    if not -len(a) <= i <= 0:
        raise DomainError(f"degree {i} outside -{len(a)}..0")
    if J < 1:
        raise DomainError("J must be at least 1")
    return koszul_tower(a, J).cohomology_tower(i)


# ---------------------------------------------------------------------------
# weak proregularity


@dataclass
class WprReport:
    sequence: str
    bound: int
    certificates: dict  # degree -> Certificate
    verdict: str = ""

    def __post_init__(self):
        ok = all(c.verdict == PRO_ZERO for c in self.certificates.values())
        self.verdict = "WPR-certified" if ok else INCONCLUSIVE

    @property
    def certified(self) -> bool:
        return self.verdict == "WPR-certified"

    def offsets(self) -> dict:
        return {i: c.offset for i, c in self.certificates.items()}

    def to_json(self) -> dict:
        return {
            "sequence": self.sequence,
            "bound": self.bound,
            "verdict": self.verdict,
            "degrees": {str(i): c.to_json() for i, c in sorted(self.certificates.items())},
        }


def wpr_check(A: QuotientRing, a: IdealSpec, J: int = 4) -> WprReport:
    """Pro-zero certificates for ``H^i(K(A; a^j))``, ``-p <= i <= -1``, checked up to ``J``.

    Failure to find witnesses is reported as inconclusive, never as a
    proof that the sequence is not weakly proregular.
    """
    if J < 2:
        raise RefusedError("wpr_check needs J >= 2")
    if a.ring != A:
        raise DomainError("the sequence does not live in this ring")
    tower = koszul_tower(a, J)
    certs = {}
    for i in range(-len(a), 0):
        certs[i] = is_pro_zero_up_to(tower.cohomology_tower(i), J)
    return WprReport(str(a), J, certs)


# ---------------------------------------------------------------------------
# derived completion and torsion


@dataclass
class DegreeValue:
    degree: int
    certificate: Certificate
    system: object
    value: FpModule | None
    complexes: object = None

    @property
    def certified(self) -> bool:
        return self.certificate.certified

    def to_json(self) -> dict:
        d = {"degree": self.degree, "certificate": self.certificate.to_json()}
        d["value"] = module_to_json(self.value) if self.value is not None else None
        return d


@dataclass
class DerivedValue:
    kind: str  # "completion" or "torsion"
    window: tuple
    degrees: dict = field(default_factory=dict)
    bound: int = 0

    @property
    def certified(self) -> bool:
        return all(v.certified for v in self.degrees.values())

    def value(self, i: int):
        if i in self.degrees:
            return self.degrees[i].value
        return None

    def nonzero_degrees(self) -> list:
        """Degrees with a certified nonzero value."""
        return [i for i, v in sorted(self.degrees.items()) if v.value is not None and not v.value.is_zero()]

    def inconclusive_degrees(self) -> list:
        return [i for i, v in sorted(self.degrees.items()) if not v.certified]

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "window": list(self.window),
            "bound": self.bound,
            "certified": self.certified,
            "degrees": {str(i): v.to_json() for i, v in sorted(self.degrees.items())},
        }


def _value_of(system, cert: Certificate):
    if cert.verdict in (PRO_ZERO, "essentially-zero"):
        return FpModule.zero(system.level(system.start).ring)
    if cert.verdict == STABILIZED:
        return system.level(cert.stable_from)
    return None


def _as_complex(X) -> ModuleComplex:
    if isinstance(X, FpModule):
        return module_complex(X)
    return X


def completion_complex_tower(X, a: IdealSpec, J: int) -> ComplexTower:
    """``K(A; a^j) (x) X`` for a module or a free complex ``X``."""
    if isinstance(X, FpModule):
        cache = {}

        def level(j):
            if j not in cache:
                cache[j] = tensor_with_module(koszul_complex(a, j), X)
            return cache[j]

        def trans(j):
            return tensor_map_with_module(koszul_transition(a, j + 1, j), X, level(j + 1), level(j))
    else:
        if not X.is_free():
            raise DomainError("derived completion of a complex needs free terms")
        cache = {}

        def level(j):
            if j not in cache:
                cache[j] = tensor_complexes(koszul_complex(a, j), X)
            return cache[j]

        def trans(j):
            return tensor_chain_map(koszul_transition(a, j + 1, j), X, level(j + 1), level(j))
    return ComplexTower(level, trans, 1, J, "K(A; a^j) (x) X")


def derived_completion(X, a: IdealSpec, J: int = 4) -> DerivedValue:
    """Sequential derived completion of a module or bounded free complex, degree by degree."""
    if J < 2:
        raise RefusedError("derived_completion needs J >= 2")
    C = _as_complex(X)
    if C.ring != a.ring:
        raise DomainError("the ideal is not an ideal of the input's ring")
    p = len(a)
    tower = completion_complex_tower(X, a, J)
    out = DerivedValue("completion", (C.lo - p, C.hi), bound=J)
    for i in range(C.lo - p, C.hi + 1):
        T = tower.cohomology_tower(i)
        cert = certify(T, J)
        out.degrees[i] = DegreeValue(i, cert, T, _value_of(T, cert), tower)
    return out


def torsion_direct_system(M: FpModule, a: IdealSpec, i: int, J: int) -> DirectSystem:
    """``H^i(Hom(K(A; a^j), M))`` for ``j = 1..J``."""
    cache = {}

    def cx(j):
        if j not in cache:
            cache[j] = koszul_hom(a, M, j)
        return cache[j]

    def trans(j):
        return induced_map(koszul_hom_transition(a, M, j, j + 1, cx(j), cx(j + 1)), i)

    system = DirectSystem(lambda j: cx(j).cohomology(i), trans, 1, J, f"H^{i}(Hom(K(A; a^j), M))")
    system.complex_at = cx
    return system


def derived_torsion(M: FpModule, a: IdealSpec, J: int = 4) -> DerivedValue:
    """Sequential derived torsion of a module, degrees ``0..p``."""
    if J < 2:
        raise RefusedError("derived_torsion needs J >= 2")
    if M.ring != a.ring:
        raise DomainError("the ideal is not an ideal of the module's ring")
    p = len(a)
    out = DerivedValue("torsion", (0, p), bound=J)
    for i in range(0, p + 1):
        S = torsion_direct_system(M, a, i, J)
        cert = certify(S, J)
        out.degrees[i] = DegreeValue(i, cert, S, _value_of(S, cert))
    return out


@dataclass
class TorsionVerdict:
    verdict: str  # "yes", "no", "inconclusive"
    degrees: dict

    def to_json(self):
        return {"verdict": self.verdict, "degrees": self.degrees}


def is_derived_torsion(C, a: IdealSpec, bound: int = 4) -> TorsionVerdict:
    """Every cohomology module of ``C`` is ``a``-torsion (checked through the colon chain)."""
    from .adic import torsion_submodule

    C = _as_complex(C)
    details = {}
    verdicts = []
    for n in C.degrees():
        H = C.cohomology(n)
        if H.is_zero():
            continue
        t = torsion_submodule(H, a, bound)
        if not t.certified:
            details[str(n)] = {"torsion": INCONCLUSIVE}
            verdicts.append(INCONCLUSIVE)
        else:
            details[str(n)] = {"torsion": "whole" if t.whole else "proper", "stable_index": t.index, "gamma_zero": t.zero}
            verdicts.append("yes" if t.whole else "no")
    if "no" in verdicts:
        v = "no"
    elif INCONCLUSIVE in verdicts:
        v = INCONCLUSIVE
    else:
        v = "yes"
    return TorsionVerdict(v, details)


# ---------------------------------------------------------------------------
# MGM spot check


@dataclass
class MgmReport:
    verdict: str  # "consistent", "mismatch", "inconclusive"
    completion: DerivedValue
    torsion: DerivedValue | None
    shift: int | None
    isomorphism: bool | None

    def to_json(self):
        return {
            "verdict": self.verdict,
            "completion": self.completion.to_json(),
            "torsion": self.torsion.to_json() if self.torsion else None,
            "shift": self.shift,
            "explicit_isomorphism_degree_0": self.isomorphism,
        }


def mgm_roundtrip(M: FpModule, a: IdealSpec, J: int = 4) -> MgmReport:
    """``derived_torsion(derived_completion(M))`` against ``M`` itself.

    Only meaningful when every degree of the completion certifies and the
    result is concentrated in a single degree (so it is a shifted module).
    """
    dc = derived_completion(M, a, J)
    if not dc.certified:
        return MgmReport(INCONCLUSIVE, dc, None, None, None)
    nz = dc.nonzero_degrees()
    if not nz:
        ok = M.is_zero()
        return MgmReport("consistent" if ok else "mismatch", dc, None, 0, ok)
    if len(nz) > 1:
        return MgmReport(INCONCLUSIVE, dc, None, None, None)
    d = nz[0]
    X = dc.value(d)
    dt = derived_torsion(X, a, J)
    if not dt.certified:
        return MgmReport(INCONCLUSIVE, dc, dt, d, None)
    # H^i of R Gamma (X[-d]) is H^(i-d)(R Gamma X); compare with M in degree 0
    ok = True
    for i, v in dt.degrees.items():
        if i + d != 0 and not v.value.is_zero():
            ok = False
    iso = None
    if d == 0 and ok:
        iso = _composite_iso(M, dc, dt)
        ok = bool(iso)
    elif ok:
        ok = False
    return MgmReport("consistent" if ok else "mismatch", dc, dt, d, iso)


def _composite_iso(M: FpModule, dc: DerivedValue, dt: DerivedValue) -> bool:
    """An explicit isomorphism ``M -> H^0(completion) <- H^0(torsion)``."""
    c0, t0 = dc.degrees[0], dt.degrees[0]
    if c0.certificate.verdict != STABILIZED or t0.certificate.verdict != STABILIZED:
        return False
    s = c0.certificate.stable_from
    # degree 0 of K (x) M is M itself; H^0 is a quotient of it
    sq = c0.complexes.level(s).cohomology_subquotient(0)
    X = sq.module
    to_X = ModuleMap(M, X, [sq.coordinates(e) for e in M.generators()])
    if find_inverse(to_X) is None:
        return False
    system = t0.system
    s2 = t0.certificate.stable_from
    tq = system.complex_at(s2).cohomology_subquotient(0)
    # Hom(K, X)^0 = X; H^0 = ann_X(a^j) sits inside X
    return find_inverse(tq.inclusion()) is not None


# ---------------------------------------------------------------------------
# completion versus Koszul


@dataclass
class CompareReport:
    verdict: str  # "quasi-isomorphism certified" or "inconclusive"
    degrees: dict
    radical: dict
    quotient_iso_from: int | None
    containment_from: int | None

    def to_json(self):
        return {
            "verdict": self.verdict,
            "degrees": self.degrees,
            "radical": self.radical,
            "quotient_iso_from": self.quotient_iso_from,
            "containment_from": self.containment_from,
        }


def _radical_witnesses(A: QuotientRing, xs: IdealSpec, ys: IdealSpec, kmax: int):
    """Powers ``x^m`` landing in ``(ys)`` for each ``x``; the first failure is returned separately."""
    gb = A.ideal_gb(ys.generators)
    found = {}
    for x in xs.generators:
        for m in range(1, kmax + 1):
            if gb.contains_poly(x ** m):
                found[str(x)] = m
                break
        else:
            return found, str(x)
    return found, None


def _pro_iso(H: FpModule, T: ModuleTower, phis: list, kmax: int) -> dict:
    """Certify that ``phi_k : H -> T_k`` is a pro-isomorphism from the constant system.

    Needs ``phi_k`` injective on a final range of at least two levels and the
    cokernel tower pro-zero.  Then ``lim T = H`` and ``lim^1 T = 0``.
    """
    inj_from = None
    for k in range(kmax, -1, -1):
        if not is_injective(phis[k]):
            break
        inj_from = k
    iso_from = None
    for k in range(kmax, -1, -1):
        if find_inverse(phis[k]) is None:
            break
        iso_from = k
    cok = {}

    def clevel(k):
        if k not in cok:
            cok[k] = cokernel(phis[k])
        return cok[k]

    C = ModuleTower(clevel, lambda k: ModuleMap(clevel(k + 1), clevel(k), T.transition(k).images, check=False), 0, kmax, f"coker({T.label})")
    cc = is_pro_zero_up_to(C, kmax)
    ok = inj_from is not None and inj_from <= kmax - 1 and cc.verdict == PRO_ZERO
    return {
        "source": module_to_json(H),
        "injective_from": inj_from,
        "iso_from": iso_from,
        "cokernel_certificate": cc.to_json(),
        "comparison": "pro-isomorphism" if ok else INCONCLUSIVE,
        "status": "ok" if ok else INCONCLUSIVE,
    }


def completion_koszul_compare(A: QuotientRing, a: IdealSpec, b: IdealSpec, kmax: int = 4) -> CompareReport:
    """Compare ``K(A; b)`` with the levelwise completed ``K(A_k; b)``, ``k = 0..kmax``.

    In each degree the maps ``H^i(K(A; b)) -> H^i(K(A_k; b))`` must form a
    pro-isomorphism from the constant system.  The Milnor sequence then
    gives ``H^i(K(A^; b)) = H^i(K(A; b))`` in every degree.
    """
    if a.ring != A or b.ring != A:
        raise DomainError("both sequences must live in the ring")
    b_in_a, bad = _radical_witnesses(A, b, a, kmax)
    if bad is not None:
        raise RefusedError(f"no power of {bad} up to {kmax} lies in {a}", witness={"element": bad, "into": str(a), "max_power": kmax})
    a_in_b, bad = _radical_witnesses(A, a, b, kmax)
    if bad is not None:
        raise RefusedError(f"no power of {bad} up to {kmax} lies in {b}", witness={"element": bad, "into": str(b), "max_power": kmax})
    radical = {"b_into_a": b_in_a, "a_into_b": a_in_b}

    K = koszul_complex(b)
    cache = {}

    def level(k):
        if k not in cache:
            Ak = truncate_ring(A, a, k)
            cache[k] = koszul_complex(b.over(Ak))
        return cache[k]

    def canon(src, tgt):
        comps = {n: ModuleMap(src.module(n), tgt.module(n), tgt.module(n).generators(), check=False) for n in src.degrees()}
        return ChainMap(src, tgt, comps, check=False)

    tower = ComplexTower(level, lambda k: canon(level(k + 1), level(k)), 0, kmax, "K(A_k; b)")
    degrees = {}
    status = []
    quotient_iso_from = None
    for i in range(-len(b), 1):
        T = tower.cohomology_tower(i)
        H = K.cohomology(i)
        phis = [induced_map(canon(K, level(k)), i) for k in range(kmax + 1)]
        entry = _pro_iso(H, T, phis, kmax)
        if i == 0:
            quotient_iso_from = entry["iso_from"]
        status.append(entry["status"])
        degrees[str(i)] = entry
    bgb = A.ideal_gb(b.generators)
    containment_from = None
    for k in range(kmax + 1):
        if all(bgb.contains_poly(g) for g in a.power_generators(k + 1)):
            containment_from = k
            break
    verdict = INCONCLUSIVE if INCONCLUSIVE in status else "quasi-isomorphism certified"
    return CompareReport(verdict, degrees, radical, quotient_iso_from, containment_from)


# ---------------------------------------------------------------------------
# derived Nakayama


@dataclass
class NakayamaReport:
    verdict: str  # "consistent", "violated", "inconclusive"
    top_degree: int | None
    generators_needed: int | None
    kunneth_count: int | None
    kunneth_holds: bool | None
    bound: int
    detail: str = ""

    def to_json(self):
        return {
            "verdict": self.verdict,
            "top_degree": self.top_degree,
            "generators_needed": self.generators_needed,
            "kunneth_count": self.kunneth_count,
            "kunneth_holds": self.kunneth_holds,
            "bound": self.bound,
            "detail": self.detail,
        }


def derived_nakayama_check(P: ModuleComplex, a: IdealSpec, r: int) -> NakayamaReport:
    """Generator count of ``H^(i0)(A_0 (x) P)`` against ``r``, where ``i0 = sup H(P)``.

    Minimal generator counts are computed as ``k``-dimensions, which needs
    ``A_0 = A/a`` to be the ground field itself; otherwise the check is
    inconclusive.
    """
    if r < 0:
        raise DomainError("generator bound must be nonnegative")
    if not P.is_free():
        raise DomainError("derived Nakayama needs a complex of free modules")
    A = P.ring
    if a.ring != A:
        raise DomainError("the ideal is not an ideal of the complex's ring")
    A0 = FpModule.cyclic(A, a.generators)
    if vector_space_dim(A0) != 1:
        return NakayamaReport(INCONCLUSIVE, None, None, None, None, r, "A/a is not the ground field")
    i0 = P.sup()
    if i0 is None:
        raise RefusedError("the complex is acyclic: sup of its cohomology is not finite")
    reduced = tensor_with_module(P, A0)
    g0 = vector_space_dim(reduced.cohomology(i0))
    kun = vector_space_dim(tensor_over_quotient(P.cohomology(i0), a, 0))
    holds = g0 == kun
    if g0 is None or kun is None:
        return NakayamaReport(INCONCLUSIVE, i0, g0, kun, None, r, "infinite-dimensional reduction")
    verdict = "consistent" if g0 <= r and holds else "violated"
    return NakayamaReport(verdict, i0, g0, kun, holds, r)


# ---------------------------------------------------------------------------
# flat base change


@dataclass
class BaseChangeReport:
    verdict: str  # "preserved", "not preserved", "inconclusive"
    original: WprReport
    extended: WprReport
    checks: dict

    def to_json(self):
        return {"verdict": self.verdict, "original": self.original.to_json(), "extended": self.extended.to_json(), "checks": self.checks}


def flat_base_change_wpr(A: QuotientRing, a: IdealSpec, extra_vars, J: int = 4) -> BaseChangeReport:
    """Compare WPR witnesses of ``a`` in ``A`` and in ``B = A[extra_vars]``."""
    if J < 2:
        raise RefusedError("base change check needs J >= 2")
    extra_vars = list(extra_vars)
    B = A.adjoin(extra_vars)
    aB = a.extend_to(B)
    before = wpr_check(A, a, J)
    after = wpr_check(B, aB, J)
    tower = koszul_tower(aB, J)
    checks = {}
    all_ok = True
    for i, c in before.certificates.items():
        if c.verdict != PRO_ZERO:
            checks[str(i)] = {"offset": None, "valid_in_extension": None}
            continue
        d = c.offset
        T = tower.cohomology_tower(i)
        ok = all(T.composite(j0 + d, j0).is_zero() for j0 in range(1, J - d + 1))
        checks[str(i)] = {"offset": d, "valid_in_extension": ok, "extension_offset": after.certificates[i].offset}
        all_ok = all_ok and ok
    if not before.certified:
        verdict = INCONCLUSIVE
    else:
        verdict = "preserved" if all_ok else "not preserved"
    return BaseChangeReport(verdict, before, after, checks)


# ---------------------------------------------------------------------------
# levelwise completion of a free complex


def levelwise_completion_tower(P: ModuleComplex, a: IdealSpec, i: int, kmax: int) -> ModuleTower:
    """``H^i(P (x) A_k)`` for ``k = 0..kmax`` with the canonical maps."""
    cache = {}

    def level(k):
        if k not in cache:
            cache[k] = tensor_with_module(P, FpModule.cyclic(P.ring, a.power_generators(k + 1)))
        return cache[k]

    def trans(k):
        src, tgt = level(k + 1), level(k)
        comps = {n: ModuleMap(src.module(n), tgt.module(n), tgt.module(n).generators(), check=False) for n in src.degrees()}
        return induced_map(ChainMap(src, tgt, comps, check=False), i)

    return ModuleTower(lambda k: level(k).cohomology(i), trans, 0, kmax, f"H^{i}(P (x) A_k)")
