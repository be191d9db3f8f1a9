import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from oracle import to_sympy
from wprkit.adic import (
    CompleteElement,
    adic_generators_check,
    adically_flat_check,
    completion_tower,
    nakayama_lift,
    torsion_chain,
    torsion_submodule,
)
from wprkit.errors import DomainError, NotSurjectiveError, RefusedError
from wprkit.modules import FpModule, ModuleMap, direct_sum, is_surjective, kernel, tensor_over_quotient, same_submodule_quotient, vector_space_dim
from wprkit.rings import IdealSpec, QuotientRing

Qx = QuotientRing.polynomial(["x"])
Qxy = QuotientRing.polynomial(["x", "y"])
Axy = QuotientRing.from_strings(["x", "y"], ["x*y"])
X, Y = sp.symbols("x y")


def ideal(A, *texts):
    return IdealSpec(A, [A.parse(t) for t in texts])


def cyc(A, *texts):
    return FpModule.cyclic(A, [A.parse(t) for t in texts])


def free(A, r=1):
    return FpModule.free(A, r)


def vec(M, *texts):
    return M.element([M.ring.parse(t) for t in texts])


# ---------------------------------------------------------------------------
# completion towers


def test_power_series_levels():
    T = completion_tower(free(Qx), ideal(Qx, "x"), 3)
    assert T.dims() == [1, 2, 3, 4]
    for k in range(4):
        assert same_submodule_quotient(T.tower.level(k), cyc(Qx, f"x^{k + 1}"))
    assert T.surjective_transitions()
    assert T.stabilization().verdict == "inconclusive"


def test_torsion_module_tower_stabilizes():
    for m in (1, 2, 3):
        T = completion_tower(cyc(Qx, f"x^{m}"), ideal(Qx, "x"), 4)
        c = T.stabilization()
        assert c.verdict == "stabilized"
        assert c.stable_from == m - 1


def test_node_completion_levels():
    a = ideal(Axy, "x")
    T = completion_tower(free(Axy), a, 3)
    for k in range(4):
        assert same_submodule_quotient(T.tower.level(k), cyc(Axy, f"x^{k + 1}"))
    assert T.surjective_transitions()
    # y survives at every level, so no level is finite dimensional
    assert T.dims() == [None] * 4


def test_completion_rejects_foreign_ideal():
    with pytest.raises(DomainError):
        completion_tower(free(Qx), ideal(Qxy, "x"), 2)
    with pytest.raises(DomainError):
        completion_tower(free(Qx), ideal(Qx, "x"), 0)


MODULES = [
    (Qx, lambda A: free(A), ["x"]),
    (Qx, lambda A: cyc(A, "x^3"), ["x"]),
    (Qxy, lambda A: free(A, 2), ["x", "y"]),
    (Qxy, lambda A: cyc(A, "x*y"), ["x"]),
    (Axy, lambda A: free(A), ["x"]),
    (Axy, lambda A: cyc(A, "y^2"), ["x", "y"]),
    (Qxy, lambda A: FpModule.from_rows(A, 2, [["x", "y"]]), ["x", "y"]),
]


@pytest.mark.parametrize("A,make,gens", MODULES)
def test_level_compatibility(A, make, gens):
    T = completion_tower(make(A), ideal(A, *gens), 3)
    for k in range(4):
        for k2 in range(k, 4):
            assert T.level_compatible(k, k2)


@pytest.mark.parametrize("A,make,gens", MODULES)
def test_transitions_surjective(A, make, gens):
    assert completion_tower(make(A), ideal(A, *gens), 3).surjective_transitions()


def test_idempotence_on_torsion_module():
    a = ideal(Qxy, "x", "y")
    M = cyc(Qxy, "x^2", "y^2", "x*y")
    T = completion_tower(M, a, 4)
    c = T.stabilization()
    assert c.verdict == "stabilized"
    S = T.tower.level(c.stable_from)
    T2 = completion_tower(S, a, 4)
    for k in range(5):
        assert same_submodule_quotient(T2.tower.level(k), T.tower.level(k))


def test_complete_element_coherence():
    M = free(Qx)
    a = ideal(Qx, "x")
    e = CompleteElement.constant(M, a, vec(M, "1+x+x^5"), 4)
    assert e.is_coherent()
    assert e.precision == 4
    broken = CompleteElement(M, a, {0: vec(M, "1"), 1: vec(M, "2")})
    assert not broken.is_coherent()


# ---------------------------------------------------------------------------
# torsion


def test_torsion_of_mixed_module():
    M = direct_sum(cyc(Qx, "x^2"), free(Qx))
    r = torsion_submodule(M, ideal(Qx, "x"), 4)
    assert r.certified and r.index == 2
    assert vector_space_dim(r.module) == 2
    assert not r.whole and not r.zero
    # every image lands in the first summand
    for v in r.inclusion.images:
        assert v.components()[1].is_zero()


def test_torsion_of_free_module():
    r = torsion_submodule(free(Qxy, 2), ideal(Qxy, "x", "y"), 3)
    assert r.certified and r.index == 1 and r.zero


def test_torsion_of_residue_module():
    a = ideal(Qxy, "x", "y")
    r = torsion_submodule(cyc(Qxy, "x", "y"), a, 3)
    assert r.certified and r.index == 1 and r.whole


def test_torsion_inconclusive_when_bound_too_small():
    r = torsion_submodule(cyc(Qx, "x^5"), ideal(Qx, "x"), 3)
    assert not r.certified
    assert r.index is None


def test_torsion_bound_checked():
    with pytest.raises(DomainError):
        torsion_submodule(free(Qx), ideal(Qx, "x"), 0)


def test_torsion_chain_is_ascending():
    M = direct_sum(cyc(Qx, "x^3"), free(Qx))
    chain = torsion_chain(M, ideal(Qx, "x"), 4)
    assert [vector_space_dim(chain.level(i)) for i in range(1, 5)] == [1, 2, 3, 3]


# ---------------------------------------------------------------------------
# Complete Nakayama


def test_geometric_series():
    A = Qx
    F = free(A)
    phi = ModuleMap.from_matrix(F, F, [[A.parse("1-x")]])
    for k in range(1, 7):
        r = nakayama_lift(phi, vec(F, "1"), k, ideal(A, "x"))
        expect = A.parse("+".join(f"x^{i}" for i in range(k + 1)))
        assert r.element.reps[k].components()[0] == expect
        assert all(r.verified)
        assert r.element.is_coherent()


def test_identity_lift():
    F = free(Qxy, 2)
    phi = ModuleMap.identity(F)
    n = vec(F, "1+x", "y^2")
    for k in range(4):
        r = nakayama_lift(phi, n, k, ideal(Qxy, "x", "y"))
        # the lift agrees with n modulo a^(k+1); corrections follow the a-adic filtration
        assert tensor_over_quotient(F, ideal(Qxy, "x", "y"), k).is_zero_element(r.element.reps[k] - n)


def test_two_to_one_lift():
    A = Qxy
    F2, F1 = free(A, 2), free(A)
    phi = ModuleMap.from_matrix(F2, F1, [[A.parse("1"), A.parse("1-x")]])
    a = ideal(A, "x", "y")
    r = nakayama_lift(phi, vec(F1, "y"), 2, a)
    m = r.element.reps[2]
    res = vec(F1, "y") - phi.apply(m)
    # residual lies in (x, y)^3: every term has degree >= 3
    assert all(sum(mono) >= 3 for (_, mono) in res.terms)


def test_corrections_lie_in_powers():
    A = Qx
    F = free(A)
    phi = ModuleMap.from_matrix(F, F, [[A.parse("1-x")]])
    r = nakayama_lift(phi, vec(F, "1"), 5, ideal(A, "x"))
    for i, m in enumerate(r.corrections):
        assert all(mono[0] >= i for (_, mono) in m.terms)


def test_non_surjective_refused_with_witness():
    F = free(Qx)
    phi = ModuleMap.from_matrix(F, F, [[Qx.parse("x")]])
    with pytest.raises(NotSurjectiveError) as info:
        nakayama_lift(phi, vec(F, "1"), 2, ideal(Qx, "x"))
    assert isinstance(info.value, RefusedError)
    w = info.value.witness
    assert w["generator"] == 0
    assert w["cokernel"]["rank"] >= 1


def test_lift_precision_checked():
    F = free(Qx)
    with pytest.raises(DomainError):
        nakayama_lift(ModuleMap.identity(F), vec(F, "1"), -1, ideal(Qx, "x"))


UNITS_AND_NONUNITS = ["1-x", "2+x^2", "x", "x^2-x", "3", "1+x+x^3", "0", "x^3"]


@settings(max_examples=30)
@given(st.sampled_from(UNITS_AND_NONUNITS), st.sampled_from(["1", "x", "1+x^2", "5-x"]), st.integers(0, 5))
def test_lift_exists_iff_surjective_mod_a(g_text, n_text, k):
    A = Qx
    F = free(A)
    g = A.parse(g_text)
    phi = ModuleMap.from_matrix(F, F, [[g]])
    surjective_mod_a = g_text not in ("x", "x^2-x", "0", "x^3")
    if not surjective_mod_a:
        with pytest.raises(NotSurjectiveError):
            nakayama_lift(phi, vec(F, n_text), k, ideal(A, "x"))
        return
    r = nakayama_lift(phi, vec(F, n_text), k, ideal(A, "x"))
    lifted = to_sympy(r.element.reps[k].components()[0], [X])
    # independent route: the power series of n / g truncated at degree k
    series = sp.series(sp.sympify(n_text.replace("^", "**")) / sp.sympify(g_text.replace("^", "**")), X, 0, k + 1).removeO()
    assert sp.expand(lifted - series) == 0


# ---------------------------------------------------------------------------
# generators


def test_generators_examples():
    T = completion_tower(free(Qx), ideal(Qx, "x"), 3)
    assert adic_generators_check(T, [["1"]]).verdict == "yes"
    no = adic_generators_check(T, [["x"]])
    assert no.verdict == "no" and no.missing == [0]
    T2 = completion_tower(free(Qxy, 2), ideal(Qxy, "x", "y"), 2)
    assert adic_generators_check(T2, [["1", "x"], ["y", "1"]])
    assert not adic_generators_check(T2, [["1", "x"], ["y", "x"]])
    assert adic_generators_check(T2, [["1+x", "0"], ["0", "1-y"]])


def test_generators_unit_multiple():
    T = completion_tower(free(Qx), ideal(Qx, "x"), 3)
    # 1 + x is a unit of the completion; a generator check sees it mod (x)
    assert adic_generators_check(T, [["1+x"]])


# ---------------------------------------------------------------------------
# flatness


def test_free_modules_are_adically_flat():
    for A, gens in [(Qx, ["x"]), (Qxy, ["x", "y"]), (Axy, ["x"])]:
        rep = adically_flat_check(free(A, 2), ideal(A, *gens), 3, 2)
        assert rep.verdict == "consistent"
        assert len(rep.levels) == 4
        assert all(all(v == "0" for v in lvl["tor"].values()) for lvl in rep.levels)


def test_residue_field_not_adically_flat():
    rep = adically_flat_check(cyc(Qx, "x"), ideal(Qx, "x"), 3, 2)
    assert rep.verdict == "violation"
    assert rep.violation["level"] == 0 and rep.violation["tor_degree"] == 1
    assert rep.violation["dim"] == 1


def test_flatness_rejects_foreign_ideal():
    with pytest.raises(DomainError):
        adically_flat_check(cyc(Qx, "x"), ideal(Qxy, "y"), 2, 1)


def test_flatness_default_depth_is_length():
    rep = adically_flat_check(free(Qxy), ideal(Qxy, "x", "y"), 1)
    assert rep.tor_depth == 2


def test_transverse_quotient_caught_by_level_flatness():
    # Tor_i(A/(y^k), A/(x)) vanishes since x, y^k is regular, but P_0 = Q[x,y]/(x, y)
    # is not flat over A_0 = Q[x]: the level test is what finds it
    rep = adically_flat_check(cyc(Qxy, "x"), ideal(Qxy, "y"), 2, 2)
    assert rep.verdict == "violation"
    assert rep.levels[0]["tor"] == {"1": "0", "2": "0"}
    assert rep.violation["level"] == 0 and "projective" in rep.violation


ROWS = [["1", "x"], ["x", "1+x"], ["1+y", "y^2"], ["y", "1"], ["x", "y"], ["1", "0"]]
QUOTIENTS = [None, "1+x", "1+x*y", "2+y+x^2", "x"]


@settings(max_examples=20)
@given(st.sampled_from(ROWS), st.sampled_from(QUOTIENTS), st.sampled_from([["x"], ["x", "y"]]))
def test_flatness_passes_to_kernels(row, quotient, gens):
    # 0 -> P' -> A^2 -> P'' -> 0 with P' computed as a kernel
    A = Qxy
    a = ideal(A, *gens)
    P = free(A, 2)
    P2 = free(A) if quotient is None else cyc(A, quotient)
    f = ModuleMap.from_matrix(P, P2, [[A.parse(t) for t in row]])
    if not is_surjective(f):
        return
    P1, _ = kernel(f)
    if adically_flat_check(P2, a, 2, 2).verdict == "consistent":
        assert adically_flat_check(P, a, 2, 2).verdict == "consistent"
        assert adically_flat_check(P1, a, 2, 1).verdict == "consistent"
    else:
        # P'' = A/(x) is a-torsion and fails at level 0
        assert quotient == "x"
