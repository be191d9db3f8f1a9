import copy

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wprkit.derived import koszul_cohomology_tower
from wprkit.errors import DomainError, RefusedError
from wprkit.modules import FpModule, ModuleMap, same_submodule_quotient
from wprkit.rings import IdealSpec, QuotientRing
from wprkit.towers import (
    INCONCLUSIVE,
    PRO_ZERO,
    STABILIZED,
    Certificate,
    DirectSystem,
    ModuleTower,
    certify,
    is_pro_zero_up_to,
    limit_under_certificate,
    stabilization,
)

Qx = QuotientRing.polynomial(["x"])
Axy = QuotientRing.from_strings(["x", "y"], ["x*y"])


def cyc(A, *texts):
    return FpModule.cyclic(A, [A.parse(t) for t in texts])


def mult_tower(exps, shifts):
    """Levels ``Q[x]/(x^e_j)`` with transitions multiplication by ``x^c_j``."""
    levels = [cyc(Qx, f"x^{e}") for e in exps]
    maps = [ModuleMap.from_matrix(levels[i + 1], levels[i], [[Qx.parse(f"x^{c}")]]) for i, c in enumerate(shifts)]
    return ModuleTower.from_lists(levels, maps)


def zero_tower(n=5):
    M = cyc(Qx, "x^2")
    return ModuleTower.from_lists([M] * n, [ModuleMap.zero_map(M, M)] * (n - 1))


def identity_tower(n=5):
    M = cyc(Qx, "x^2")
    return ModuleTower.from_lists([M] * n, [ModuleMap.identity(M)] * (n - 1))


def ann_tower(J=4):
    return koszul_cohomology_tower(Axy, IdealSpec(Axy, [Axy.parse("x")]), -1, J)


def test_zero_maps_are_pro_zero_with_offset_one():
    for J in (3, 4, 5):
        c = is_pro_zero_up_to(zero_tower(5), J)
        assert c.verdict == PRO_ZERO
        assert c.offset == 1
        assert all(c.witnesses[j0] == j0 + 1 for j0 in range(1, J))
        assert c.replay()


def test_identity_tower_is_never_refuted():
    for J in range(2, 7):
        c = is_pro_zero_up_to(identity_tower(6), J)
        assert c.verdict == INCONCLUSIVE
        assert c.smallest_unwitnessed == 1
        assert c.witnesses == {}
        assert all(e.claim == "nonzero" for e in c.evidence)
        assert "not" not in c.verdict


def test_annihilator_tower_is_pro_zero():
    T = ann_tower(4)
    assert not T.level(1).is_zero()
    c = is_pro_zero_up_to(T)
    assert c.verdict == PRO_ZERO and c.offset == 1
    assert limit_under_certificate(T, c).is_zero()


def test_constant_tower_stabilizes_at_one():
    T = identity_tower(4)
    c = stabilization(T)
    assert c.verdict == STABILIZED and c.stable_from == 1
    assert same_submodule_quotient(limit_under_certificate(T, c), T.level(1))
    assert certify(T).verdict == STABILIZED


def truncated_tower(J):
    levels = [cyc(Qx, f"x^{min(j, 3)}") for j in range(1, J + 1)]
    maps = [ModuleMap.canonical(levels[i + 1], levels[i]) for i in range(J - 1)]
    return ModuleTower.from_lists(levels, maps)


@pytest.mark.parametrize("J", [4, 5, 6])
def test_capped_powers_stabilize_at_three(J):
    c = stabilization(truncated_tower(J))
    assert c.verdict == STABILIZED and c.stable_from == 3
    assert c.replay()


def test_capped_powers_need_two_stable_levels():
    assert stabilization(truncated_tower(3)).verdict == INCONCLUSIVE


def test_growing_tower_is_inconclusive():
    levels = [cyc(Qx, f"x^{j}") for j in range(1, 6)]
    maps = [ModuleMap.canonical(levels[i + 1], levels[i]) for i in range(4)]
    T = ModuleTower.from_lists(levels, maps)
    assert stabilization(T).verdict == INCONCLUSIVE
    c = certify(T)
    assert c.verdict == INCONCLUSIVE
    with pytest.raises(RefusedError):
        limit_under_certificate(T, c)


def test_stabilization_needs_two_levels():
    with pytest.raises(DomainError):
        stabilization(identity_tower(3), 1)


def test_pro_zero_limit_is_zero():
    T = zero_tower()
    assert limit_under_certificate(T, certify(T)).is_zero()


def test_direct_system_essentially_zero():
    M = cyc(Qx, "x")
    D = DirectSystem.from_lists([M] * 4, [ModuleMap.zero_map(M, M)] * 3)
    c = is_pro_zero_up_to(D)
    assert c.verdict == "essentially-zero"
    assert c.kind == "direct"
    assert c.replay()


def test_composite_needs_order():
    with pytest.raises(DomainError):
        zero_tower().composite(1, 2)


def test_from_lists_shape_checked():
    M = cyc(Qx, "x")
    with pytest.raises(DomainError):
        ModuleTower.from_lists([M, M], [])


# ---------------------------------------------------------------------------
# properties over random multiplication towers


@st.composite
def towers(draw, max_len=6):
    n = draw(st.integers(3, max_len))
    exps = [draw(st.integers(1, 4))]
    shifts = []
    for _ in range(n - 1):
        e = draw(st.integers(1, 4))
        c = draw(st.integers(max(0, exps[-1] - e), 4))
        exps.append(e)
        shifts.append(c)
    return exps, shifts


@settings(max_examples=40)
@given(towers())
def test_certificates_replay(data):
    T = mult_tower(*data)
    for c in (is_pro_zero_up_to(T), stabilization(T), certify(T)):
        assert c.replay()


@settings(max_examples=30)
@given(towers())
def test_json_round_trip(data):
    T = mult_tower(*data)
    c = certify(T)
    d = c.to_json()
    back = Certificate.from_json(d)
    assert back.to_json() == d
    assert back.replay()


@settings(max_examples=30)
@given(towers(max_len=7), st.integers(3, 6))
def test_monotonicity(data, J):
    T = mult_tower(*data)
    J = min(J, T.stop)
    small = is_pro_zero_up_to(T, J)
    big = is_pro_zero_up_to(T, T.stop)
    # least witnesses found below J are the same at every larger bound
    for j0, j1 in small.witnesses.items():
        assert big.witnesses[j0] == j1
    if small.verdict == PRO_ZERO:
        # and each one stays a zero composite in the longer tower
        assert all(T.composite(j1, j0).is_zero() for j0, j1 in small.witnesses.items())


@settings(max_examples=30)
@given(towers(), st.data())
def test_composite_coherence(data, draw):
    T = mult_tower(*data)
    j0 = draw.draw(st.integers(T.start, T.stop))
    j1 = draw.draw(st.integers(j0, T.stop))
    j2 = draw.draw(st.integers(j1, T.stop))
    assert T.composite(j2, j0).equals(T.composite(j1, j0).compose(T.composite(j2, j1)))
    # independent recomputation from the adjacent transitions
    f = ModuleMap.identity(T.level(j2))
    for j in range(j2 - 1, j0 - 1, -1):
        f = T.transition(j).compose(f)
    assert T.composite(j2, j0).equals(f)


@settings(max_examples=30)
@given(towers())
def test_pro_zero_matches_exponent_arithmetic(data):
    exps, shifts = data
    T = mult_tower(exps, shifts)
    c = is_pro_zero_up_to(T)
    # the composite j1 -> j0 is multiplication by x^(sum of shifts), zero iff that reaches e_j0
    for j0 in range(1, len(exps) + 1):
        least = None
        for j1 in range(j0, len(exps) + 1):
            if sum(shifts[j0 - 1 : j1 - 1]) >= exps[j0 - 1]:
                least = j1
                break
        assert c.witnesses.get(j0) == least


def test_tampered_evidence_fails_replay():
    c = is_pro_zero_up_to(zero_tower())
    bad = copy.deepcopy(c)
    zero = next(e for e in bad.evidence if e.claim == "zero")
    zero.matrix = [["1"]]
    assert not bad.replay()
    assert bad.evidence_hash() != c.evidence_hash()
    wrong = copy.deepcopy(c)
    wrong.offset = 0
    assert not wrong.replay()


def test_tampered_inverse_fails_replay():
    c = stabilization(truncated_tower(5))
    bad = copy.deepcopy(c)
    iso = next(e for e in bad.evidence if e.claim == "iso")
    iso.inverse = [["2"]]
    assert not bad.replay()
