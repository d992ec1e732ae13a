from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from surfacelattice.builtins import get_builtin
from surfacelattice.certificate import Verdict
from surfacelattice.engine import (
    ReplayState,
    rule_divisibility_three,
    rule_index_exclude,
    rule_parity_force,
    rule_rh_bound,
    rule_solve_unknown,
)
from surfacelattice.errors import (
    EmptyList,
    IntegralityViolation,
    InvariantViolation,
    MultipleUnknowns,
    WrongClassCount,
)
from surfacelattice.lattice import DivisorClass, IntersectionSpace
from surfacelattice.scenario import Scenario
from surfacelattice.toolkit import (
    K9,
    K11,
    RamificationProfile,
    SurfaceInvariants,
    adjunction_genus,
    adjunction_k,
    genus_additivity,
    mj_invariants,
    pa_branch,
    parity_check,
    rh_exclusion,
    rh_min_genus,
    riemann_roch_chi,
)


def test_standard_invariants():
    assert (K9.KD, K9.DD, K9.DB, K9.pa_branch) == (2, 14, 10, 3)
    assert (K11.KD, K11.DD, K11.DB, K11.pa_branch) == (0, 14, 14, 4)


def test_inconsistent_invariants_rejected():
    with pytest.raises(InvariantViolation):
        SurfaceInvariants(k=9, KK=-2, KD=2, DD=15, KB=6, BB=-2)


@given(st.integers(0, 30), st.integers(-40, 40))
def test_adjunction_round_trip(g, ss):
    assert adjunction_genus(adjunction_k(g, ss), ss) == g


def test_pa_and_additivity():
    assert pa_branch(-2, 6) == 3
    assert genus_additivity([2, 2, 1]) == 3
    with pytest.raises(IntegralityViolation):
        pa_branch(-1, 6)
    with pytest.raises(EmptyList):
        genus_additivity([])


def test_riemann_roch():
    assert riemann_roch_chi(1, 16, 0) == 9
    with pytest.raises(IntegralityViolation):
        riemann_roch_chi(1, 3, 0)


def test_mj_rows():
    assert [mj_invariants(j, K9) for j in range(1, 5)] == [
        (0, 16, 16), (-2, 18, 14), (-4, 20, 8), (-6, 22, -2)]
    assert mj_invariants(1, K11) == (-4, 14, 10)
    assert mj_invariants(2, K11) == (-8, 14, -2)


@pytest.mark.parametrize("degree, count, genus", [(2, 4, 1), (4, 4, 1), (2, 5, 2), (4, 5, 2), (8, 5, 3)])
def test_rh_min_genus(degree, count, genus):
    prof = RamificationProfile(degree, (Fraction(degree, 2),) * count)
    assert rh_min_genus(prof) == genus


def test_rh_exclusion_verdicts():
    assert rh_exclusion(3, 2, 9).verdict is Verdict.VIOLATION
    assert rh_exclusion(3, 2, 8).verdict is Verdict.SATISFIED


def test_parity_check():
    assert parity_check(3, [1]).verdict is Verdict.SATISFIED
    assert parity_check(3, [0]).verdict is Verdict.VIOLATION


def test_rh_bound_rule_rejects_odd_degree():
    s = get_builtin("k9-rational")
    c = rule_rh_bound(s, 5, 4)
    assert c.verdict is Verdict.VIOLATION
    assert rule_rh_bound(s, 4, 4, genus=1).verdict is Verdict.SATISFIED
    assert rule_rh_bound(s, 2, 4, genus=0).verdict is Verdict.VIOLATION


def test_divisibility_pins_low_genus():
    s = get_builtin("k11-rational")
    for g in (2, 3):
        c = rule_divisibility_three(s, g)
        assert c.verdict is Verdict.SATISFIED and c.data["gGamma"] == g - 1
    assert rule_divisibility_three(s, 4).verdict is Verdict.INCONCLUSIVE


def test_parity_force_rule_on_fibration():
    s = get_builtin("k9-rational")
    assert rule_parity_force(s, "G").verdict in (Verdict.SATISFIED, Verdict.RELATION_FORCED)


def _small(entries):
    space = IntersectionSpace.build(["P", "E"], entries, rank_bound=2)
    inv = SurfaceInvariants.from_branch(9, -2, 6, -2, rho=2)
    return Scenario("tiny", inv, space, (), {})


def test_index_rule_outcomes():
    s = _small({"P.P": 2, "P.E": 0, "E.E": -2})
    assert rule_index_exclude(s, "P", "E").verdict is Verdict.SATISFIED
    s = _small({"P.P": 2, "P.E": 0, "E.E": 0})
    state = ReplayState(s)
    c = rule_index_exclude(state, "P", "E", label="E0")
    assert c.verdict is Verdict.RELATION_FORCED
    assert state.relation("E0").rhs == DivisorClass()
    s = _small({"P.P": 2, "P.E": 0, "E.E": 1})
    assert rule_index_exclude(s, "P", "E").verdict is Verdict.VIOLATION


def test_solve_unknown_guards():
    s = get_builtin("k9-rational")
    with pytest.raises(WrongClassCount):
        rule_solve_unknown(s, ["K", "D", "F"], ["int"])
    resolved = s.with_space(s.space.resolve(8))
    with pytest.raises(MultipleUnknowns):
        rule_solve_unknown(resolved, ["K"], ["int"])


def test_solve_unknown_reports_rejections():
    c = rule_solve_unknown(get_builtin("k11-rational"),
                           ["K", "D", "F", "G"] + [f"N{i}" for i in range(11)], ["nonneg"])
    assert c.data["value"] == 4
    assert c.data["rejected"] == [{"root": -8, "reason": "negative"}]
