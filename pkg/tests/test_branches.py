import pytest

from surfacelattice.branches import (
    CONTEXTS,
    PRIOR_K9_LIST,
    BranchCandidate,
    ConstraintSet,
    classify,
    enumerate_candidates,
    enumerate_with_metadata,
    filter_candidates,
    solve_component_classes,
    verify_candidate,
)
from surfacelattice.builtins import get_builtin
from surfacelattice.certificate import Verdict
from surfacelattice.errors import UnboundedSearch, UnknownVariant
from surfacelattice.toolkit import K9, K11, SurfaceInvariants


def cand(*comps):
    return BranchCandidate(tuple(comps))


def test_candidate_is_canonically_ordered():
    assert cand((1, -2), (2, 0), (2, 0)).components == ((2, 0), (2, 0), (1, -2))
    assert str(cand((1, -2), (3, 0))) == "(3,0) + (1,-2)"


@pytest.mark.parametrize("k", [9, 11])
def test_every_enumerated_candidate_rechecks(k):
    ctx = CONTEXTS[k]
    inv = K9 if k == 9 else K11
    for c in enumerate_candidates(inv, ctx.constraints):
        assert verify_candidate(inv, ctx.constraints, c) == []


def test_k9_enumeration_contains_prior_list():
    found = set(enumerate_candidates(K9, CONTEXTS[9].constraints))
    assert {c for _, c in PRIOR_K9_LIST} <= found


def test_k11_enumeration_is_exact():
    found = enumerate_candidates(K11, CONTEXTS[11].constraints)
    assert set(found) == {cand((4, -2)), cand((3, 0), (2, -2)), cand((3, -2), (2, 0)),
                          cand((2, 0), (2, 0), (2, -2))}


def test_component_cap_recorded():
    enum = enumerate_with_metadata(K9, CONTEXTS[9].constraints)
    assert enum.cap == 6
    assert "K.Gamma" in enum.cap_reason


def test_unbounded_search_refused():
    with pytest.raises(UnboundedSearch):
        enumerate_candidates(K9, ConstraintSet(hodge=False))
    with pytest.raises(UnboundedSearch):
        enumerate_candidates(K9, ConstraintSet(dgamma_min=-1))


def test_single_component_case():
    inv = SurfaceInvariants.from_branch(5, 2, 2, -2)
    assert enumerate_candidates(inv, ConstraintSet(max_components=1)) == [cand((1, -2))]


def test_k9_filter_keeps_four():
    labels = {c: lab for lab, c in PRIOR_K9_LIST}
    table = filter_candidates(labels, get_builtin("k9-rational"), labels)
    assert sorted(r.label for r in table.kept) == ["b", "e", "g", "i"]
    reasons = {r.label: r.certificate for r in table.excluded}
    for lab in "acd":
        assert reasons[lab].rule == "rh_bound" and "g = 0 < 1" in reasons[lab].conclusion
    for lab in "fh":
        assert "F.Gamma = 5" in reasons[lab].conclusion


def test_k11_filter_drops_three_components():
    table = filter_candidates(enumerate_candidates(K11, CONTEXTS[11].constraints),
                              get_builtin("k11-rational"))
    assert table.excluded_candidates() == [cand((2, 0), (2, 0), (2, -2))]


@pytest.mark.parametrize("k, branch, classes", [
    (9, [(2, 0), (2, 0), (1, -2)], ["-2K+F", "-2K+F", "-2K+2G+N0"]),
    (9, [(3, 0), (1, -2)], ["-4K+2F", "-2K+2G+N0"]),
    (9, [(2, -2), (2, 0)], ["-2K+F", "-4K+F+2G+N0"]),
    (11, [(3, 0), (2, -2)], ["-2K+2F", "-2K+F+2G+N0"]),
    (11, [(3, -2), (2, 0)], ["-3K+2F+2G+N0", "-K+F"]),
])
def test_component_classes(k, branch, classes):
    s = get_builtin(CONTEXTS[k].scenario)
    out = solve_component_classes(s, cand(*branch))
    assert [c.expression for c in out] == classes
    assert all(c.certificate.verdict is Verdict.RELATION_FORCED for c in out)


def test_single_component_class_undetermined():
    (c,) = solve_component_classes(get_builtin("k11-rational"), cand((4, -2)))
    assert c.expression is None and c.certificate.verdict is Verdict.INCONCLUSIVE


def test_classify_variants():
    assert len(classify(11).kept) == 3
    assert len(classify(9).kept) == 4
    assert [str(r.candidate) for r in classify(5).kept] == ["(1,-2)"]
    assert len(classify(9, "enriques-fixture").kept) == 2
    with pytest.raises(UnknownVariant):
        classify(13)
    with pytest.raises(UnknownVariant):
        classify(9, "irrational")


def test_table_serialisations_are_stable():
    t = classify(11)
    assert t.to_dict() == classify(11).to_dict()
    assert "(3,0) ≡ -2K+2F" in t.to_text()
