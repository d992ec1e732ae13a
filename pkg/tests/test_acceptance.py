"""Acceptance suite: one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py`` (lines appear in the terminal
summary) or directly with ``python3 tests/test_acceptance.py``.
"""

from fractions import Fraction
from pathlib import Path

from surfacelattice.branches import (
    CONTEXTS,
    PRIOR_K9_LIST,
    BranchCandidate,
    classify,
    enumerate_candidates,
    filter_candidates,
    verify_candidate,
)
from surfacelattice.builtins import get_builtin, nodes
from surfacelattice.certificate import Verdict
from surfacelattice.engine import replay_steps, rule_riemann_roch, rule_solve_unknown
from surfacelattice.fixtures import load_fixtures, validate_row
from surfacelattice.lattice import (
    DivisorClass,
    IntersectionSpace,
    det_poly,
    gram_matrix,
    pair_value,
)
from surfacelattice.poly import UniPoly
from surfacelattice.report import build_report
from surfacelattice.scenario import fibre_check
from surfacelattice.toolkit import K9, K11, RamificationProfile, mj_invariants, rh_min_genus

HERE = Path(__file__).parent
RESULTS: dict[int, str] = {}

x = UniPoly.variable("x")


def record(n: int, title: str):
    def wrap(fn):
        def test():
            try:
                fn()
            except BaseException:
                RESULTS[n] = f"criterion {n:>2} {title}: FAIL"
                print(RESULTS[n])
                raise
            RESULTS[n] = f"criterion {n:>2} {title}: PASS"
            print(RESULTS[n])
        test.__name__ = fn.__name__
        return test
    return wrap


def _elim_det(rows) -> Fraction:
    """Plain Gaussian elimination over Q, used as an independent oracle."""
    m = [list(map(Fraction, r)) for r in rows]
    n, det = len(m), Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if m[r][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            m[c], m[p] = m[p], m[c]
            det = -det
        det *= m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            m[r] = [a - f * b for a, b in zip(m[r], m[c])]
    return det


def _det_at(space, classes, value) -> Fraction:
    resolved = space.resolve(value)
    return _elim_det([[v.constant() for v in row] for row in gram_matrix(resolved, classes)])


@record(1, "Gram determinants 2^12(x-8) and 2^11(x-4)(x+8)")
def test_criterion_01_determinants():
    for name, k, want in [
        ("k9-rational", 9, (x - 8) * 2 ** 12),
        ("k11-rational", 11, (x - 4) * (x + 8) * 2 ** 11),
    ]:
        s = get_builtin(name)
        classes = [DivisorClass.of(c) for c in ["K", "D", "F", "G", *nodes(k)]]
        assert len(classes) == {9: 13, 11: 15}[k]
        got = det_poly(gram_matrix(s.space, classes))
        assert got == want
        for t in range(-2, 3):
            assert _det_at(s.space, classes, t) == want(t)


@record(2, "split quadratics, roots 4, 8, 8 and rejections")
def test_criterion_02_split_quadratics():
    expected = {
        "k9-three-components": ([576, -272, 32], 4, (Fraction(9, 2), "non-integer")),
        "k9-genus3-genus1": ([2304, -544, 32], 8, (Fraction(9), "odd")),
        "k9-genus2-genus2": ([1920, -496, 32], 8, (Fraction(15, 2), "non-integer")),
    }
    for name, (coeffs, root, (bad, why)) in expected.items():
        s = get_builtin(name)
        args = s.checks[0]["args"]
        c = rule_solve_unknown(s, args["classes"], args["admissible"],
                               orthogonal=args["orthogonal"])
        gram = gram_matrix(s.space, [DivisorClass.of(n) for n in args["classes"]])
        assert det_poly(gram) == UniPoly(coeffs, "x")
        assert c.verdict is Verdict.SATISFIED and c.data["value"] == root
        assert c.data["rejected"] == [{"root": bad, "reason": why}]


@record(3, "M_j intersection numbers")
def test_criterion_03_mj_tables():
    state = replay_steps(get_builtin("k9-rational")).state
    for j in range(1, 5):
        row = (-2 * j + 2, 2 * j + 14, -2 * j * j + 4 * j + 14)
        assert mj_invariants(j, K9) == row
        m = state.cls(f"M{j}")
        got = tuple(pair_value(state.space, a, m) for a in (state.cls("K"), state.cls("D"), m))
        assert got == row
    assert mj_invariants(1, K11) == (-4, 14, 10)
    assert mj_invariants(2, K11) == (-8, 14, -2)


@record(4, "Riemann-Roch h0 values")
def test_criterion_04_riemann_roch():
    cases = [("k9-rational", "M1", 9), ("k9-rational", "M2", 9), ("k9-rational", "M4", 3),
             ("k11-rational", "M1", 8), ("k11-rational", "M2", 4)]
    for name, cls, h0 in cases:
        c = rule_riemann_roch(get_builtin(name), cls)
        assert c.data["h0"] == h0, (name, cls, c.data)


def _bump(space: IntersectionSpace, a: str, b: str) -> IntersectionSpace:
    gram = dict(space.gram)
    key = (a, b) if (a, b) in gram else (b, a)
    gram[key] = gram[key] + 1
    return IntersectionSpace(space.symbols, gram, space.rank_bound, space.unknown)


@record(5, "fibre configurations valid, mutants rejected")
def test_criterion_05_fibres():
    checked = 0
    for name in ("k9-fibres-i", "k9-fibres-ii", "k11-fibres-i", "k11-fibres-ii"):
        s = get_builtin(name)
        space = replay_steps(s).state.space
        for fc in s.fibres:
            assert fibre_check(space, fc, "K", s.classes).verdict is Verdict.SATISFIED
            fibre = DivisorClass()
            for sym, m in fc.components:
                fibre = fibre + s.cls(sym) * m
            for sym in fibre:
                for a, b in (("K", sym), (sym, sym)):
                    bad = fibre_check(_bump(space, a, b), fc, "K", s.classes)
                    assert bad.verdict is Verdict.VIOLATION, (name, fc.label, a, b)
            checked += 1
    assert checked == 20


@record(6, "Riemann-Hurwitz 4 >= 5, 6 >= 7 and genus bounds")
def test_criterion_06_riemann_hurwitz():
    for name, text in (("k9-fibres-ii", "4 >= 5"), ("k11-fibres-ii", "6 >= 7")):
        last = replay_steps(get_builtin(name)).certificates[-1]
        assert last.rule == "rh_exclusion" and last.verdict is Verdict.VIOLATION
        assert text in last.conclusion
    half = Fraction(1, 2)
    assert rh_min_genus(RamificationProfile(2, (half * 2,) * 4)) == 1
    assert rh_min_genus(RamificationProfile(2, (half * 2,) * 5)) == 2
    assert rh_min_genus(RamificationProfile(4, (half * 4,) * 5)) == 2


def _class_verified(k, comp_cls) -> bool:
    """Pairing match and radical test, recomputed outside the engine."""
    c = comp_cls.certificate
    kc, fc, gc = (c.premise(n) for n in ("K.Gamma", "F.Gamma", "G.Gamma"))
    expr = DivisorClass.parse(comp_cls.expression)
    ss = comp_cls.component[1]
    base = replay_steps(get_builtin(CONTEXTS[k].scenario)).state.space.restrict(["K", "F", "G", "N0"])
    space = base.extend("Gamma", {"K": kc, "F": fc, "G": gc, "N0": 0, "Gamma": ss})
    diff = DivisorClass.of("Gamma") - expr
    return all(pair_value(space, diff, DivisorClass.of(s)) == 0 for s in space.symbols)


@record(7, "k=11 classification from scratch")
def test_criterion_07_k11():
    table = classify(11)
    got = {str(r.candidate): [c.expression for c in r.classes] for r in table.kept}
    assert got == {
        "(3,0) + (2,-2)": ["-2K+2F", "-2K+F+2G+N0"],
        "(3,-2) + (2,0)": ["-3K+2F+2G+N0", "-K+F"],
        "(4,-2)": [None],
    }
    for r in table.kept:
        for c in r.classes:
            if c.expression is not None:
                assert c.certificate.verdict is Verdict.RELATION_FORCED
                assert _class_verified(11, c)


@record(8, "k=9 refinement of the nine-case list")
def test_criterion_08_k9_filter():
    labels = {c: lab for lab, c in PRIOR_K9_LIST}
    table = filter_candidates(list(labels), get_builtin("k9-rational"), labels)
    assert sorted(r.label for r in table.kept) == ["b", "e", "g", "i"]
    why = {r.label: r.certificate for r in table.excluded}
    for lab in "acd":
        assert why[lab].rule == "rh_bound" and "g = 0 < 1" in why[lab].conclusion
    for lab, name in (("f", "k9-case-f"), ("h", "k9-case-h")):
        assert "F.Gamma = 5" in why[lab].conclusion
        steps = replay_steps(get_builtin(name)).certificates
        assert any(c.verdict is Verdict.RELATION_FORCED for c in steps)
        assert any(c.data.get("value") == 5 for c in steps)
    assert [str(r.candidate) for r in classify(9).kept] == [
        "(2,0) + (2,0) + (1,-2)", "(3,0) + (1,-2)", "(2,0) + (2,-2)", "(3,-2)"]


@record(9, "superset containment and self-oracle")
def test_criterion_09_superset():
    cs = CONTEXTS[9].constraints
    found = enumerate_candidates(K9, cs)
    assert {c for _, c in PRIOR_K9_LIST} <= set(found)
    for c in found:
        assert verify_candidate(K9, cs, c) == []
    # brute force over a box confirms nothing was missed
    box = [(g, ss) for g in range(0, 6) for ss in range(-12, 13)]
    singles = [BranchCandidate(((g, ss),)) for g, ss in box]
    pairs = [BranchCandidate((a, b)) for i, a in enumerate(box) for b in box[i:]]
    brute = {c for c in singles + pairs if not verify_candidate(K9, cs, c)}
    assert brute == {c for c in found if len(c.components) <= 2}


@record(10, "fixture integrity and golden report")
def test_criterion_10_fixtures():
    rows = load_fixtures()
    assert len(rows) == 24
    for r in rows:
        validate_row(r)
    assert build_report() == (HERE / "golden" / "report.txt").read_text(encoding="utf-8")


@record(11, "property suites")
def test_criterion_11_properties():
    import test_properties as props

    props.test_pair_bilinear_and_symmetric()
    props.test_det_agrees_with_cofactor_and_permutation_sum()
    props.test_hodge_bound_never_violated_on_hyperbolic_forms()
    props.test_rational_roots_back_substitute_to_zero()
    props.test_rational_roots_finds_planted_roots()


if __name__ == "__main__":
    import sys

    sys.path.insert(0, str(HERE))
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_criterion")]
    failed = 0
    for t in tests:
        try:
            t()
        except Exception:
            failed += 1
    sys.exit(1 if failed else 0)
