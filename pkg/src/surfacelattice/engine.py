"""Scripted rule applications that chain lattice and surface arithmetic into
checked proof steps.

Each rule takes the current :class:`ReplayState` plus keyword arguments from
a scenario's ``checks`` list and returns a :class:`Certificate`.  Rules that
pin down the unknown pairing or force a numerical relation hand the new
facts back through the state; the scenario document itself is never mutated.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Mapping, Sequence

from . import certificate as cert
from .certificate import Certificate, Premise, Verdict
from .errors import (
    MultipleUnknowns,
    RuleNotFound,
    SchemaError,
    UnexpectedVerdict,
    WrongClassCount,
)
from .lattice import (
    DivisorClass,
    combine,
    det_poly,
    gram_matrix,
    hodge_bound,
    pair,
    pair_value,
    radical_witness,
    rational_roots,
    solve_in_basis,
)
from .poly import as_fraction, factor_str, fmt_rational
from .scenario import AXIOMS, Scenario, fibre_check
from .toolkit import (
    RamificationProfile,
    parity_check,
    rh_exclusion,
    rh_min_genus,
    riemann_roch_chi,
)


@dataclass(frozen=True)
class Relation:
    label: str
    lhs: DivisorClass
    rhs: DivisorClass

    @property
    def difference(self) -> DivisorClass:
        return self.lhs - self.rhs


@dataclass
class ReplayState:
    scenario: Scenario
    relations: dict[str, Relation] = field(default_factory=dict)
    unknown_value: Fraction | None = None

    @property
    def space(self):
        return self.scenario.space

    def cls(self, expr) -> DivisorClass:
        return self.scenario.cls(expr)

    def render(self, c: DivisorClass) -> str:
        return c.render(self.space.symbols)

    def resolve(self, value: Fraction) -> None:
        self.scenario = self.scenario.with_space(self.space.resolve(value))
        self.unknown_value = value

    def relation(self, label: str) -> Relation:
        try:
            return self.relations[label]
        except KeyError:
            raise SchemaError(f"relation {label}", "no such forced relation yet") from None


RuleFn = Callable[..., Certificate]
RULES: dict[str, RuleFn] = {}


def rule(name: str):
    def deco(fn: RuleFn) -> RuleFn:
        RULES[name] = fn
        return fn
    return deco


def _state(s: Scenario | ReplayState) -> ReplayState:
    return s if isinstance(s, ReplayState) else ReplayState(s)


def _pv(state: ReplayState, a: DivisorClass, b: DivisorClass, label: str | None = None):
    v = pair_value(state.space, a, b)
    return (label or f"({state.render(a)}).({state.render(b)})", v, ("pair", a, b))


def _relation_text(state: ReplayState, lhs: DivisorClass, rhs: DivisorClass,
                   names: tuple = (None, None)) -> str:
    left = names[0] if isinstance(names[0], str) else state.render(lhs)
    right = names[1] if isinstance(names[1], str) else state.render(rhs)
    return f"{left} ≡ {right}"


def _compact(expr) -> str | None:
    return expr.replace(" ", "") if isinstance(expr, str) else None


# ---------------------------------------------------------------------------
# index theorem


@rule("index")
def rule_index_exclude(
    s, p, e=None, *, lhs=None, rhs=None, intent: str = "exclude",
    contradicts: str | None = None, generators: Sequence | None = None,
    label: str | None = None, anchor: str = "algebraic index theorem",
) -> Certificate:
    """Index-theorem step for ``p^2 > 0``.

    ``e`` may be given directly or as ``lhs - rhs``.  When ``p.e = 0`` and
    ``e^2 = 0`` the class must be numerically trivial; a visible nonzero
    pairing makes the configuration impossible (VIOLATION).  Otherwise the
    relation ``lhs ≡ rhs`` is forced, unless ``contradicts`` names an axiom
    that rules such a relation out, which again closes the branch.
    """
    state = _state(s)
    P = state.cls(p)
    if e is not None:
        E = state.cls(e)
        L, R = E, DivisorClass()
    else:
        L, R = state.cls(lhs), state.cls(rhs)
        E = L - R
    gens = None if generators is None else [state.cls(g) for g in generators]
    base = hodge_bound(state.space, P, E, gens)
    pe = base.premise(f"({state.render(P)}).({state.render(E)})")
    ee = base.premise(f"({state.render(E)})^2")
    premises = list(base.premises)
    if base.verdict is Verdict.VIOLATION:
        return cert.make("index", premises, base.conclusion, Verdict.VIOLATION,
                         anchor=anchor, axioms_cited=("HODGE_INDEX",))
    if pe != 0 or ee != 0:
        return cert.make("index", premises, base.conclusion, Verdict.SATISFIED,
                         anchor=anchor)
    rel = _relation_text(state, L, R, (_compact(lhs), _compact(rhs)) if e is None else (None, None))
    if intent == "exclude" and contradicts is None:
        # nothing visibly wrong, so the step degenerates into a derivation
        intent = "force"
    axioms = ("HODGE_INDEX",)
    if contradicts is not None:
        if contradicts not in AXIOMS:
            raise SchemaError("contradicts", f"unknown axiom {contradicts!r}")
        return cert.make(
            "index", premises,
            f"{rel} is forced, which is impossible: {AXIOMS[contradicts].statement}",
            Verdict.VIOLATION, anchor=anchor, axioms_cited=axioms + (contradicts,),
            relation=rel,
        )
    if isinstance(s, ReplayState):
        key = label or rel
        s.relations[key] = Relation(key, L, R)
    return cert.make("index", premises, f"{rel} (numerically)", Verdict.RELATION_FORCED,
                     anchor=anchor, axioms_cited=axioms, relation=rel)


@rule("index_range")
def rule_index_range(
    s, p, e, *, low: int, high: int, anchor: str = "algebraic index theorem",
) -> Certificate:
    """Integer values of the unknown allowed by ``e^2 p^2 <= (p.e)^2``."""
    state = _state(s)
    space = state.space
    if space.unknown is None:
        raise MultipleUnknowns("index_range needs exactly one unresolved unknown")
    P, E = state.cls(p), state.cls(e)
    pp_poly, ee_poly, pe_poly = pair(space, P, P), pair(space, E, E), pair(space, P, E)
    allowed, rejected = [], []
    for t in range(low, high + 1):
        pp, ee, pe = pp_poly(t), ee_poly(t), pe_poly(t)
        if pp <= 0:
            rejected.append((t, "p^2 <= 0"))
        elif ee * pp > pe * pe:
            rejected.append((t, f"e^2={fmt_rational(ee)} > {fmt_rational(pe * pe / pp)}"))
        else:
            allowed.append(t)
    var = space.unknown
    premises = [
        (f"({state.render(E)})^2", ee_poly, ("pair", E, E)),
        (f"({state.render(P)}).({state.render(E)})", pe_poly, ("pair", P, E)),
        (f"({state.render(P)})^2", pp_poly, ("pair", P, P)),
        (f"{var} range", [low, high]),
    ]
    data = {"allowed": allowed, "rejected": [f"{t}: {why}" for t, why in rejected]}
    if not allowed:
        return cert.make("index_range", premises, f"no {var} in [{low},{high}] survives",
                         Verdict.VIOLATION, anchor=anchor, axioms_cited=("HODGE_INDEX",),
                         data=data)
    if len(allowed) == 1:
        if isinstance(s, ReplayState):
            s.resolve(Fraction(allowed[0]))
        data["value"] = allowed[0]
        return cert.make("index_range", premises, f"{var} = {allowed[0]}", Verdict.SATISFIED,
                         anchor=anchor, axioms_cited=("HODGE_INDEX",), data=data)
    return cert.make("index_range", premises, f"{var} in {allowed}", Verdict.INCONCLUSIVE,
                     anchor=anchor, axioms_cited=("HODGE_INDEX",), data=data)


# ---------------------------------------------------------------------------
# determinant condition


_ADMISSIBLE = {"int", "integer", "even", "nonneg", "nonnegative", "positive"}


def _admissibility(root: Fraction, tokens: Sequence[str]) -> str | None:
    """Return the rejection reason, or None if ``root`` passes every test."""
    for token in tokens:
        if token.startswith("exclude:"):
            if root == Fraction(token.split(":", 1)[1]):
                return "excluded"
            continue
        if token not in _ADMISSIBLE:
            raise SchemaError("admissible", f"unknown admissibility test {token!r}")
        if token in ("int", "integer", "even") and root.denominator != 1:
            return "non-integer"
        if token == "even" and root.numerator % 2:
            return "odd"
        if token in ("nonneg", "nonnegative") and root < 0:
            return "negative"
        if token == "positive" and root <= 0:
            return "non-positive"
    return None


@rule("solve_unknown")
def rule_solve_unknown(
    s, classes: Sequence, admissible: Sequence[str] = (), *,
    orthogonal: Sequence[str] = (), anchor: str = "Picard number forces a singular Gram",
) -> Certificate:
    """Pin the unknown by the vanishing of a rank-saturating Gram determinant.

    ``classes`` plus the ``orthogonal`` nodal classes must number rho + 1;
    the orthogonal classes must be perpendicular to every listed class.
    """
    state = _state(s)
    space = state.space
    if space.unknown is None:
        raise MultipleUnknowns("expected exactly one unresolved unknown, found none")
    rho = state.scenario.invariants.rho or space.rank_bound
    cs = [state.cls(c) for c in classes]
    orth = [state.cls(o) for o in orthogonal]
    if rho is None or len(cs) + len(orth) != rho + 1:
        raise WrongClassCount(
            f"{len(cs)} classes + {len(orth)} orthogonal != rho + 1 = {None if rho is None else rho + 1}"
        )
    premises: list = []
    axioms = ["PICARD_RANK"]
    if orth:
        axioms.append("NODAL_COMPLEMENT")
        for c in cs:
            for o in orth:
                v = pair_value(space, c, o)
                if v != 0:
                    return cert.make(
                        "solve_unknown", [_pv(state, c, o)],
                        f"{state.render(c)} is not orthogonal to {state.render(o)}",
                        Verdict.VIOLATION, anchor=anchor,
                    )
        odet = det_poly(gram_matrix(space, orth))
        premises.append(("det of orthogonal block", odet))
        if odet.is_zero():
            return cert.make("solve_unknown", premises, "orthogonal block is degenerate",
                             Verdict.INCONCLUSIVE, anchor=anchor)
        premises.append(("classes orthogonal to block", [state.render(o) for o in orth]))
    poly = det_poly(gram_matrix(space, cs))
    premises.insert(0, ("Gram determinant", poly,
                        ("det", tuple(cs))))
    var = space.unknown
    data: dict[str, Any] = {"polynomial": str(poly), "factored": factor_str(poly),
                            "unknown": var}
    if poly.is_zero():
        return cert.make("solve_unknown", premises, "determinant vanishes identically",
                         Verdict.INCONCLUSIVE, anchor=anchor, axioms_cited=tuple(axioms),
                         data=data)
    roots = rational_roots(poly)
    accepted, rejected = [], []
    for r in roots:
        why = _admissibility(r, admissible)
        (rejected.append((r, why)) if why else accepted.append(r))
    distinct = sorted(set(accepted))
    data.update(roots=roots, accepted=distinct,
                rejected=[{"root": r, "reason": why} for r, why in rejected],
                admissible=list(admissible))
    premises.append(("rational roots", roots))
    if not distinct:
        return cert.make("solve_unknown", premises, f"no admissible root for {var}",
                         Verdict.VIOLATION, anchor=anchor, axioms_cited=tuple(axioms),
                         data=data)
    if len(distinct) > 1:
        return cert.make(
            "solve_unknown", premises,
            f"{var} in {{{', '.join(fmt_rational(r) for r in distinct)}}}: ambiguous",
            Verdict.INCONCLUSIVE, anchor=anchor, axioms_cited=tuple(axioms), data=data)
    value = distinct[0]
    data["value"] = value
    if isinstance(s, ReplayState):
        s.resolve(value)
    rej = "; ".join(f"{fmt_rational(r)} rejected ({why})" for r, why in rejected)
    return cert.make(
        "solve_unknown", premises,
        f"{factor_str(poly)} = 0 gives {var} = {fmt_rational(value)}" + (f"; {rej}" if rej else ""),
        Verdict.SATISFIED, anchor=anchor, axioms_cited=tuple(axioms), data=data)


# ---------------------------------------------------------------------------
# parity, Riemann-Hurwitz, divisibility


@rule("parity")
def rule_parity_force(
    s, c, *, nodes: Sequence[str] | None = None, on_odd: str = "force-node",
    branch: str = "B0",
) -> Certificate:
    """``c.(B0 + sum N_i)`` must be even; odd totals force or exclude."""
    state = _state(s)
    C = state.cls(c)
    B = state.cls(branch)
    nodal = list(nodes) if nodes is not None else list(state.scenario.nodal)
    cb = pair_value(state.space, C, B)
    cn = [pair_value(state.space, C, state.cls(n)) for n in nodal]
    base = parity_check(int(cb), [int(v) for v in cn])
    premises = [_pv(state, C, B, f"{state.render(C)}.B0")] + [
        _pv(state, C, state.cls(n), f"{state.render(C)}.{n}") for n in nodal
    ] + [("total", cb + sum(cn))]
    cr = state.render(C)
    if base.verdict is Verdict.SATISFIED:
        concl = f"{cr}.(B0+sum N_i) = {cb + sum(cn)} is even"
    elif on_odd == "force-node":
        concl = f"{cr}.(B0+{'+'.join(nodal) or '0'}) is odd, so {cr} must meet another node"
    else:
        concl = f"{cr}.(B0+sum N_i) = {cb + sum(cn)} is odd; configuration excluded"
    return cert.make("parity", premises, concl, base.verdict,
                     anchor="double cover data 2L = B0 + sum N_i",
                     axioms_cited=("BRANCH_SMOOTH_DISJOINT",))


def _degree(state: ReplayState, degree) -> tuple[Fraction, tuple]:
    if isinstance(degree, (list, tuple)):
        a, b = state.cls(degree[0]), state.cls(degree[1])
        return pair_value(state.space, a, b), ("pair", a, b)
    return as_fraction(degree), ()


@rule("rh_bound")
def rule_rh_bound(
    s, degree, fibre_count: int, *, share="1/2", genus: int | None = None,
) -> Certificate:
    """Horizontal curve of fibre degree d through ``fibre_count`` double fibres.

    d = 2 G_j.Gamma is even and >= 2; each double fibre contributes
    ``share * d`` to the ramification, bounding the genus from below.
    """
    state = _state(s)
    d, replay = _degree(state, degree)
    share = as_fraction(share)
    premises = [("degree d = F.Gamma", d, replay) if replay else ("degree d = F.Gamma", d),
                ("double fibres", fibre_count), ("ramification per fibre", share * d)]
    anchor = "Riemann-Hurwitz over the fibration"
    if d.denominator != 1 or d % 2 or d < 2:
        return cert.make("rh_bound", premises,
                         f"F.Gamma = {fmt_rational(d)} is not an even integer >= 2",
                         Verdict.VIOLATION, anchor=anchor)
    gmin = rh_min_genus(RamificationProfile(int(d), (share * d,) * fibre_count))
    premises.append(("genus lower bound", gmin))
    data = {"min_genus": gmin}
    if genus is not None:
        premises.append(("genus", genus))
        if genus < gmin:
            return cert.make("rh_bound", premises, f"g = {genus} < {gmin}",
                             Verdict.VIOLATION, anchor=anchor, data=data)
    return cert.make("rh_bound", premises, f"g >= {gmin}", Verdict.SATISFIED,
                     anchor=anchor, data=data)


@rule("divisibility_three")
def rule_divisibility_three(
    s, g: int, gGamma_range: Sequence[int] = (0, 3),
) -> Certificate:
    """3(F.Gamma - K.Gamma) = 2(g - 1 - G.Gamma) forces G.Gamma = g - 1."""
    lo, hi = gGamma_range
    sols = [t for t in range(lo, hi + 1) if (g - 1 - t) % 3 == 0]
    premises = [("genus", g), ("G.Gamma range", [lo, hi]), ("solutions", sols)]
    anchor = "adjunction against the B0 relation"
    if not sols:
        return cert.make("divisibility_three", premises, "no G.Gamma survives",
                         Verdict.VIOLATION, anchor=anchor)
    if len(sols) > 1:
        return cert.make("divisibility_three", premises, f"G.Gamma in {sols}",
                         Verdict.INCONCLUSIVE, anchor=anchor, data={"solutions": sols})
    t = sols[0]
    shift = Fraction(2 * (g - 1 - t), 3)
    rel = "K.Gamma = F.Gamma" if shift == 0 else f"F.Gamma = K.Gamma + {fmt_rational(shift)}"
    return cert.make("divisibility_three", premises, f"G.Gamma = {t}, {rel}",
                     Verdict.SATISFIED, anchor=anchor,
                     data={"gGamma": t, "f_minus_k": shift})


@rule("rh_exclusion")
def rule_rh_exclusion(s, degree, ramification: Sequence, *, pa: int | None = None,
                      anchor: str = "Riemann-Hurwitz over P^1") -> Certificate:
    state = _state(s)
    d, rep = _degree(state, degree)
    if pa is None:
        pa = state.scenario.invariants.pa_branch
    premises = [("p_a(B0)", pa), ("degree", d, rep)]
    total = Fraction(0)
    for item in ramification:
        v, r = _degree(state, item)
        premises.append((f"ramification {'.'.join(map(str, item)) if isinstance(item, (list, tuple)) else item}", v, r))
        total += v
    base = rh_exclusion(pa, int(d), total)
    premises.extend(p for p in base.premises if p.description not in ("degree",))
    return cert.make("rh_exclusion", premises, base.conclusion, base.verdict, anchor=anchor)


# ---------------------------------------------------------------------------
# relations


@rule("basis_relation")
def rule_basis_relation(s, target, basis: Sequence, *, label: str | None = None) -> Certificate:
    """Express ``target`` in a rank-rho basis through the form."""
    state = _state(s)
    T = state.cls(target)
    B = [state.cls(b) for b in basis]
    coeffs = solve_in_basis(state.space, T, B)
    rhs = combine(coeffs, B)
    gdet = det_poly(gram_matrix(state.space, B))
    rho = state.scenario.invariants.rho
    premises = [("basis Gram determinant", gdet, ("det", tuple(B))),
                ("basis size", len(B)), ("rho", rho),
                ("coefficients", coeffs)]
    premises += [_pv(state, T, b) for b in B]
    rel = _relation_text(state, T, rhs)
    if rho is not None and len(B) != rho:
        return cert.make("basis_relation", premises,
                         f"{rel} on the span only (basis size {len(B)} != rho {rho})",
                         Verdict.INCONCLUSIVE, anchor="basis of Num(W)", relation=rel)
    if isinstance(s, ReplayState):
        key = label or rel
        s.relations[key] = Relation(key, T, rhs)
    return cert.make("basis_relation", premises, rel, Verdict.RELATION_FORCED,
                     anchor="basis of Num(W)", axioms_cited=("BASIS_SPANS",), relation=rel,
                     data={"coefficients": coeffs})


@rule("relation")
def rule_relation(s, lhs, rhs, *, axioms: Sequence[str] = (), label: str | None = None,
                  generators: Sequence | None = None) -> Certificate:
    """Record a relation that holds by construction, checked against the data.

    Every known pairing of ``lhs - rhs`` must vanish; unknown ones are listed.
    """
    state = _state(s)
    L, R = state.cls(lhs), state.cls(rhs)
    E = L - R
    gens = ([state.cls(g) for g in generators] if generators is not None
            else [DivisorClass.of(x) for x in state.space.symbols])
    witness, skipped = radical_witness(state.space, E, gens)
    rel = _relation_text(state, L, R, (_compact(lhs), _compact(rhs)))
    for a in axioms:
        if a not in AXIOMS:
            raise SchemaError("axioms", f"unknown axiom {a!r}")
    if witness is not None:
        return cert.make("relation", [_pv(state, E, witness)],
                         f"{rel} contradicts the Gram data", Verdict.VIOLATION,
                         anchor="definition", axioms_cited=tuple(axioms))
    if isinstance(s, ReplayState):
        key = label or rel
        s.relations[key] = Relation(key, L, R)
    premises = [("generators checked", len(gens) + 1 - len(skipped)),
                ("pairings not yet known", skipped)]
    return cert.make("relation", premises, rel, Verdict.RELATION_FORCED,
                     anchor="definition", axioms_cited=tuple(axioms), relation=rel)


@rule("relation_pair")
def rule_relation_pair(s, combination: Sequence, against, *,
                       anchor: str = "pairing a forced relation") -> Certificate:
    """Pair a combination of forced relations with a class; it must vanish.

    ``combination`` lists ``[label, coefficient]``.  If the pairing involves
    the unknown, the linear equation resolves it.
    """
    state = _state(s)
    E = DivisorClass()
    used = []
    for label, coeff in combination:
        r = state.relation(label)
        E = E + r.difference * as_fraction(coeff)
        used.append(f"{fmt_rational(as_fraction(coeff))}*({label})")
    A = state.cls(against)
    val = pair(state.space, A, E)
    premises = [("combined relation", f"{state.render(E)} ≡ 0"),
                (f"({state.render(A)}).({state.render(E)})", val, ("pair", A, E))]
    if val.is_constant():
        ok = val.constant() == 0
        return cert.make("relation_pair", premises,
                         "consistent" if ok else f"pairing is {val}, not 0",
                         Verdict.SATISFIED if ok else Verdict.VIOLATION, anchor=anchor)
    (root,) = rational_roots(val)
    var = state.space.unknown
    if isinstance(s, ReplayState):
        s.resolve(root)
    return cert.make("relation_pair", premises, f"{val} = 0 gives {var} = {fmt_rational(root)}",
                     Verdict.SATISFIED, anchor=anchor, data={"value": root})


@rule("compare")
def rule_compare(s, lhs, op: str, rhs, *, axioms: Sequence[str] = (),
                 requires: Sequence = (), relations: Sequence[str] = (),
                 anchor: str = "") -> Certificate:
    """Check ``lhs op rhs`` where each side is a number, a pairing ``[a, b]``
    or a scaled pairing ``[c, a, b]``.

    ``requires`` lists ``[a, b, value]`` pairings that must hold for the cited
    axioms to apply, and ``relations`` names forced relations they rely on;
    both are verified and recorded.
    """
    state = _state(s)
    premises = []
    for label in relations:
        r = state.relation(label)
        premises.append((f"relation {label}", _relation_text(state, r.lhs, r.rhs)))
    for a, b, want in requires:
        p = _pv(state, state.cls(a), state.cls(b))
        premises.append(p)
        if p[1] != as_fraction(want):
            return cert.make("compare", premises,
                             f"premise {p[0]} = {fmt_rational(p[1])} != {want}",
                             Verdict.INCONCLUSIVE, anchor=anchor, axioms_cited=tuple(axioms))
    lv, lr = _side(state, lhs)
    rv, rr = _side(state, rhs)
    premises += [("lhs", lv, lr) if lr else ("lhs", lv), ("rhs", rv, rr) if rr else ("rhs", rv)]
    holds = {"<=": lv <= rv, ">=": lv >= rv, "==": lv == rv, "<": lv < rv, ">": lv > rv,
             "!=": lv != rv}[op]
    text = f"{_side_text(state, lhs, lv)} {op} {_side_text(state, rhs, rv)}"
    return cert.make("compare", premises, text if holds else f"{text} fails",
                     Verdict.SATISFIED if holds else Verdict.VIOLATION, anchor=anchor,
                     axioms_cited=tuple(axioms))


def _side_text(state: ReplayState, side, value: Fraction) -> str:
    if not isinstance(side, (list, tuple)):
        return fmt_rational(value)
    if len(side) == 3:
        return f"{side[0]}*{side[1]}.{side[2]} = {fmt_rational(value)}"
    return f"{side[0]}.{side[1]} = {fmt_rational(value)}"


def _side(state: ReplayState, side):
    if isinstance(side, (list, tuple)):
        if len(side) == 3:
            scale = as_fraction(side[0])
            v, r = _degree(state, side[1:])
            # fold the scale into the replayed pairing so the premise recomputes
            return scale * v, (r[0], r[1] * scale, r[2]) if r else r
        return _degree(state, side)
    return as_fraction(side), ()


# ---------------------------------------------------------------------------
# surface-level checks


@rule("riemann_roch")
def rule_riemann_roch(s, c, *, equals: int | None = None, K: str = "K") -> Certificate:
    """chi(O(c)) = chi(O) + (c^2 - K.c)/2, read as h^0 under assumed vanishing."""
    state = _state(s)
    C, KC = state.cls(c), state.cls(K)
    cc = pair_value(state.space, C, C)
    kc = pair_value(state.space, KC, C)
    chi = riemann_roch_chi(state.scenario.invariants.chiO, int(cc), int(kc))
    premises = [_pv(state, C, C), _pv(state, KC, C),
                ("chi(O_W)", state.scenario.invariants.chiO), ("chi", chi)]
    name = state.render(C)
    verdict = Verdict.SATISFIED if equals is None or equals == chi else Verdict.VIOLATION
    concl = f"h^0({name}) = {chi} (vanishing assumed)"
    if verdict is Verdict.VIOLATION:
        concl = f"chi({name}) = {chi} != {equals}"
    return cert.make("riemann_roch", premises, concl, verdict,
                     anchor="Riemann-Roch", axioms_cited=("VANISHING_ASSUMED",),
                     data={"h0": chi, "vanishing_assumed": True})


@rule("fibre")
def rule_fibre(s, label: str, *, K: str = "K") -> Certificate:
    state = _state(s)
    return fibre_check(state.space, state.scenario.fibre(label), state.cls(K),
                       state.scenario.classes)


@rule("vertical_component")
def rule_vertical_component(s, relation: str, *, K: str = "K", F: str = "F",
                            G: str = "G", g_gamma: Sequence[int] = (0, 1)) -> Certificate:
    """Can a branch component lie in a fibre?

    With ``B0 ≡ aK + bF + cG + N0`` and a smooth rational Gamma in a fibre
    (F.Gamma = 0, N0.Gamma = 0), adjunction gives
    ``-2 = (a+1) K.Gamma + c G.Gamma``; no integral K.Gamma means no.
    """
    state = _state(s)
    r = state.relation(relation)
    rhs = r.rhs
    a, c = rhs.get(K), rhs.get(G)
    premises = [("B0 relation", relation), ("K coefficient", a), ("G coefficient", c)]
    sols = []
    for t in g_gamma:
        num = -2 - c * t
        den = a + 1
        kg = num / den if den else None
        premises.append((f"(K.Gamma) at G.Gamma={t}", kg if kg is not None else "undefined"))
        if kg is not None and kg.denominator == 1:
            sols.append((t, kg))
    if sols:
        return cert.make("vertical_component", premises,
                         f"vertical components possible: {sols}", Verdict.SATISFIED,
                         anchor="branch components versus fibres")
    return cert.make("vertical_component", premises,
                     "no branch component lies in a fibre", Verdict.VIOLATION,
                     anchor="branch components versus fibres",
                     axioms_cited=("BRANCH_SMOOTH_DISJOINT",))


@rule("mj")
def rule_mj(s, j: int, *, K: str = "K", D: str = "D") -> Certificate:
    """Cross-check the closed M_j formulas against the Gram pairings."""
    from .toolkit import mj_invariants

    state = _state(s)
    Kc, Dc = state.cls(K), state.cls(D)
    M = Kc * j + Dc
    formula = mj_invariants(j, state.scenario.invariants)
    computed = (pair_value(state.space, Kc, M), pair_value(state.space, Dc, M),
                pair_value(state.space, M, M))
    premises = [_pv(state, Kc, M, f"K.M{j}"), _pv(state, Dc, M, f"D.M{j}"),
                _pv(state, M, M, f"M{j}^2"), ("closed form", list(formula))]
    ok = tuple(computed) == formula
    return cert.make("mj", premises,
                     f"M{j}: (K.M, D.M, M^2) = ({', '.join(fmt_rational(v) for v in computed)})"
                     + ("" if ok else f" but formula gives {formula}"),
                     Verdict.SATISFIED if ok else Verdict.VIOLATION, anchor="M_j table")


@rule("axiom")
def rule_axiom(s, axiom: str, *, conclusion: str, verdict: str = "VIOLATION",
               requires: Sequence = ()) -> Certificate:
    """Cite a geometric fact the arithmetic cannot carry, verifying its numeric premises."""
    state = _state(s)
    if axiom not in AXIOMS:
        raise SchemaError("axiom", f"unknown axiom {axiom!r}")
    premises = []
    for a, b, want in requires:
        p = _pv(state, state.cls(a), state.cls(b))
        premises.append(p)
        if p[1] != as_fraction(want):
            return cert.make("axiom", premises, f"premise {p[0]} = {fmt_rational(p[1])} != {want}",
                             Verdict.INCONCLUSIVE, axioms_cited=(axiom,))
    return cert.make("axiom", premises, conclusion, Verdict[verdict],
                     anchor=AXIOMS[axiom].anchor, axioms_cited=(axiom,))


# ---------------------------------------------------------------------------
# replay


@dataclass
class ReplayStep:
    index: int
    label: str
    certificate: Certificate
    expected: str | None
    space: Any  # the space the certificate's premises refer to

    @property
    def met(self) -> bool:
        return self.expected is None or self.expected == self.certificate.verdict.value


@dataclass
class ReplayResult:
    scenario: Scenario
    steps: list[ReplayStep]
    state: ReplayState

    @property
    def certificates(self) -> list[Certificate]:
        return [st.certificate for st in self.steps]

    @property
    def ok(self) -> bool:
        return all(st.met for st in self.steps)


def run_check(state: ReplayState, check: Mapping[str, Any]) -> Certificate:
    name = check["rule"]
    try:
        fn = RULES[name]
    except KeyError:
        raise RuleNotFound(f"no rule {name!r}") from None
    args = dict(check.get("args") or {})
    return fn(state, **args)


def replay_steps(s: Scenario, fail_fast: bool = True) -> ReplayResult:
    if not s.checks:
        raise SchemaError("$.checks", f"scenario {s.name!r} has no checks to replay")
    state = ReplayState(s)
    steps: list[ReplayStep] = []
    result = ReplayResult(s, steps, state)
    for i, check in enumerate(s.checks):
        space_before = state.space
        c = run_check(state, check)
        exp = check.get("expect")
        step = ReplayStep(i, check.get("label", check["rule"]), c, exp, space_before)
        steps.append(step)
        if fail_fast and not step.met:
            err = UnexpectedVerdict(i, exp, c.verdict.value, check["rule"])
            err.result = result
            raise err
    return result


def replay(s: Scenario) -> list[Certificate]:
    return replay_steps(s).certificates


def replay_premise(space, premise: Premise):
    """Recompute a premise value from its recorded operation."""
    if not premise.replay:
        return premise.value
    op, *args = premise.replay
    if op == "pair":
        p = pair(space, args[0], args[1])
        return p.constant() if p.is_constant() else p
    if op == "det":
        p = det_poly(gram_matrix(space, list(args[0])))
        return p
    raise ValueError(f"unknown replay op {op!r}")
