"""Enumerate, filter and solve branch-divisor decompositions.

A candidate is a multiset of ``(g, ss)`` pairs: genus and self-intersection
of the disjoint smooth components of B0.  Enumeration is exhaustive under a
:class:`ConstraintSet`; filtering replays the exclusion scenarios; solving
expresses each surviving component in the fibration basis ``K, F, G, N0``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import floor
from typing import Iterable, Sequence

from . import certificate as cert
from .builtins import get_builtin, gram_split_doc
from .certificate import Certificate, Verdict
from .engine import (
    ReplayState,
    replay_steps,
    rule_divisibility_three,
    rule_index_exclude,
    rule_rh_bound,
)
from .errors import InvariantViolation, UnboundedSearch, UnknownVariant
from .fixtures import load_fixtures
from .lattice import DivisorClass, combine, pair_value, solve_in_basis
from .scenario import Scenario, load_scenario
from .toolkit import (
    RamificationProfile,
    SurfaceInvariants,
    adjunction_k,
    genus_additivity,
    rh_min_genus,
)

Component = tuple[int, int]


def _key(c: Component) -> tuple[int, int]:
    return (-c[0], -c[1])


@dataclass(frozen=True)
class BranchCandidate:
    components: tuple[Component, ...]

    def __post_init__(self):
        comps = tuple(sorted((tuple(map(int, c)) for c in self.components), key=_key))
        if not comps:
            raise ValueError("a branch divisor has at least one component")
        if any(g < 0 for g, _ in comps):
            raise ValueError("genus must be >= 0")
        object.__setattr__(self, "components", comps)

    @classmethod
    def of(cls, *comps: Component) -> "BranchCandidate":
        return cls(tuple(comps))

    @property
    def r(self) -> int:
        return len(self.components) - 1

    @property
    def KB(self) -> int:
        return sum(adjunction_k(g, ss) for g, ss in self.components)

    @property
    def BB(self) -> int:
        return sum(ss for _, ss in self.components)

    @property
    def pa(self) -> int:
        return genus_additivity([g for g, _ in self.components])

    def problems(self, inv: SurfaceInvariants) -> list[str]:
        out = []
        if self.KB != inv.KB:
            out.append(f"sum K.Gamma = {self.KB} != K.B0 = {inv.KB}")
        if self.BB != inv.BB:
            out.append(f"sum Gamma^2 = {self.BB} != B0^2 = {inv.BB}")
        if self.pa != inv.pa_branch:
            out.append(f"sum g - r = {self.pa} != p_a(B0) = {inv.pa_branch}")
        return out

    def sort_key(self):
        return (len(self.components), tuple(_key(c) for c in self.components))

    def __str__(self) -> str:
        return " + ".join(f"({g},{ss})" for g, ss in self.components)

    def to_json(self) -> list[list[int]]:
        return [list(c) for c in self.components]


# ---------------------------------------------------------------------------
# constraints


@dataclass(frozen=True)
class FibreDegrees:
    """Fibration data: each component has even F-degree d >= 2, the degrees
    sum to F.B0, and ``fibre_count`` double fibres each ramify ``share*d``.

    With ``divisibility`` the relation 3(F - K).Gamma = 2(g - 1 - G.Gamma),
    0 <= G.Gamma <= ``g_gamma_max``, pins F.Gamma when it has one solution.
    """

    fibre_count: int
    fb: int
    share: Fraction = Fraction(1, 2)
    divisibility: bool = False
    g_gamma_max: int = 3

    def degrees(self, g: int, ss: int) -> list[int]:
        kc = adjunction_k(g, ss)
        out = []
        for d in range(2, self.fb + 1, 2):
            prof = RamificationProfile(d, (self.share * d,) * self.fibre_count)
            if g < rh_min_genus(prof):
                continue
            if self.divisibility:
                sols = [t for t in range(self.g_gamma_max + 1) if (g - 1 - t) % 3 == 0]
                if len(sols) == 1 and d != kc + Fraction(2 * (g - 1 - sols[0]), 3):
                    continue
            out.append(d)
        return out


@dataclass(frozen=True)
class ConstraintSet:
    dgamma_min: int = 1
    hodge: bool = True
    fibres: FibreDegrees | None = None
    max_genus: int | None = None
    max_components: int | None = None

    def describe(self) -> list[str]:
        out = [f"D.Gamma >= {self.dgamma_min}", "K.Gamma = 2g - 2 - Gamma^2",
               "sums match K.B0, B0^2, p_a(B0)"]
        if self.hodge:
            out.append("Gamma^2 D^2 <= (D.Gamma)^2 when Gamma^2 > 0; no isotropic Gamma with D.Gamma = 0")
        if self.fibres:
            f = self.fibres
            out.append(f"F.Gamma even >= 2, sum F.Gamma = {f.fb}, Riemann-Hurwitz over "
                       f"{f.fibre_count} double fibres")
            if f.divisibility:
                out.append("3(F-K).Gamma = 2(g - 1 - G.Gamma)")
        if self.max_genus is not None:
            out.append(f"g <= {self.max_genus}")
        if self.max_components is not None:
            out.append(f"at most {self.max_components} components")
        return out


@dataclass(frozen=True)
class ComponentType:
    g: int
    ss: int
    kc: int
    dc: int
    degrees: tuple[int, ...] | None


def component_allowed(inv: SurfaceInvariants, cs: ConstraintSet, g: int, ss: int) -> list[str]:
    """Reasons a single component (g, ss) is ruled out; empty if allowed."""
    kc = adjunction_k(g, ss)
    dc = 2 * kc + ss
    out = []
    if dc < cs.dgamma_min:
        out.append(f"D.Gamma = {dc} < {cs.dgamma_min}")
    if dc > inv.DB:
        out.append(f"D.Gamma = {dc} > D.B0 = {inv.DB}")
    if cs.hodge:
        if ss > 0 and ss * inv.DD > dc * dc:
            out.append(f"Gamma^2 D^2 = {ss * inv.DD} > (D.Gamma)^2 = {dc * dc}")
        if ss == 0 and dc == 0:
            out.append("isotropic and orthogonal to D")
    if cs.fibres is not None and not cs.fibres.degrees(g, ss):
        out.append("no admissible F-degree")
    return out


def _genus_bound(inv: SurfaceInvariants, cs: ConstraintSet) -> int:
    bounds = []
    if cs.hodge:
        # D.Gamma <= DB forces ss >= 4g-4-DB; Hodge then caps g
        bounds.append(floor((Fraction(inv.DB * inv.DB, inv.DD) + inv.DB + 4) / 4))
    if cs.max_genus is not None:
        bounds.append(cs.max_genus)
    if not bounds:
        raise UnboundedSearch("no genus bound: enable the Hodge bound or set max_genus")
    return min(bounds)


def component_types(inv: SurfaceInvariants, cs: ConstraintSet) -> list[ComponentType]:
    if cs.dgamma_min < 0:
        raise UnboundedSearch("D.Gamma may be negative, so D.B0 does not bound the search")
    out = []
    for g in range(_genus_bound(inv, cs) + 1):
        # D.Gamma = 4g - 4 - ss lies in [dgamma_min, DB]
        for ss in range(4 * g - 4 - inv.DB, 4 * g - 4 - cs.dgamma_min + 1):
            if component_allowed(inv, cs, g, ss):
                continue
            kc = adjunction_k(g, ss)
            degs = tuple(cs.fibres.degrees(g, ss)) if cs.fibres else None
            out.append(ComponentType(g, ss, kc, 2 * kc + ss, degs))
    out.sort(key=lambda t: _key((t.g, t.ss)))
    return out


def component_cap(inv: SurfaceInvariants, cs: ConstraintSet,
                  types: Sequence[ComponentType]) -> tuple[int, str]:
    """Largest number of components, derived from positivity on every type."""
    caps = []
    if types and all(t.kc >= 1 for t in types):
        caps.append((inv.KB, "K.Gamma >= 1 on every admissible component, sum = K.B0"))
    if types and all(t.dc >= 1 for t in types):
        caps.append((inv.DB, "D.Gamma >= 1 on every admissible component, sum = D.B0"))
    if cs.max_components is not None:
        caps.append((cs.max_components, "declared"))
    if not types:
        return 0, "no admissible component"
    if not caps:
        raise UnboundedSearch("components with K.Gamma <= 0 and D.Gamma <= 0 are admissible")
    return min(caps)


@dataclass
class Enumeration:
    candidates: list[BranchCandidate]
    cap: int
    cap_reason: str
    types: list[ComponentType]


def enumerate_with_metadata(inv: SurfaceInvariants, cs: ConstraintSet) -> Enumeration:
    types = component_types(inv, cs)
    cap, why = component_cap(inv, cs, types)
    found: set[BranchCandidate] = set()
    pa = inv.pa_branch

    def walk(start: int, chosen: list[ComponentType], kb: int, bb: int, gsum: int,
             db: int, degs: list[int]):
        n = len(chosen)
        if n and kb == inv.KB and bb == inv.BB and gsum - (n - 1) == pa:
            if cs.fibres is None or _degrees_fit(degs, cs.fibres.fb):
                found.add(BranchCandidate(tuple((t.g, t.ss) for t in chosen)))
        if n == cap:
            return
        for i in range(start, len(types)):
            t = types[i]
            if db + t.dc > inv.DB:
                continue
            if all(x.kc >= 1 for x in types) and kb + t.kc > inv.KB:
                continue
            walk(i, chosen + [t], kb + t.kc, bb + t.ss, gsum + t.g, db + t.dc,
                 degs + [t.degrees])

    walk(0, [], 0, 0, 0, 0, [])
    cands = sorted(found, key=BranchCandidate.sort_key)
    return Enumeration(cands, cap, why, types)


def _degrees_fit(options: list[tuple[int, ...]], total: int) -> bool:
    reachable = {0}
    for opts in options:
        reachable = {s + d for s in reachable for d in opts if s + d <= total}
    return total in reachable


def enumerate_candidates(inv: SurfaceInvariants, cs: ConstraintSet) -> list[BranchCandidate]:
    return enumerate_with_metadata(inv, cs).candidates


def verify_candidate(inv: SurfaceInvariants, cs: ConstraintSet, c: BranchCandidate) -> list[str]:
    """Independent re-check of every constraint on one candidate."""
    out = list(c.problems(inv))
    for g, ss in c.components:
        out += [f"({g},{ss}): {p}" for p in component_allowed(inv, cs, g, ss)]
    if sum(2 * adjunction_k(g, ss) + ss for g, ss in c.components) != inv.DB:
        out.append("D-degrees do not sum to D.B0")
    if cs.fibres is not None:
        opts = [tuple(cs.fibres.degrees(g, ss)) for g, ss in c.components]
        if not _degrees_fit(opts, cs.fibres.fb):
            out.append(f"F-degrees cannot sum to {cs.fibres.fb}")
    if cs.max_components is not None and len(c.components) > cs.max_components:
        out.append("too many components")
    return out


# ---------------------------------------------------------------------------
# contexts


def _cand(*comps: Component) -> BranchCandidate:
    return BranchCandidate(tuple(comps))


# the nine possibilities for k = 9 when W is rational or properly elliptic,
# known before the fibration argument; labelled (a)..(i)
PRIOR_K9_LIST: list[tuple[str, BranchCandidate]] = [
    ("a", _cand((4, 2), (0, -4))),
    ("b", _cand((3, -2))),
    ("c", _cand((4, 4), (1, -2), (0, -4))),
    ("d", _cand((4, 4), (0, -6))),
    ("e", _cand((3, 0), (1, -2))),
    ("f", _cand((3, 2), (1, -4))),
    ("g", _cand((2, -2), (2, 0))),
    ("h", _cand((3, 2), (1, -2), (1, -2))),
    ("i", _cand((2, 0), (2, 0), (1, -2))),
]


@dataclass(frozen=True)
class Context:
    k: int
    scenario: str
    fibre_count: int
    fb: int
    polar_j: int
    constraints: ConstraintSet
    exclusions: dict = field(default_factory=dict)
    splits: dict = field(default_factory=dict)


CONTEXTS = {
    9: Context(
        k=9, scenario="k9-rational", fibre_count=4, fb=12, polar_j=3,
        # D is only nef, so D.Gamma = 0 must stay allowed
        constraints=ConstraintSet(dgamma_min=0, hodge=True),
        exclusions={_cand((3, 2), (1, -4)): "k9-case-f",
                    _cand((3, 2), (1, -2), (1, -2)): "k9-case-h"},
        splits={_cand((2, 0), (2, 0), (1, -2)): "k9-three-components",
                _cand((3, 0), (1, -2)): "k9-genus3-genus1",
                _cand((2, -2), (2, 0)): "k9-genus2-genus2"},
    ),
    11: Context(
        k=11, scenario="k11-rational", fibre_count=5, fb=8, polar_j=1,
        constraints=ConstraintSet(
            dgamma_min=1, hodge=True,
            fibres=FibreDegrees(fibre_count=5, fb=8, divisibility=True, g_gamma_max=3),
        ),
        exclusions={_cand((2, 0), (2, 0), (2, -2)): "k11-r2"},
    ),
}


# ---------------------------------------------------------------------------
# filtering


@dataclass(frozen=True)
class ComponentClass:
    component: Component
    expression: str | None
    certificate: Certificate

    @property
    def determined(self) -> bool:
        return self.expression is not None


@dataclass
class KeptRow:
    candidate: BranchCandidate
    classes: list[ComponentClass] = field(default_factory=list)
    label: str = ""
    tags: dict = field(default_factory=dict)


@dataclass
class ExcludedRow:
    candidate: BranchCandidate
    certificate: Certificate
    label: str = ""


@dataclass
class ClassificationTable:
    scenario: str
    kept: list[KeptRow] = field(default_factory=list)
    excluded: list[ExcludedRow] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def kept_candidates(self) -> list[BranchCandidate]:
        return [r.candidate for r in self.kept]

    def excluded_candidates(self) -> list[BranchCandidate]:
        return [r.candidate for r in self.excluded]

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "kept": [
                {"label": r.label, "branch": r.candidate.to_json(), "text": str(r.candidate),
                 "classes": [{"component": list(c.component),
                              "class": c.expression or "UNDETERMINED"} for c in r.classes],
                 **({"tags": r.tags} if r.tags else {})}
                for r in self.kept
            ],
            "excluded": [
                {"label": r.label, "branch": r.candidate.to_json(), "text": str(r.candidate),
                 "rule": r.certificate.rule, "reason": r.certificate.conclusion,
                 "axioms": list(r.certificate.axioms_cited)}
                for r in self.excluded
            ],
            "metadata": cert.render_value(self.metadata),
        }

    def to_text(self) -> str:
        lines = [f"classification: {self.scenario}"]
        rows = []
        for r in self.kept:
            classes = "; ".join(
                f"({c.component[0]},{c.component[1]}) ≡ {c.expression or 'UNDETERMINED'}"
                for c in r.classes
            )
            extra = " ".join(f"{k}={v}" for k, v in r.tags.items())
            rows.append(("kept", r.label, str(r.candidate), classes or extra))
        for r in self.excluded:
            rows.append(("excluded", r.label, str(r.candidate),
                         f"{r.certificate.rule}: {r.certificate.conclusion}"))
        if rows:
            w = [max(len(row[i]) for row in rows) for i in range(3)]
            for row in rows:
                lines.append("  ".join(row[i].ljust(w[i]) for i in range(3)) + "  " + row[3])
        for k, v in self.metadata.items():
            lines.append(f"# {k}: {cert.render_value(v)}")
        return "\n".join(line.rstrip() for line in lines)


def context_for(s: Scenario) -> Context:
    try:
        return CONTEXTS[s.invariants.k]
    except KeyError:
        raise UnknownVariant(f"no exclusion rules for k={s.invariants.k}") from None


def genus_rule(ctx: Context, candidate: BranchCandidate) -> Certificate | None:
    """Riemann-Hurwitz lower bound on the genus of each component."""
    for g, ss in candidate.components:
        bound = None
        for d in range(2, ctx.fb + 1, 2):
            c = rule_rh_bound(get_builtin(ctx.scenario), d, ctx.fibre_count)
            b = c.data["min_genus"]
            if bound is None or b < bound[0]:
                bound = (b, d)
        if bound is not None and g < bound[0]:
            return rule_rh_bound(get_builtin(ctx.scenario), bound[1], ctx.fibre_count, genus=g)
    return None


def _final_violation(name: str) -> Certificate | None:
    result = replay_steps(get_builtin(name))
    last = result.certificates[-1]
    return last if last.verdict is Verdict.VIOLATION else None


def filter_candidates(candidates: Iterable[BranchCandidate], s: Scenario,
                      labels: dict | None = None) -> ClassificationTable:
    ctx = context_for(s)
    labels = labels or {}
    table = ClassificationTable(s.name)
    for c in sorted(set(candidates), key=BranchCandidate.sort_key):
        label = labels.get(c, "")
        killer = genus_rule(ctx, c)
        if killer is None and c in ctx.exclusions:
            killer = _final_violation(ctx.exclusions[c])
        if killer is not None:
            table.excluded.append(ExcludedRow(c, killer, label))
        else:
            table.kept.append(KeptRow(c, label=label))
    return table


# ---------------------------------------------------------------------------
# component classes


def _undetermined(comp: Component, why: str) -> ComponentClass:
    c = cert.make("component_class", [("component", list(comp))], f"UNDETERMINED: {why}",
                  Verdict.INCONCLUSIVE)
    return ComponentClass(comp, None, c)


def _f_degrees(ctx: Context, state: ReplayState,
               candidate: BranchCandidate) -> dict[Component, Fraction] | str:
    comps = candidate.components
    if ctx.constraints.fibres is not None and ctx.constraints.fibres.divisibility:
        gb = pair_value(state.space, state.cls("G"), state.cls("B0"))
        out = {}
        for g, ss in comps:
            c = rule_divisibility_three(state, g, (0, int(gb)))
            if c.verdict is not Verdict.SATISFIED:
                return f"G.Gamma not pinned for genus {g}"
            out[(g, ss)] = adjunction_k(g, ss) + c.data["f_minus_k"]
        if sum(out[c] for c in comps) != ctx.fb:
            return "F-degrees do not sum to F.B0"
        return out
    groups = sorted(set(comps), key=_key)
    if len(groups) != 2:
        return "no rank-saturating Gram for this shape"
    name = ctx.splits.get(candidate)
    if name is not None:
        split = get_builtin(name)
    else:
        xi, yi = groups
        if comps.count(yi) != 1:
            return "dependent component is repeated"
        mult = comps.count(xi)
        comp_list = [xi] * mult + [yi]
        split = load_scenario(gram_split_doc(
            f"k{ctx.k}-split", ctx.k, comp_list, 0, mult, mult, ctx.fb))
    result = replay_steps(split, fail_fast=False)
    solve = result.certificates[0]
    if solve.verdict is not Verdict.SATISFIED:
        return f"F-degree not determined ({solve.conclusion})"
    # map each Gamma symbol of the split scenario back to its component
    branch = [(b.g, b.ss) for b in split.branch]
    out = {}
    for sym in split.space.symbols:
        if sym.startswith("Gamma"):
            comp = branch[int(sym[len("Gamma"):])]
            out[comp] = pair_value(result.state.space, DivisorClass.of("F"), DivisorClass.of(sym))
    return out


def solve_component_classes(s: Scenario, candidate: BranchCandidate) -> list[ComponentClass]:
    """Express each component of ``candidate`` in the basis K, F, G, N0."""
    ctx = context_for(s)
    if candidate.r == 0:
        return [_undetermined(candidate.components[0], "single component equals B0")]
    result = replay_steps(s)
    state = result.state
    b0 = state.relation("B0").rhs
    degrees = _f_degrees(ctx, state, candidate)
    if isinstance(degrees, str):
        return [_undetermined(c, degrees) for c in candidate.components]
    basis_syms = ["K", "F", "G", "N0"]
    base_space = state.space.restrict(basis_syms)
    a = b0.get("K") + 1
    bf, cg = b0.get("F"), b0.get("G")
    polar = DivisorClass.of("K") * (ctx.polar_j + 2) + b0
    out = []
    seen: dict[Component, ComponentClass] = {}
    for comp in candidate.components:
        if comp in seen:
            out.append(seen[comp])
            continue
        g, ss = comp
        kc = adjunction_k(g, ss)
        fc = degrees[comp]
        # 2g - 2 = K.Gamma + Gamma.B0, with Gamma.N0 = 0
        gc = (2 * g - 2 - a * kc - bf * fc) / cg
        space = base_space.extend("Gamma", {"K": kc, "F": fc, "G": gc, "N0": 0, "Gamma": ss})
        sub = Scenario(f"{s.name}:{comp}", s.invariants, space, ("N0",),
                       {"P": polar})
        basis = [DivisorClass.of(x) for x in basis_syms]
        coeffs = solve_in_basis(space, DivisorClass.of("Gamma"), basis)
        expr = combine(coeffs, basis)
        text = expr.render(basis_syms)
        c = rule_index_exclude(ReplayState(sub), "P", lhs="Gamma", rhs=expr)
        if c.verdict is not Verdict.RELATION_FORCED:
            cc = ComponentClass(comp, None, c)
        else:
            c = cert.make(
                c.rule, list(c.premises) + [("K.Gamma", kc), ("F.Gamma", fc), ("G.Gamma", gc)],
                f"({g},{ss}) ≡ {text}", c.verdict, anchor=c.anchor,
                axioms_cited=c.axioms_cited, relation=f"Gamma ≡ {text}")
            cc = ComponentClass(comp, text, c)
        seen[comp] = cc
        out.append(cc)
    return out


# ---------------------------------------------------------------------------
# classify


VARIANTS = {
    (9, "rational"), (11, "rational"), (9, "enriques-fixture"), (5, "fixture"),
    (7, "fixture"), (7, "fixture-minimal"), (7, "fixture-non-minimal"), (7, "fixture-elliptic"),
}

DEFAULT_VARIANT = {5: "fixture", 7: "fixture", 9: "rational", 11: "rational"}

_FIXTURE_QUOTIENT = {
    "enriques-fixture": "birational to an Enriques surface",
    "fixture-minimal": "smooth minimal of general type",
    "fixture-non-minimal": "of general type whose smooth minimal model has K^2=1",
    "fixture-elliptic": "smooth minimal properly elliptic",
}


def classify(k: int, variant: str | None = None) -> ClassificationTable:
    variant = variant or DEFAULT_VARIANT.get(k, "")
    if (k, variant) not in VARIANTS:
        raise UnknownVariant(f"no classification for k={k}, variant {variant!r}")
    if variant == "rational":
        return _classify_rational(k)
    rows = [r for r in load_fixtures() if r.table == "classification" and r.k == k]
    if variant in _FIXTURE_QUOTIENT:
        rows = [r for r in rows if r.quotient == _FIXTURE_QUOTIENT[variant]]
    table = ClassificationTable(f"k{k}-{variant}", metadata={"source": "fixture"})
    for r in rows:
        table.kept.append(KeptRow(
            BranchCandidate(r.components), label=r.case,
            tags={"KK": r.KK, "existence": r.existence}))
    return table


def _classify_rational(k: int) -> ClassificationTable:
    ctx = CONTEXTS[k]
    s = get_builtin(ctx.scenario)
    inv = s.invariants
    enum = enumerate_with_metadata(inv, ctx.constraints)
    meta = {"constraints": ctx.constraints.describe(), "component cap": enum.cap,
            "cap reason": enum.cap_reason, "enumerated": len(enum.candidates)}
    if k == 9:
        missing = [lab for lab, c in PRIOR_K9_LIST if c not in enum.candidates]
        if missing:
            raise InvariantViolation(f"enumeration misses prior cases {missing}")
        meta["prior list contained"] = True
        labels = {c: lab for lab, c in PRIOR_K9_LIST}
        table = filter_candidates([c for _, c in PRIOR_K9_LIST], s, labels)
    else:
        table = filter_candidates(enum.candidates, s)
    table.metadata.update(meta)
    for row in table.kept:
        row.classes = solve_component_classes(s, row.candidate)
    table.kept.sort(key=lambda r: _kept_order(r.candidate))
    return table


def _kept_order(c: BranchCandidate):
    # more components first, matching the usual presentation
    return (-len(c.components), tuple(_key(x) for x in c.components))
