"""Scenario documents: symbols, Gram data, nodal curves, fibres and replay
scripts for one classification context.

Documents are plain mappings (parsed from JSON or YAML).  Loading is strict:
unknown keys, malformed entries and violated invariants are all errors.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Mapping

import yaml

from . import certificate as cert
from .certificate import Certificate, Verdict
from .errors import (
    InvariantViolation,
    LatticeError,
    SchemaError,
    UndeclaredPairing,
)
from .lattice import DivisorClass, IntersectionSpace, pair, pair_value, parse_class
from .poly import UniPoly, as_fraction
from .toolkit import K9, K11, SurfaceInvariants, adjunction_k

SCHEMA_VERSION = 1

TOP_KEYS = {
    "version", "name", "description", "k", "chiO", "rho", "invariants", "symbols",
    "gram", "nodal", "classes", "fibres", "branch", "axioms", "checks",
}
REQUIRED_KEYS = {"name", "k", "symbols", "gram"}


@dataclass(frozen=True)
class AxiomId:
    id: str
    statement: str
    anchor: str


AXIOMS: dict[str, AxiomId] = {
    a.id: a
    for a in [
        AxiomId("HODGE_INDEX",
                "Num(W) has signature (1, rho-1): if P^2 > 0, P.E = 0 and E^2 = 0 then E is "
                "numerically trivial",
                "algebraic index theorem"),
        AxiomId("PICARD_RANK",
                "Num(W) has rank rho, so any rho+1 classes have singular Gram matrix",
                "Picard number of W"),
        AxiomId("NODAL_COMPLEMENT",
                "classes orthogonal to m independent nodal curves span at most rho-m dimensions",
                "Picard number of W"),
        AxiomId("BASIS_SPANS",
                "rho classes with nonsingular Gram matrix form a Q-basis of Num(W)",
                "Picard number of W"),
        AxiomId("PG_ZERO_NO_EFFECTIVE_K",
                "K_W is not numerically equivalent to a nonzero effective divisor because p_g(W)=0",
                "vanishing geometric genus"),
        AxiomId("MINUS_ONE_CURVE_MEETS_NODE",
                "a (-1)-curve on W disjoint from all nodal curves cannot exist (blowing it down "
                "contradicts the minimality analysis of the quotient)",
                "(-1)-curve lemma"),
        AxiomId("D_NEF",
                "D = 2K_W + B0 is nef and big, so D.C >= 0 for every curve C",
                "pullback of 2K_S"),
        AxiomId("DC_ZERO_ONLY_NODAL",
                "for k=11, D.C = 0 for an irreducible curve C only when C is one of the N_i",
                "k=11 structure of D"),
        AxiomId("VANISHING_ASSUMED",
                "higher cohomology of the adjoint bundle vanishes (Kawamata-Viehweg), so h^0 = chi",
                "Kawamata-Viehweg vanishing"),
        AxiomId("NODAL_FIBRATION",
                "after contracting G+N0 the surface carries a rational fibration whose singular "
                "fibres are N'+2G'+N'' through the remaining nodal pairs",
                "rational surfaces with many nodes"),
        AxiomId("BPF_PENCIL_MONOTONE",
                "a curve disjoint from a member of a base-point-free pencil lies in a member, so a "
                "nef F meets it no more than it meets the pencil",
                "base-point-free pencil containment"),
        AxiomId("BRANCH_SMOOTH_DISJOINT",
                "B0 is a disjoint union of smooth curves, disjoint from the nodal curves",
                "double cover data"),
        AxiomId("NEF_SUBTRACTION",
                "if A >= bE with A, E effective and P nef then P.A >= b P.E",
                "nefness"),
    ]
}


@dataclass(frozen=True)
class FibreConfig:
    label: str
    components: tuple[tuple[str, int], ...]

    def __post_init__(self):
        if not self.components:
            raise InvariantViolation(f"fibre {self.label!r} has no components")
        if any(m < 1 for _, m in self.components):
            raise InvariantViolation(f"fibre {self.label!r} has a multiplicity < 1")


@dataclass(frozen=True)
class BranchComponent:
    g: int
    ss: int
    cls: str | None = None

    @property
    def kc(self) -> int:
        return adjunction_k(self.g, self.ss)


@dataclass(frozen=True)
class Scenario:
    name: str
    invariants: SurfaceInvariants
    space: IntersectionSpace
    nodal: tuple[str, ...]
    classes: Mapping[str, DivisorClass]
    fibres: tuple[FibreConfig, ...] = ()
    branch: tuple[BranchComponent, ...] = ()
    axioms: tuple[str, ...] = ()
    checks: tuple[Mapping[str, Any], ...] = ()
    description: str = ""
    document: Mapping[str, Any] = field(default_factory=dict, repr=False, compare=False)

    def cls(self, expr) -> DivisorClass:
        """Resolve a symbol, a derived-class name, an expression or a mapping."""
        if isinstance(expr, DivisorClass):
            return expr
        if isinstance(expr, Mapping):
            return _class_from_mapping(expr, self.classes)
        return parse_class(str(expr), self.classes)

    def pair(self, a, b) -> UniPoly:
        return pair(self.space, self.cls(a), self.cls(b))

    def value(self, a, b) -> Fraction:
        return pair_value(self.space, self.cls(a), self.cls(b))

    def fibre(self, label: str) -> FibreConfig:
        for f in self.fibres:
            if f.label == label:
                return f
        raise KeyError(label)

    def with_space(self, space: IntersectionSpace) -> "Scenario":
        return Scenario(
            self.name, self.invariants, space, self.nodal, self.classes, self.fibres,
            self.branch, self.axioms, self.checks, self.description, self.document,
        )


def _class_from_mapping(m: Mapping, named: Mapping[str, DivisorClass]) -> DivisorClass:
    total = DivisorClass()
    for s, c in m.items():
        base = named.get(s) or DivisorClass.of(s)
        total = total + base * as_fraction(c)
    return total


# ---------------------------------------------------------------------------
# loading


def _expect(cond: bool, path: str, reason: str):
    if not cond:
        raise SchemaError(path, reason)


def _gram_value(raw, path: str, unknown_names: set[str]) -> UniPoly:
    if isinstance(raw, bool):
        raise SchemaError(path, "boolean is not a pairing value")
    if isinstance(raw, int):
        return UniPoly.const(raw)
    if isinstance(raw, str):
        try:
            return UniPoly.const(Fraction(raw))
        except ValueError:
            raise SchemaError(path, f"not a rational: {raw!r}") from None
    if isinstance(raw, Mapping):
        extra = set(raw) - {"unknown", "coeffs"}
        _expect(not extra, path, f"unknown keys {sorted(extra)}")
        _expect("unknown" in raw and isinstance(raw["unknown"], str), path,
                "expected {'unknown': name}")
        coeffs = raw.get("coeffs", [0, 1])
        _expect(isinstance(coeffs, list) and len(coeffs) in (1, 2), path,
                "coeffs must be [constant] or [constant, slope]")
        unknown_names.add(raw["unknown"])
        try:
            return UniPoly([as_fraction(c) for c in coeffs], raw["unknown"])
        except (TypeError, ValueError):
            raise SchemaError(path, f"bad coefficients {coeffs!r}") from None
    raise SchemaError(path, f"unsupported pairing value {raw!r}")


def _standard_invariants(k: int) -> SurfaceInvariants | None:
    return {9: K9, 11: K11}.get(k)


def load_scenario(document: Mapping[str, Any] | str) -> Scenario:
    """Validate a scenario document (mapping or JSON/YAML text)."""
    if isinstance(document, str):
        try:
            document = yaml.safe_load(document)
        except yaml.YAMLError as exc:
            raise SchemaError("$", f"unparseable document: {exc}") from None
    _expect(isinstance(document, Mapping), "$", "document must be a mapping")
    doc = dict(document)
    extra = set(doc) - TOP_KEYS
    _expect(not extra, "$", f"unknown keys {sorted(extra)}")
    missing = REQUIRED_KEYS - set(doc)
    _expect(not missing, "$", f"missing keys {sorted(missing)}")
    if "version" in doc:
        _expect(doc["version"] == SCHEMA_VERSION, "$.version",
                f"unsupported version {doc['version']!r}")

    name = doc["name"]
    _expect(isinstance(name, str) and name, "$.name", "must be a nonempty string")
    k = doc["k"]
    _expect(isinstance(k, int) and not isinstance(k, bool), "$.k", "must be an integer")
    chiO = doc.get("chiO", 1)
    _expect(isinstance(chiO, int), "$.chiO", "must be an integer")
    rho = doc.get("rho")
    _expect(rho is None or (isinstance(rho, int) and rho >= 1), "$.rho",
            "must be a positive integer")

    symbols = doc["symbols"]
    _expect(isinstance(symbols, list) and all(isinstance(s, str) for s in symbols),
            "$.symbols", "must be a list of names")
    _expect(len(set(symbols)) == len(symbols), "$.symbols", "duplicate symbol")
    symset = set(symbols)

    gram_raw = doc["gram"]
    _expect(isinstance(gram_raw, Mapping), "$.gram", "must be a mapping")
    entries: dict[tuple[str, str], UniPoly] = {}
    unknown_names: set[str] = set()
    for key, raw in gram_raw.items():
        path = f"$.gram.{key}"
        _expect(isinstance(key, str) and key.count(".") == 1, path, "key must be 'A.B'")
        a, b = key.split(".")
        _expect(a in symset and b in symset, path, "names an undeclared symbol")
        ordered = (a, b) if a <= b else (b, a)
        value = _gram_value(raw, path, unknown_names)
        _expect(ordered not in entries or entries[ordered] == value, path,
                "conflicts with the symmetric entry")
        entries[ordered] = value
    _expect(len(unknown_names) <= 1, "$.gram", f"more than one unknown: {sorted(unknown_names)}")
    try:
        space = IntersectionSpace(tuple(symbols), entries, rho)
    except LatticeError as exc:
        raise SchemaError("$.gram", str(exc)) from None

    classes: dict[str, DivisorClass] = {}
    for cname, body in (doc.get("classes") or {}).items():
        path = f"$.classes.{cname}"
        _expect(cname not in symset, path, "class name shadows a symbol")
        try:
            if isinstance(body, Mapping):
                c = _class_from_mapping(body, classes)
            elif isinstance(body, str):
                c = parse_class(body, classes)
            else:
                raise SchemaError(path, "class must be a mapping or expression")
        except (ValueError, TypeError) as exc:
            raise SchemaError(path, str(exc)) from None
        bad = set(c) - symset
        _expect(not bad, path, f"unknown symbols {sorted(bad)}")
        classes[cname] = c

    nodal = doc.get("nodal") or []
    _expect(isinstance(nodal, list) and all(n in symset for n in nodal), "$.nodal",
            "must list declared symbols")

    fibres = []
    for i, f in enumerate(doc.get("fibres") or []):
        path = f"$.fibres[{i}]"
        _expect(isinstance(f, Mapping) and set(f) <= {"label", "components"}, path,
                "fibre needs label and components")
        comps = []
        for j, c in enumerate(f.get("components") or []):
            cpath = f"{path}.components[{j}]"
            _expect(isinstance(c, Mapping) and set(c) <= {"symbol", "mult"} and "symbol" in c,
                    cpath, "component needs symbol and mult")
            sym = c["symbol"]
            _expect(sym in symset or sym in classes, cpath, f"unknown symbol {sym!r}")
            mult = c.get("mult", 1)
            _expect(isinstance(mult, int), cpath, "mult must be an integer")
            comps.append((sym, mult))
        fibres.append(FibreConfig(str(f.get("label", f"fibre{i}")), tuple(comps)))

    branch = []
    braw = doc.get("branch")
    if braw is not None:
        _expect(isinstance(braw, Mapping) and set(braw) <= {"components"}, "$.branch",
                "branch must be {components: [...]}")
        for j, c in enumerate(braw.get("components") or []):
            cpath = f"$.branch.components[{j}]"
            _expect(isinstance(c, Mapping) and {"g", "ss"} <= set(c) <= {"g", "ss", "class"},
                    cpath, "component needs g and ss")
            _expect(isinstance(c["g"], int) and c["g"] >= 0, cpath, "g must be >= 0")
            _expect(isinstance(c["ss"], int), cpath, "ss must be an integer")
            cl = c.get("class")
            _expect(cl is None or cl in symset or cl in classes, cpath,
                    f"unknown class {cl!r}")
            branch.append(BranchComponent(c["g"], c["ss"], cl))

    axioms = doc.get("axioms") or []
    for a in axioms:
        _expect(a in AXIOMS, "$.axioms", f"unknown axiom {a!r}")

    checks = doc.get("checks") or []
    _expect(isinstance(checks, list), "$.checks", "must be a list")
    from .engine import RULES  # registry lives with the rules

    for i, chk in enumerate(checks):
        path = f"$.checks[{i}]"
        _expect(isinstance(chk, Mapping) and "rule" in chk, path, "check needs a rule")
        _expect(set(chk) <= {"rule", "args", "expect", "label"}, path,
                f"unknown keys {sorted(set(chk) - {'rule', 'args', 'expect', 'label'})}")
        _expect(chk["rule"] in RULES, path, f"unknown rule {chk['rule']!r}")
        if "expect" in chk:
            _expect(chk["expect"] in Verdict.__members__, path,
                    f"unknown verdict {chk['expect']!r}")

    inv = _invariants(doc, space, k, chiO, rho)

    scen = Scenario(
        name=name, invariants=inv, space=space, nodal=tuple(nodal), classes=classes,
        fibres=tuple(fibres), branch=tuple(branch), axioms=tuple(axioms),
        checks=tuple(checks), description=str(doc.get("description", "")), document=doc,
    )
    _validate(scen)
    return scen


def _invariants(doc, space, k, chiO, rho) -> SurfaceInvariants:
    raw = doc.get("invariants")
    if raw is not None:
        _expect(isinstance(raw, Mapping) and set(raw) == {"KK", "KB", "BB"}, "$.invariants",
                "invariants must give exactly KK, KB, BB")
        try:
            return SurfaceInvariants.from_branch(k, raw["KK"], raw["KB"], raw["BB"],
                                                 chiO=chiO, rho=rho)
        except InvariantViolation:
            raise
    if space.has("K") and space.has("D"):
        try:
            kk = space.entry("K", "K").constant()
            kd = space.entry("K", "D").constant()
            dd = space.entry("D", "D").constant()
        except (UndeclaredPairing, ValueError):
            raise SchemaError("$.gram", "K.K, K.D and D.D must be declared constants") from None
        kb = kd - 2 * kk
        bb = dd - 4 * kd + 4 * kk
        return SurfaceInvariants(k, int(kk), int(kd), int(dd), int(kb), int(bb), chiO, rho)
    std = _standard_invariants(k)
    if std is None:
        raise SchemaError("$.invariants", f"no K/D symbols and no standard invariants for k={k}")
    return SurfaceInvariants(k, std.KK, std.KD, std.DD, std.KB, std.BB, chiO, rho)


def _validate(s: Scenario) -> None:
    space = s.space
    for n in s.nodal:
        if not space.is_declared(n, n) or space.entry(n, n) != UniPoly.const(-2):
            raise InvariantViolation(f"nodal curve {n} must have {n}.{n} = -2")
        if space.has("K"):
            if not space.is_declared("K", n) or space.entry("K", n) != UniPoly.const(0):
                raise InvariantViolation(f"nodal curve {n} must have K.{n} = 0")
    for i, a in enumerate(s.nodal):
        for b in s.nodal[i + 1:]:
            if not space.is_declared(a, b) or space.entry(a, b) != UniPoly.const(0):
                raise InvariantViolation(f"nodal curves {a}, {b} must be disjoint")
    if space.has("K"):
        kk = space.entry("K", "K") if space.is_declared("K", "K") else None
        if kk is not None and kk != UniPoly.const(s.invariants.KK):
            raise InvariantViolation(f"K.K = {kk} but invariants say {s.invariants.KK}")


def load_path(path: str | Path) -> Scenario:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise SchemaError(str(path), f"cannot read scenario file ({exc.strerror})") from None
    return load_scenario(text)


def dump_document(doc: Mapping[str, Any]) -> str:
    return json.dumps(doc, indent=2, sort_keys=False, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------------------
# fibre check


def fibre_check(space: IntersectionSpace, fc: FibreConfig, K, classes=None) -> Certificate:
    """F = sum(mult * C) must satisfy F^2 = 0, K.F = -2 and F.C = 0 for each C."""
    named = classes or {}
    comps = [(sym, named.get(sym) or DivisorClass.of(sym), m) for sym, m in fc.components]
    F = DivisorClass()
    for _, c, m in comps:
        F = F + c * m
    K = DivisorClass.of(K) if isinstance(K, str) else K
    premises = []
    failures = []
    ff = pair_value(space, F, F)
    premises.append(("F^2", ff, ("pair", F, F)))
    if ff != 0:
        failures.append(f"F^2 = {ff}")
    kf = pair_value(space, K, F)
    premises.append(("K.F", kf, ("pair", K, F)))
    if kf != -2:
        failures.append(f"K.F = {kf}")
    for sym, c, _ in comps:
        v = pair_value(space, F, c)
        premises.append((f"F.{sym}", v, ("pair", F, c)))
        if v != 0:
            failures.append(f"F.{sym} = {v}")
    fr = F.render(space.symbols)
    if failures:
        return cert.make("fibre_check", premises,
                         f"{fc.label}: {fr} is not a fibre ({', '.join(failures)})",
                         Verdict.VIOLATION, anchor="rational fibre numerics",
                         data={"fibre": fc.label})
    return cert.make("fibre_check", premises,
                     f"{fc.label}: {fr} has F^2=0, K.F=-2 and meets no component",
                     Verdict.SATISFIED, anchor="rational fibre numerics",
                     data={"fibre": fc.label})
