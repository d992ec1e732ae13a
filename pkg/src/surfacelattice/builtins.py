"""Built-in scenario documents.

Documents are plain mappings in the same format accepted by
:func:`surfacelattice.scenario.load_scenario`; they are generated here rather
than shipped as files because most of the Gram data is a pattern over the
nodal curves.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Any, Iterable

from .errors import SchemaError
from .scenario import Scenario, load_scenario

Doc = dict[str, Any]


def nodes(k: int) -> list[str]:
    return [f"N{i}" for i in range(k)]


def _nodal_block(gram: dict, names: Iterable[str], ns: list[str]) -> None:
    """N_i.N_j = -2 delta_ij, and every other listed symbol pairs 0 with N_i."""
    for i, a in enumerate(ns):
        gram[f"{a}.{a}"] = -2
        for b in ns[i + 1:]:
            gram[f"{a}.{b}"] = 0
        for s in names:
            gram.setdefault(f"{s}.{a}", 0)


# ---------------------------------------------------------------------------
# fibration scenarios: K, D, F, G and the nodal curves


_FIBRATION = {
    # per k: form data, the nef-and-big M_j used for the index step, the M_j it splits
    9: {"KK": -2, "KD": 2, "DG": 3, "rho": 12, "polar": "M3", "forced": "M4",
        "rhs": "2F+2G+N0", "b0": "-6K+2F+2G+N0", "admissible": ["int"],
        "rr": [("M1", 9), ("M2", 9), ("M4", 3)], "js": [1, 2, 3, 4]},
    11: {"KK": -4, "KD": 0, "DG": 1, "rho": 14, "polar": "M1", "forced": "M2",
         "rhs": "3F+2G+N0", "b0": "-4K+3F+2G+N0", "admissible": ["nonneg"],
         "rr": [("M1", 8), ("M2", 4)], "js": [1, 2]},
}


def fibration_doc(k: int, with_checks: bool = True) -> Doc:
    c = _FIBRATION[k]
    ns = nodes(k)
    gram: dict[str, Any] = {
        "K.K": c["KK"], "K.D": c["KD"], "D.D": 14,
        "K.F": -2, "F.F": 0, "D.F": {"unknown": "x"},
        "K.G": -1, "G.G": -1, "D.G": c["DG"], "F.G": 0,
        "G.N0": 1,
    }
    _nodal_block(gram, ["K", "D", "F", "G"], ns)
    classes = {f"M{j}": f"{j}K+D" for j in range(1, 5)}
    classes["B0"] = "D-2K"
    checks: list[dict] = []
    if with_checks:
        checks += [{"rule": "mj", "args": {"j": j}, "expect": "SATISFIED",
                    "label": f"M{j} pairings"} for j in c["js"]]
        checks += [{"rule": "riemann_roch", "args": {"c": m, "equals": h},
                    "expect": "SATISFIED", "label": f"h0({m})"} for m, h in c["rr"]]
        checks += [
            {"rule": "parity", "args": {"c": "G"}, "expect": "SATISFIED",
             "label": "G meets the nodes evenly with B0"},
            {"rule": "solve_unknown",
             "args": {"classes": ["K", "D", "F", "G", *ns], "admissible": c["admissible"]},
             "expect": "SATISFIED", "label": "D.F from the Picard number"},
            {"rule": "index",
             "args": {"p": c["polar"], "lhs": c["forced"], "rhs": c["rhs"], "label": c["forced"]},
             "expect": "RELATION_FORCED", "label": f"{c['forced']} splits along the fibration"},
            {"rule": "relation",
             "args": {"lhs": "B0", "rhs": c["b0"], "label": "B0"},
             "expect": "RELATION_FORCED", "label": "branch class from D = 2K + B0"},
            {"rule": "vertical_component", "args": {"relation": "B0"},
             "expect": "VIOLATION", "label": "no branch component in a fibre"},
        ]
    return {
        "version": 1,
        "name": f"k{k}-rational",
        "description": f"k={k}, W rational: fibration F with the (-1)-curve G meeting N0",
        "k": k, "chiO": 1, "rho": c["rho"],
        "symbols": ["K", "D", "F", "G", *ns],
        "gram": gram, "nodal": ns, "classes": classes,
        "axioms": ["PICARD_RANK", "HODGE_INDEX", "VANISHING_ASSUMED", "BRANCH_SMOOTH_DISJOINT"],
        "checks": checks,
    }


# ---------------------------------------------------------------------------
# singular fibres


_FIBRES = {
    # per k: number of N+2G_j+N fibres and the B0 pairings of the fibre curves
    9: {"count": 4, "BG": 5, "BGj": 6, "FB": 12, "KB": 6, "KK": -2, "BZ": 7},
    11: {"count": 5, "BG": 3, "BGj": 4, "FB": 8, "KB": 8, "KK": -4, "BZ": 5},
}


def fibre_doc(k: int, variant: str) -> Doc:
    """Singular fibres N_{2j-1} + 2 G_j + N_{2j} in either position of G + N0."""
    c = _FIBRES[k]
    ns = nodes(k)
    gs = [f"G{j}" for j in range(1, c["count"] + 1)]
    own_g1 = variant == "ii"
    base = ["K", "F", "B0", "G", "Z"] + (gs if own_g1 else gs[1:])
    gram: dict[str, Any] = {
        "K.K": c["KK"], "K.F": -2, "F.F": 0, "K.B0": c["KB"], "B0.B0": -2, "F.B0": c["FB"],
        "K.G": -1, "G.G": -1, "F.G": 0, "B0.G": c["BG"], "G.N0": 1,
        "F.Z": 0, "G.Z": 0,
    }
    for j, g in enumerate(gs, start=1):
        if g == "G1" and not own_g1:
            continue
        gram.update({f"{g}.{g}": -1, f"K.{g}": -1, f"F.{g}": 0, f"B0.{g}": c["BGj"],
                     f"G.{g}": 0, f"Z.{g}": 0,
                     f"{g}.N{2 * j - 1}": 1, f"{g}.N{2 * j}": 1})
        for h in gs[j:]:
            if h != "G1" or own_g1:
                gram[f"{g}.{h}"] = 0
    if own_g1:
        # extra fibre G + N0 + Z with Z a (-1)-curve
        gram.update({"Z.Z": -1, "K.Z": -1, "Z.N0": 1, "B0.Z": c["BZ"]})
    else:
        # G1 = G + N0 + Z with Z a (-2)-curve through N0, N1, N2
        gram.update({"Z.Z": -2, "K.Z": 0, "Z.N0": 1, "Z.N1": 1, "Z.N2": 1, "B0.Z": 1})
    _nodal_block(gram, base, ns)
    classes: dict[str, str] = {"D": "2K+B0"}
    if not own_g1:
        classes["G1"] = "G+N0+Z"
    fibres = [
        {"label": f"fibre {j}",
         "components": [{"symbol": f"N{2 * j - 1}", "mult": 1}, {"symbol": f"G{j}", "mult": 2},
                        {"symbol": f"N{2 * j}", "mult": 1}]}
        for j in range(1, c["count"] + 1)
    ]
    if own_g1:
        fibres.append({"label": "extra fibre",
                       "components": [{"symbol": "G", "mult": 1}, {"symbol": "N0", "mult": 1},
                                      {"symbol": "Z", "mult": 1}]})
    checks = [{"rule": "fibre", "args": {"label": f["label"]}, "expect": "SATISFIED",
               "label": f["label"]} for f in fibres]
    if own_g1:
        # the alternative to the extra fibre: G + N0 inside a smooth fibre; its
        # restriction to B0 would need more ramification than p_a allows
        checks.append({
            "rule": "rh_exclusion",
            "args": {"degree": ["F", "B0"],
                     "ramification": [["G", "B0"]] + [[g, "B0"] for g in gs]},
            "expect": "VIOLATION", "label": "G + N0 in a smooth fibre",
        })
    elif k == 9:
        # the alternative G_1 = N0 + 2G + Z would give F >= 4G
        checks.append({
            "rule": "compare",
            "args": {"lhs": ["D", "F"], "op": ">=", "rhs": [4, "D", "G"],
                     "axioms": ["D_NEF", "NEF_SUBTRACTION"]},
            "expect": "VIOLATION", "label": "G_1 = N0 + 2G + Z",
        })
    return {
        "version": 1,
        "name": f"k{k}-fibres-{variant}",
        "description": f"k={k} singular fibres, G + N0 {'in an extra fibre' if own_g1 else 'inside G1'}",
        "k": k, "chiO": 1, "rho": _FIBRATION[k]["rho"],
        "invariants": {"KK": c["KK"], "KB": c["KB"], "BB": -2},
        "symbols": base + ns,
        "gram": gram, "nodal": ns, "classes": classes, "fibres": fibres,
        "axioms": ["NODAL_FIBRATION"],
        "checks": checks,
    }


# ---------------------------------------------------------------------------
# (-1)-curves for k = 9: one document per value of D.C


def minus_one_doc(dc: int, two_nodes: bool = False) -> Doc:
    ns = nodes(9)
    gram: dict[str, Any] = {
        "K.K": -2, "K.D": 2, "D.D": 14,
        "C.C": -1, "K.C": -1, "D.C": dc, "C.N0": {"unknown": "t"},
    }
    if two_nodes or dc in (0, 2):
        gram["C.N1"] = 1
    _nodal_block(gram, ["K", "D", "C"], ns)
    polar = {0: "D", 1: "D", 2: "M2", 3: "M3"}[dc]
    checks: list[dict] = [
        {"rule": "axiom",
         "args": {"axiom": "MINUS_ONE_CURVE_MEETS_NODE", "verdict": "SATISFIED",
                  "conclusion": "C meets a nodal curve, numbered N0"},
         "label": "C meets N0"},
        {"rule": "index_range", "args": {"p": "D", "e": "C+N0", "low": 1, "high": 4},
         "expect": "SATISFIED", "label": "C.N0 = 1"},
    ]
    name = f"k9-minus-one-dc{dc}" + ("-two-nodes" if two_nodes else "")
    if dc == 1:
        checks.append({"rule": "index",
                       "args": {"p": "D", "lhs": "2C+N0", "rhs": "K",
                                "contradicts": "PG_ZERO_NO_EFFECTIVE_K"},
                       "expect": "VIOLATION", "label": "K would be effective"})
    elif dc in (0, 2) or two_nodes:
        if dc in (0, 2):
            checks.append({"rule": "parity", "args": {"c": "C", "nodes": ["N0"]},
                           "expect": "VIOLATION", "label": "C must meet a second node"})
        checks += [
            {"rule": "index", "args": {"p": "D", "e": "C+N1"},
             "expect": "SATISFIED", "label": "C.N1 = 1 is allowed"},
            {"rule": "index", "args": {"p": polar, "e": "N0+2C+N1"},
             "expect": "VIOLATION", "label": "N0 + 2C + N1 is isotropic"},
        ]
    else:
        checks += [
            {"rule": "parity", "args": {"c": "C"}, "expect": "SATISFIED",
             "label": "one node suffices"},
            {"rule": "compare", "args": {"lhs": ["B0", "C"], "op": "==", "rhs": 5},
             "expect": "SATISFIED", "label": "B0.C = 5"},
        ]
    return {
        "version": 1, "name": name,
        "description": f"k=9: a (-1)-curve C with D.C = {dc}"
                       + (" meeting N0 and N1" if two_nodes else ""),
        "k": 9, "chiO": 1, "rho": 12,
        "symbols": ["K", "D", "C", *ns],
        "gram": gram, "nodal": ns,
        "classes": {"B0": "D-2K", "M2": "2K+D", "M3": "3K+D"},
        "axioms": ["HODGE_INDEX", "BRANCH_SMOOTH_DISJOINT", "D_NEF"],
        "checks": checks,
    }


# ---------------------------------------------------------------------------
# k = 9 branch cases (f) and (h): F-degree of Gamma_0 forced odd


def _gamma_gram(comps: list[tuple[int, int]], fb: int) -> dict:
    gram: dict[str, Any] = {"K.K": -2, "K.F": -2, "F.F": 0, "K.B0": 6, "B0.B0": -2,
                            "F.B0": fb}
    for i, (g, ss) in enumerate(comps):
        a = f"Gamma{i}"
        gram[f"{a}.{a}"] = ss
        gram[f"K.{a}"] = 2 * g - 2 - ss
        gram[f"B0.{a}"] = ss
        for j in range(i + 1, len(comps)):
            gram[f"{a}.Gamma{j}"] = 0
    gram["F.Gamma0"] = {"unknown": "x"}
    return gram


def odd_degree_doc(case: str) -> Doc:
    ns = nodes(9)
    if case == "f":
        comps = [(3, 2), (1, -4)]
        first = {"rule": "index",
                 "args": {"p": "Gamma0", "lhs": "K+Gamma1", "rhs": "Gamma0", "label": "K"},
                 "expect": "RELATION_FORCED", "label": "K + Gamma1 against Gamma0"}
    else:
        comps = [(3, 2), (1, -2), (1, -2)]
        first = {"rule": "basis_relation",
                 "args": {"target": "K", "basis": ["Gamma0", "Gamma1", "Gamma2", *ns],
                          "label": "K"},
                 "expect": "RELATION_FORCED", "label": "K in the Gamma/N basis"}
    gs = [f"Gamma{i}" for i in range(len(comps))]
    gram = _gamma_gram(comps, 12)
    _nodal_block(gram, ["K", "F", "B0", *gs], ns)
    return {
        "version": 1, "name": f"k9-case-{case}",
        "description": "k=9 rational, B0 = " + " + ".join(f"({g},{s})" for g, s in comps),
        "k": 9, "chiO": 1, "rho": 12,
        "symbols": ["K", "F", "B0", *gs, *ns],
        "gram": gram, "nodal": ns,
        "branch": {"components": [{"g": g, "ss": s, "class": a} for (g, s), a in zip(comps, gs)]},
        "axioms": ["HODGE_INDEX", "BASIS_SPANS", "BRANCH_SMOOTH_DISJOINT"],
        "checks": [
            first,
            {"rule": "relation", "args": {"lhs": "B0", "rhs": "+".join(gs), "label": "B0",
                                          "axioms": ["BRANCH_SMOOTH_DISJOINT"]},
             "expect": "RELATION_FORCED", "label": "B0 is the sum of its components"},
            {"rule": "relation_pair",
             "args": {"combination": [["K", 1], ["B0", 1]], "against": "F"},
             "expect": "SATISFIED", "label": "F.Gamma0 from F.B0 = 12"},
            {"rule": "rh_bound", "args": {"degree": ["F", "Gamma0"], "fibre_count": 4},
             "expect": "VIOLATION", "label": "F.Gamma0 must be even"},
        ],
    }


# ---------------------------------------------------------------------------
# k = 9 rank-saturating 4x4 Gram for the surviving multi-component cases


# name -> (components, index of the x component, index of the dependent one, x multiplicity)
_SPLITS = {
    "k9-three-components": ([(2, 0), (2, 0), (1, -2)], 1, 2, 2),
    "k9-genus3-genus1": ([(3, 0), (1, -2)], 0, 1, 1),
    "k9-genus2-genus2": ([(2, -2), (2, 0)], 0, 1, 1),
}


def split_doc(name: str) -> Doc:
    comps, xi, yi, mult = _SPLITS[name]
    return gram_split_doc(name, 9, comps, xi, yi, mult, fb=12)


def gram_split_doc(name: str, k: int, comps: list[tuple[int, int]], xi: int, yi: int,
                   mult: int, fb: int) -> Doc:
    """K, F and two components, orthogonal to the k nodal curves.

    ``F.Gamma_xi = x`` and ``F.Gamma_yi = fb - mult*x`` (other components are
    copies of Gamma_xi).
    """
    ns = nodes(k)
    kk = {9: -2, 11: -4}[k]
    a, b = f"Gamma{xi}", f"Gamma{yi}"
    (ga, sa), (gb, sb) = comps[xi], comps[yi]
    gram: dict[str, Any] = {
        "K.K": kk, "K.F": -2, "F.F": 0,
        f"K.{a}": 2 * ga - 2 - sa, f"K.{b}": 2 * gb - 2 - sb,
        f"{a}.{a}": sa, f"{b}.{b}": sb, f"{a}.{b}": 0,
        f"F.{a}": {"unknown": "x"}, f"F.{b}": {"unknown": "x", "coeffs": [fb, -mult]},
    }
    _nodal_block(gram, ["K", "F", a, b], ns)
    # the polarization F + Gamma_xi is positive once x > 0
    return {
        "version": 1, "name": name,
        "description": f"k={k} rational, B0 = " + " + ".join(f"({g},{s})" for g, s in comps),
        "k": k, "chiO": 1, "rho": _FIBRATION[k]["rho"],
        "symbols": ["K", "F", a, b, *ns],
        "gram": gram, "nodal": ns,
        "classes": {"P": f"F+{a}"},
        "branch": {"components": [{"g": g, "ss": s} for g, s in comps]},
        "axioms": ["PICARD_RANK", "NODAL_COMPLEMENT", "HODGE_INDEX"],
        "checks": [
            {"rule": "solve_unknown",
             "args": {"classes": ["K", "F", a, b], "orthogonal": ns, "admissible": ["even"]},
             "expect": "SATISFIED", "label": f"F.{a} from a singular Gram"},
        ],
    }


# ---------------------------------------------------------------------------
# k = 11 with three branch components: the pencil exclusion


def k11_r2_doc() -> Doc:
    ns = nodes(11)
    gram: dict[str, Any] = {
        "K.K": -4, "K.D": 0, "D.D": 14, "K.F": -2, "F.F": 0, "D.F": 4,
        "K.G": -1, "G.G": -1, "D.G": 1, "F.G": 0, "G.N0": 1,
    }
    comps = [(2, -2, 4), (2, 0, 2), (2, 0, 2)]
    gs = []
    for i, (g, ss, d) in enumerate(comps):
        a = f"Gamma{i}"
        gs.append(a)
        kc = 2 * g - 2 - ss
        gram.update({f"{a}.{a}": ss, f"K.{a}": kc, f"F.{a}": d, f"G.{a}": g - 1,
                     f"D.{a}": 2 * kc + ss})
        for j in range(i + 1, len(comps)):
            gram[f"{a}.Gamma{j}"] = 0
    _nodal_block(gram, ["K", "D", "F", "G", *gs], ns)
    checks: list[dict] = [
        {"rule": "divisibility_three", "args": {"g": 2}, "expect": "SATISFIED",
         "label": "G.Gamma = g - 1 and K.Gamma = F.Gamma"},
        {"rule": "rh_bound",
         "args": {"degree": ["F", "Gamma0"], "fibre_count": 5, "genus": 2},
         "expect": "SATISFIED", "label": "genus 2 allows F.Gamma0 = 4"},
    ]
    for i in (1, 2):
        checks.append({"rule": "index",
                       "args": {"p": "M1", "lhs": f"Gamma{i}", "rhs": "-K+F",
                                "label": f"Gamma{i}"},
                       "expect": "RELATION_FORCED", "label": f"Gamma{i} against M1"})
    checks.append({
        "rule": "compare",
        "args": {"lhs": ["F", "Gamma0"], "op": "<=", "rhs": ["F", "Gamma1"],
                 "axioms": ["BPF_PENCIL_MONOTONE"], "relations": ["Gamma1", "Gamma2"],
                 "requires": [["Gamma1", "Gamma1", 0], ["Gamma0", "Gamma1", 0],
                              ["F", "Gamma0", 4], ["F", "Gamma1", 2]]},
        "expect": "VIOLATION", "label": "Gamma0 lies in a member of |Gamma1|",
    })
    return {
        "version": 1, "name": "k11-r2",
        "description": "k=11 rational, B0 = (2,-2) + (2,0) + (2,0)",
        "k": 11, "chiO": 1, "rho": 14,
        "symbols": ["K", "D", "F", "G", *gs, *ns],
        "gram": gram, "nodal": ns,
        "classes": {"M1": "K+D", "B0": "D-2K"},
        "branch": {"components": [{"g": g, "ss": s, "class": a}
                                  for (g, s, _), a in zip(comps, gs)]},
        "axioms": ["HODGE_INDEX", "BPF_PENCIL_MONOTONE"],
        "checks": checks,
    }


# ---------------------------------------------------------------------------
# fixture-only contexts


def fixture_context_doc(name: str, k: int, kk: int, kb: int, bb: int,
                        comps: list[tuple[int, int]], description: str) -> Doc:
    ns = nodes(k)
    gram: dict[str, Any] = {"K.K": kk}
    _nodal_block(gram, ["K"], ns)
    return {
        "version": 1, "name": name, "description": description,
        "k": k, "chiO": 1,
        "invariants": {"KK": kk, "KB": kb, "BB": bb},
        "symbols": ["K", *ns], "gram": gram, "nodal": ns,
        "branch": {"components": [{"g": g, "ss": s} for g, s in comps]},
        "axioms": [], "checks": [],
    }


_FIXTURE_CONTEXTS = [
    ("k5-general-type", 5, 2, 2, -2, [(1, -2)], "k=5, W minimal of general type"),
    ("k7-minimal", 7, 1, 2, 2, [(3, 2)], "k=7, W minimal of general type"),
    ("k7-non-minimal", 7, 0, 4, -2, [(2, -2)], "k=7, W of general type, not minimal"),
    ("k7-elliptic", 7, 0, 4, -2, [(2, -2)], "k=7, W properly elliptic"),
    ("k9-enriques", 9, -2, 6, -2, [(3, -2)], "k=9, W birational to an Enriques surface"),
]


# ---------------------------------------------------------------------------
# registry


def builtin_documents() -> dict[str, Doc]:
    docs: dict[str, Doc] = {}
    for k in (9, 11):
        d = fibration_doc(k)
        docs[d["name"]] = d
        for v in ("i", "ii"):
            d = fibre_doc(k, v)
            docs[d["name"]] = d
    for dc in (0, 1, 2, 3):
        d = minus_one_doc(dc)
        docs[d["name"]] = d
    d = minus_one_doc(3, two_nodes=True)
    docs[d["name"]] = d
    for case in ("f", "h"):
        d = odd_degree_doc(case)
        docs[d["name"]] = d
    for name in _SPLITS:
        docs[name] = split_doc(name)
    d = k11_r2_doc()
    docs[d["name"]] = d
    for args in _FIXTURE_CONTEXTS:
        d = fixture_context_doc(*args)
        docs[d["name"]] = d
    return docs


@lru_cache(maxsize=None)
def _loaded(name: str) -> Scenario:
    return load_scenario(builtin_documents()[name])


def builtin_names() -> list[str]:
    return list(builtin_documents())


def builtin_scenarios() -> list[Scenario]:
    return [_loaded(n) for n in builtin_names()]


def get_builtin(name: str) -> Scenario:
    if name not in builtin_documents():
        raise SchemaError(name, "no such file or built-in scenario")
    return _loaded(name)
