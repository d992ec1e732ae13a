"""One-document regeneration of every computed table."""

from __future__ import annotations

from .branches import classify
from .builtins import get_builtin, nodes
from .certificate import render_value
from .engine import rule_solve_unknown
from .fixtures import fixture_sources, load_fixtures
from .poly import fmt_rational
from .toolkit import mj_invariants

_FIBRATIONS = {9: ("k9-rational", range(1, 5)), 11: ("k11-rational", range(1, 3))}


def solve_line(name: str, classes: list[str], admissible=("int",), orthogonal=()) -> str:
    c = rule_solve_unknown(get_builtin(name), classes, list(admissible),
                           orthogonal=list(orthogonal))
    d = c.data
    roots = ", ".join(fmt_rational(r) for r in d.get("roots", [])) or "none"
    accepted = ", ".join(fmt_rational(r) for r in d.get("accepted", [])) or "none"
    out = f"{d['factored']}; roots: {roots}; accepted: {accepted}"
    for rej in d.get("rejected", []):
        out += f"; rejected: {fmt_rational(rej['root'])} ({rej['reason']})"
    return out


def _admissible(name: str) -> list[str]:
    for check in get_builtin(name).checks:
        if check["rule"] == "solve_unknown":
            return list(check["args"].get("admissible", ()))
    return []


def mj_rows(k: int, js) -> list[tuple[int, int, int, int]]:
    inv = get_builtin(_FIBRATIONS[k][0]).invariants
    return [(j, *mj_invariants(j, inv)) for j in js]


def mj_text(rows) -> str:
    lines = ["j  K.M_j  D.M_j  M_j^2"]
    for j, km, dm, mm in rows:
        lines.append(f"{j:<2} {km:>5}  {dm:>5}  {mm:>5}")
    return "\n".join(lines)


def fixtures_text(table: str | None = None) -> str:
    rows = [r for r in load_fixtures() if table is None or r.table == table]
    head = ("table", "case", "k", "K^2", "branch", "K.B0", "p_a", "existence", "sources")
    body = [(r.table, r.case, str(r.k), str(r.KK), r.branch_text(), str(r.KB), str(r.pa),
             r.existence, ",".join(r.sources)) for r in rows]
    widths = [max(len(x[i]) for x in [head, *body]) for i in range(len(head))]
    return "\n".join("  ".join(c.ljust(w) for c, w in zip(line, widths)).rstrip()
                     for line in [head, *body])


def build_report() -> str:
    parts = ["# surfacelattice report", ""]
    for k, (name, js) in _FIBRATIONS.items():
        inv = get_builtin(name).invariants
        parts += [
            f"## k = {k}, rational quotient",
            f"K^2 = {inv.KK}, K.B0 = {inv.KB}, B0^2 = {inv.BB}, rho = {inv.rho}",
            "",
            "Gram determinant of K, D, F, G and the nodal curves:",
            solve_line(name, ["K", "D", "F", "G", *nodes(k)], _admissible(name)),
            "",
            mj_text(mj_rows(k, js)),
            "",
            classify(k, "rational").to_text(),
            "",
        ]
    parts += ["## split Gram determinants (k = 9)"]
    for name in ("k9-genus3-genus1", "k9-genus2-genus2", "k9-three-components"):
        s = get_builtin(name)
        args = s.checks[0]["args"]
        line = solve_line(name, args["classes"], args["admissible"], args["orthogonal"])
        parts.append(f"{name}: {line}")
    parts += ["", "## known branch configurations", fixtures_text(), "", "sources:"]
    for key, text in sorted(fixture_sources().items()):
        parts.append(f"  {key}: {render_value(text)}")
    return "\n".join(parts) + "\n"
