"""Command-line entry point: ``surfacelattice <verb> ...``.

Exit status is 0 on success, 1 when a replayed verdict differs from the
expected one, 2 on usage or schema errors.  Errors are written to stderr as
one JSON record per line.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import re
import sys
from pathlib import Path
from typing import Sequence

import yaml

from .branches import (
    CONTEXTS,
    DEFAULT_VARIANT,
    BranchCandidate,
    ConstraintSet,
    classify,
    enumerate_with_metadata,
    filter_candidates,
    solve_component_classes,
)
from .builtins import get_builtin
from .certificate import render_value
from .engine import replay_steps, rule_solve_unknown
from .errors import LatticeError, SchemaError
from .fixtures import load_fixtures
from .report import build_report, fixtures_text, mj_rows, mj_text
from .scenario import Scenario, load_path

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE = 0, 1, 2

_SCENARIO_FOR_K = {5: "k5-general-type", 7: "k7-minimal", 9: "k9-rational", 11: "k11-rational"}


class UsageError(LatticeError):
    code = "UsageError"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def expand_range(text: str) -> list[str]:
    """``N0..N3`` -> N0,N1,N2,N3 and ``1..4`` -> 1,2,3,4; other tokens pass through."""
    out = []
    for token in (t.strip() for t in text.split(",")):
        if not token:
            continue
        m = re.fullmatch(r"([A-Za-z_]*)(\d+)\.\.\1(\d+)", token)
        if m:
            prefix, lo, hi = m.group(1), int(m.group(2)), int(m.group(3))
            if hi < lo:
                raise UsageError(f"empty range {token!r}")
            out += [f"{prefix}{i}" for i in range(lo, hi + 1)]
        else:
            out.append(token)
    return out


def resolve_scenario(ref: str) -> Scenario:
    """An existing path wins over a built-in of the same name."""
    if Path(ref).is_file():
        return load_path(ref)
    return get_builtin(ref)


def _dump(obj) -> str:
    return json.dumps(render_value(obj), sort_keys=True, indent=2, ensure_ascii=False)


def _emit(args, text: str) -> None:
    if getattr(args, "out", None):
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


# ---------------------------------------------------------------------------
# verbs


def cmd_verify(args) -> int:
    s = resolve_scenario(args.scenario)
    result = replay_steps(s, fail_fast=False)
    if args.format == "json":
        body = _dump({
            "scenario": s.name,
            "ok": result.ok,
            "steps": [{"index": st.index, "label": st.label, "expected": st.expected,
                       "met": st.met, "certificate": st.certificate.to_dict()}
                      for st in result.steps],
        })
    else:
        lines = [f"scenario {s.name}"]
        for st in result.steps:
            mark = "ok" if st.met else f"MISMATCH (expected {st.expected})"
            lines.append(f"step {st.index} {st.label}: {mark}")
            lines.append(st.certificate.to_text())
        lines.append("all expected verdicts met" if result.ok else "verdict mismatch")
        body = "\n".join(lines)
    _emit(args, body)
    for st in result.steps:
        if not st.met:
            print(json.dumps({"error": "UnexpectedVerdict", "step": st.index,
                              "expected": st.expected, "got": st.certificate.verdict.value},
                             sort_keys=True), file=sys.stderr)
    return EXIT_OK if result.ok else EXIT_MISMATCH


def cmd_solve_gram(args) -> int:
    s = resolve_scenario(args.scenario)
    classes = expand_range(args.classes)
    admissible = expand_range(args.admissible) if args.admissible else ["int"]
    orthogonal = expand_range(args.orthogonal) if args.orthogonal else []
    c = rule_solve_unknown(s, classes, admissible, orthogonal=orthogonal)
    d = c.data
    if args.format == "json":
        _emit(args, _dump(c.to_dict()))
    else:
        roots = ", ".join(str(render_value(r)) for r in d.get("roots", [])) or "none"
        acc = ", ".join(str(render_value(r)) for r in d.get("accepted", [])) or "none"
        line = f"{d.get('factored', d.get('polynomial'))}; roots: {roots}; accepted: {acc}"
        for rej in d.get("rejected", []):
            line += f"; rejected: {render_value(rej['root'])} ({rej['reason']})"
        _emit(args, line)
    return EXIT_OK


def _constraints(args, k: int) -> ConstraintSet:
    cs = CONTEXTS[k].constraints if k in CONTEXTS else ConstraintSet()
    changes = {}
    if args.dgamma_min is not None:
        changes["dgamma_min"] = args.dgamma_min
    if args.no_hodge:
        changes["hodge"] = False
    if args.max_genus is not None:
        changes["max_genus"] = args.max_genus
    if args.max_components is not None:
        changes["max_components"] = args.max_components
    return dataclasses.replace(cs, **changes)


def cmd_enumerate(args) -> int:
    name = args.scenario or _SCENARIO_FOR_K.get(args.k)
    if name is None:
        raise UsageError(f"no default scenario for k={args.k}; pass --scenario")
    s = resolve_scenario(name)
    cs = _constraints(args, s.invariants.k)
    enum = enumerate_with_metadata(s.invariants, cs)
    if args.format == "json":
        _emit(args, _dump({
            "scenario": s.name, "constraints": cs.describe(), "component cap": enum.cap,
            "cap reason": enum.cap_reason,
            "candidates": [{"branch": c.to_json(), "text": str(c)} for c in enum.candidates],
        }))
    else:
        lines = [f"enumeration: {s.name} ({len(enum.candidates)} candidates)"]
        lines += [f"  {c}" for c in enum.candidates]
        lines.append(f"# component cap: {enum.cap} ({enum.cap_reason})")
        _emit(args, "\n".join(lines))
    return EXIT_OK


def cmd_classify(args) -> int:
    table = classify(args.k, args.variant)
    _emit(args, _dump(table.to_dict()) if args.format == "json" else table.to_text())
    return EXIT_OK


def read_candidates(path: str) -> tuple[list[BranchCandidate], dict]:
    try:
        raw = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise SchemaError(path, f"cannot read candidates ({exc.strerror})") from None
    except yaml.YAMLError as exc:
        raise SchemaError(path, f"not JSON or YAML ({exc})") from None
    if isinstance(raw, dict):
        raw = raw.get("candidates")
    if not isinstance(raw, list):
        raise SchemaError(f"{path}:$.candidates", "expected a list of candidates")
    cands, labels = [], {}
    for i, item in enumerate(raw):
        label = ""
        if isinstance(item, dict):
            label, item = str(item.get("label", "")), item.get("branch")
        try:
            c = BranchCandidate(tuple((int(g), int(ss)) for g, ss in item))
        except (TypeError, ValueError) as exc:
            raise SchemaError(f"{path}:$.candidates[{i}]", f"bad branch ({exc})") from None
        cands.append(c)
        if label:
            labels[c] = label
    return cands, labels


def cmd_filter(args) -> int:
    cands, labels = read_candidates(args.input)
    s = get_builtin(_SCENARIO_FOR_K[args.k]) if args.k in CONTEXTS else None
    if s is None:
        raise UsageError(f"no exclusion rules for k={args.k}")
    table = filter_candidates(cands, s, labels)
    if args.solve:
        for row in table.kept:
            row.classes = solve_component_classes(s, row.candidate)
    _emit(args, _dump(table.to_dict()) if args.format == "json" else table.to_text())
    return EXIT_OK


def cmd_mj_table(args) -> int:
    if args.k not in (9, 11):
        raise UsageError("mj-table supports --k 9 or --k 11")
    js = [int(j) for j in expand_range(args.j)]
    rows = mj_rows(args.k, js)
    if args.format == "json":
        _emit(args, _dump([{"j": j, "KM": km, "DM": dm, "MM": mm} for j, km, dm, mm in rows]))
    else:
        _emit(args, mj_text(rows))
    return EXIT_OK


def cmd_report(args) -> int:
    _emit(args, build_report().rstrip("\n"))
    return EXIT_OK


def cmd_fixtures(args) -> int:
    rows = [r for r in load_fixtures() if args.table is None or r.table == args.table]
    if args.format == "json":
        _emit(args, _dump([r.to_dict() for r in rows]))
    else:
        _emit(args, fixtures_text(args.table))
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="surfacelattice", description="Exact intersection-lattice proof replay.")
    sub = p.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    def verb(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(func=fn)
        sp.add_argument("--format", choices=("text", "json"), default="text")
        sp.add_argument("--out", help="write output to this file")
        return sp

    sp = verb("verify", cmd_verify, "replay a scenario and check expected verdicts")
    sp.add_argument("scenario", help="scenario file or built-in name")

    sp = verb("solve-gram", cmd_solve_gram, "solve the unknown from a singular Gram")
    sp.add_argument("scenario")
    sp.add_argument("--classes", required=True, help="comma list, ranges like N0..N8")
    sp.add_argument("--orthogonal", help="classes orthogonal to the listed ones")
    sp.add_argument("--admissible", help="comma list of int, even, nonneg, positive, exclude:v")

    sp = verb("enumerate", cmd_enumerate, "list branch candidates meeting the constraints")
    sp.add_argument("--k", type=int, default=9)
    sp.add_argument("--scenario", help="take invariants from this scenario")
    sp.add_argument("--dgamma-min", type=int)
    sp.add_argument("--no-hodge", action="store_true")
    sp.add_argument("--max-genus", type=int)
    sp.add_argument("--max-components", type=int)

    sp = verb("classify", cmd_classify, "enumerate, filter and solve one case")
    sp.add_argument("--k", type=int, required=True, choices=sorted(DEFAULT_VARIANT))
    sp.add_argument("--variant")
    sp.set_defaults(format="table")
    for a in sp._actions:
        if a.dest == "format":
            a.choices = ("table", "text", "json")

    sp = verb("filter", cmd_filter, "apply exclusion rules to a candidate list")
    sp.add_argument("--k", type=int, default=9)
    sp.add_argument("--input", required=True, help="JSON or YAML list of branches")
    sp.add_argument("--solve", action="store_true", help="also solve component classes")

    sp = verb("mj-table", cmd_mj_table, "print (K.M_j, D.M_j, M_j^2) for M_j = jK + D")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--j", default="1..4")

    verb("report", cmd_report, "regenerate every table in one document")

    sp = verb("fixtures", cmd_fixtures, "print validated fixture rows")
    sp.add_argument("--table")
    return p


def run(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except LatticeError as exc:
        print(json.dumps(exc.record(), sort_keys=True), file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
