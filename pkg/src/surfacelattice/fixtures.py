"""Known branch-divisor tables, validated by adjunction on load."""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from .errors import InvariantViolation, SchemaError
from .toolkit import SurfaceInvariants, adjunction_k, genus_additivity, pa_branch

# D = 2K_W + B0 pulls back to twice the canonical class of a surface with K^2 = 7
D_SQUARED = 14


@dataclass(frozen=True)
class FixtureRow:
    table: str
    case: str
    k: int
    KK: int
    quotient: str
    components: tuple[tuple[int, int], ...]
    existence: str
    sources: tuple[str, ...]

    @property
    def KB(self) -> int:
        return sum(adjunction_k(g, ss) for g, ss in self.components)

    @property
    def BB(self) -> int:
        return sum(ss for _, ss in self.components)

    @property
    def pa(self) -> int:
        return pa_branch(self.BB, self.KB)

    def invariants(self) -> SurfaceInvariants:
        return SurfaceInvariants.from_branch(self.k, self.KK, self.KB, self.BB)

    def branch_text(self) -> str:
        return " + ".join(f"({g},{ss})" for g, ss in self.components)

    def to_dict(self) -> dict:
        return {
            "table": self.table, "case": self.case, "k": self.k, "KK": self.KK,
            "quotient": self.quotient, "branch": [list(c) for c in self.components],
            "existence": self.existence, "sources": list(self.sources),
            "KB": self.KB, "BB": self.BB, "pa": self.pa,
        }


def validate_row(row: FixtureRow) -> SurfaceInvariants:
    """Adjunction and genus additivity must agree with D^2 = 14."""
    where = f"{row.table} {row.case} (k={row.k}, {row.branch_text()})"
    if not row.components:
        raise InvariantViolation(f"{where}: empty branch")
    if row.existence not in ("known", "unknown"):
        raise InvariantViolation(f"{where}: existence tag {row.existence!r}")
    inv = row.invariants()
    if inv.DD != D_SQUARED:
        raise InvariantViolation(f"{where}: D^2 = {inv.DD}, expected {D_SQUARED}")
    additive = genus_additivity([g for g, _ in row.components])
    if additive != row.pa:
        raise InvariantViolation(
            f"{where}: sum(g) - r = {additive} but p_a(B0) = {row.pa}"
        )
    return inv


def parse_fixtures(document: dict) -> list[FixtureRow]:
    sources = document.get("sources", {})
    rows = []
    for t, table in enumerate(document.get("tables", [])):
        for i, raw in enumerate(table.get("rows", [])):
            path = f"$.tables[{t}].rows[{i}]"
            try:
                row = FixtureRow(
                    table=table["name"], case=raw["case"], k=int(raw["k"]), KK=int(raw["KK"]),
                    quotient=raw["quotient"],
                    components=tuple((int(g), int(ss)) for g, ss in raw["branch"]),
                    existence=raw["existence"], sources=tuple(raw.get("sources", ())),
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise SchemaError(path, f"malformed fixture row ({exc})") from None
            unknown = [s for s in row.sources if s not in sources]
            if unknown:
                raise SchemaError(path, f"unknown source tags {unknown}")
            validate_row(row)
            rows.append(row)
    return rows


@lru_cache(maxsize=1)
def _bundled() -> dict:
    text = resources.files("surfacelattice").joinpath("data/fixtures.json").read_text("utf-8")
    return json.loads(text)


def fixture_sources() -> dict[str, str]:
    return dict(_bundled()["sources"])


def load_fixtures() -> list[FixtureRow]:
    return parse_fixtures(_bundled())


def fixture_table(name: str = "classification") -> list[FixtureRow]:
    return [r for r in load_fixtures() if r.table == name]
