"""Verdict records emitted by every checking rule."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .poly import UniPoly, fmt_rational


class Verdict(str, enum.Enum):
    SATISFIED = "SATISFIED"
    VIOLATION = "VIOLATION"
    RELATION_FORCED = "RELATION_FORCED"
    INCONCLUSIVE = "INCONCLUSIVE"

    def __str__(self) -> str:
        return self.value


def render_value(value: Any) -> Any:
    """Exact, JSON-friendly rendering: rationals become ``"p/q"`` strings."""
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return value.numerator if value.denominator == 1 else fmt_rational(value)
    if isinstance(value, UniPoly):
        if value.is_constant():
            return render_value(value.constant())
        return str(value)
    if isinstance(value, (list, tuple)):
        return [render_value(v) for v in value]
    if isinstance(value, dict):
        return {str(k): render_value(v) for k, v in value.items()}
    if isinstance(value, enum.Enum):
        return value.value
    return str(value)


@dataclass(frozen=True)
class Premise:
    description: str
    value: Any
    # (operation, arguments) that recomputes ``value``; empty when the premise
    # is an input rather than a computed quantity
    replay: tuple = ()


@dataclass(frozen=True)
class Certificate:
    rule: str
    premises: tuple[Premise, ...]
    conclusion: str
    verdict: Verdict
    anchor: str = ""
    axioms_cited: tuple[str, ...] = ()
    relation: str | None = None
    data: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.verdict is not Verdict.VIOLATION

    def premise(self, description: str) -> Any:
        for p in self.premises:
            if p.description == description:
                return p.value
        raise KeyError(description)

    def to_dict(self) -> dict:
        out = {
            "rule": self.rule,
            "premises": [
                {"description": p.description, "value": render_value(p.value)}
                for p in self.premises
            ],
            "conclusion": self.conclusion,
            "verdict": self.verdict.value,
            "axioms_cited": list(self.axioms_cited),
            "anchor": self.anchor,
        }
        if self.relation is not None:
            out["relation"] = self.relation
        if self.data:
            out["data"] = render_value(self.data)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def to_text(self) -> str:
        lines = [f"[{self.verdict.value}] {self.rule}: {self.conclusion}"]
        for p in self.premises:
            lines.append(f"    {p.description} = {_text(render_value(p.value))}")
        if self.axioms_cited:
            lines.append(f"    axioms: {', '.join(self.axioms_cited)}")
        if self.anchor:
            lines.append(f"    ref: {self.anchor}")
        return "\n".join(lines)


def _text(v: Any) -> str:
    if isinstance(v, list):
        return "[" + ", ".join(_text(x) for x in v) + "]"
    return str(v)


def make(rule: str, premises, conclusion: str, verdict: Verdict, **kw) -> Certificate:
    prem = tuple(p if isinstance(p, Premise) else Premise(*p) for p in premises)
    return Certificate(rule, prem, conclusion, verdict, **kw)
