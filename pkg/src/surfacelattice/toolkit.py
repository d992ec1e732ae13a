"""Closed-form surface formulas: adjunction, Riemann-Roch, genus bookkeeping,
covering parity and Riemann-Hurwitz bounds."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil
from typing import Sequence

from . import certificate as cert
from .certificate import Certificate, Verdict
from .errors import EmptyList, IntegralityViolation, InvariantViolation
from .poly import as_fraction, fmt_rational


@dataclass(frozen=True)
class SurfaceInvariants:
    k: int
    KK: int
    KD: int
    DD: int
    KB: int
    BB: int
    chiO: int = 1
    rho: int | None = None

    def __post_init__(self):
        problems = self.consistency_problems()
        if problems:
            raise InvariantViolation("; ".join(problems))

    def consistency_problems(self) -> list[str]:
        out = []
        if self.DD != 4 * self.KK + 4 * self.KB + self.BB:
            out.append(f"D^2={self.DD} but 4K^2+4KB+B^2={4 * self.KK + 4 * self.KB + self.BB}")
        if self.KD != 2 * self.KK + self.KB:
            out.append(f"KD={self.KD} but 2K^2+KB={2 * self.KK + self.KB}")
        return out

    @classmethod
    def from_branch(cls, k: int, KK: int, KB: int, BB: int, **kw) -> "SurfaceInvariants":
        """Derive the D = 2K + B0 pairings from K^2, K.B0 and B0^2."""
        return cls(k, KK, 2 * KK + KB, 4 * KK + 4 * KB + BB, KB, BB, **kw)

    @property
    def DB(self) -> int:
        """D.B0, the total D-degree shared out among branch components."""
        return self.DD - 2 * self.KD

    @property
    def pa_branch(self) -> int:
        return pa_branch(self.BB, self.KB)


K9 = SurfaceInvariants(k=9, KK=-2, KD=2, DD=14, KB=6, BB=-2, chiO=1, rho=12)
K11 = SurfaceInvariants(k=11, KK=-4, KD=0, DD=14, KB=8, BB=-2, chiO=1, rho=14)


@dataclass(frozen=True)
class RamificationProfile:
    degree: int
    contributions: tuple[Fraction, ...] = ()

    def __post_init__(self):
        if self.degree < 1:
            raise ValueError("degree must be >= 1")
        object.__setattr__(
            self, "contributions", tuple(as_fraction(c) for c in self.contributions)
        )
        if any(c < 0 for c in self.contributions):
            raise ValueError("ramification contributions must be nonnegative")


def adjunction_genus(kc: int, cc: int) -> Fraction:
    """Genus of a smooth curve from K.C and C^2; the caller checks integrality."""
    return Fraction(kc + cc, 2) + 1


def adjunction_k(g: int, ss: int) -> int:
    """K.C of a smooth curve of genus g and self-intersection ss."""
    return 2 * g - 2 - ss


def riemann_roch_chi(chiO: int, dd: int, kd: int) -> int:
    if (dd - kd) % 2:
        raise IntegralityViolation(f"D^2 - K.D = {dd - kd} is odd")
    return chiO + (dd - kd) // 2


def mj_invariants(j: int, inv: SurfaceInvariants) -> tuple[int, int, int]:
    """(K.M_j, D.M_j, M_j^2) for M_j = jK + D."""
    if j < 0:
        raise ValueError("j must be >= 0")
    return (
        j * inv.KK + inv.KD,
        j * inv.KD + inv.DD,
        j * j * inv.KK + 2 * j * inv.KD + inv.DD,
    )


def pa_branch(bb: int, kb: int) -> int:
    if (bb + kb) % 2:
        raise IntegralityViolation(f"B^2 + K.B = {bb + kb} is odd")
    return (bb + kb) // 2 + 1


def genus_additivity(genera: Sequence[int]) -> int:
    """Arithmetic genus of a disjoint union of smooth curves."""
    if not genera:
        raise EmptyList("need at least one component")
    if any(g < 0 for g in genera):
        raise ValueError("genera must be nonnegative")
    return sum(genera) - (len(genera) - 1)


def parity_check(cb: int, cn: Sequence[int]) -> Certificate:
    """The pairing of an integral class with B0 + sum(N_i) = 2L must be even."""
    total = cb + sum(cn)
    premises = [("C.B0", cb), ("C.N_i", list(cn)), ("C.(B0+sum N_i)", total)]
    if total % 2 == 0:
        return cert.make(
            "parity_check", premises, f"C.(B0+sum N_i) = {total} is even",
            Verdict.SATISFIED, anchor="double cover data 2L = B0 + sum N_i",
        )
    return cert.make(
        "parity_check", premises, f"C.(B0+sum N_i) = {total} is odd",
        Verdict.VIOLATION, anchor="double cover data 2L = B0 + sum N_i",
    )


def rh_min_genus(profile: RamificationProfile) -> int:
    """Least g with 2g - 2 >= -2 deg + sum(contributions) (cover of P^1)."""
    rhs = -2 * profile.degree + sum(profile.contributions, Fraction(0))
    return max(ceil((rhs + 2) / 2), 0)


def rh_exclusion(pa: int, degree: int, ram_total) -> Certificate:
    if degree < 1:
        raise ValueError("degree must be >= 1")
    ram_total = as_fraction(ram_total)
    lhs = 2 * pa - 2
    rhs = -2 * degree + ram_total
    premises = [("2p_a-2", lhs), ("degree", degree), ("ramification lower bound", ram_total),
                ("-2*degree + ramification", rhs)]
    if lhs < rhs:
        return cert.make(
            "rh_exclusion", premises,
            f"Riemann-Hurwitz needs {lhs} >= {fmt_rational(rhs)}, which fails",
            Verdict.VIOLATION, anchor="Riemann-Hurwitz over P^1",
        )
    return cert.make(
        "rh_exclusion", premises, f"{lhs} >= {fmt_rational(rhs)}",
        Verdict.SATISFIED, anchor="Riemann-Hurwitz over P^1",
    )
