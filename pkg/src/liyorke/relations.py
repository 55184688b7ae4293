"""Finite-horizon evaluation of proximality and separation on cell pairs.

Proximality is a liminf condition and separation evidence is a limsup
condition; neither is decidable from finitely many orbit steps, so every
check returns a three-valued verdict.  `holds` always carries re-checkable
witness data (orbit times and exact distance bounds over whole cells);
`unknown` carries the exhausted horizon.  A proximal check can never fail
at a finite horizon, only stay unknown.

The canonical filtration stage n uses threshold 2^-n and admissible times
m >= n, so stage n+1 membership implies stage n membership.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .core import PreconditionError
from .dyadic import pow2
from .systems import Cell, DistBound, SystemHandle, check_cell, dist_cells, orbit_cell

HOLDS = "holds"
FAILS = "fails"
UNKNOWN = "unknown"


@dataclass(frozen=True)
class Verdict:
    status: str
    events: tuple[tuple[int, Fraction], ...] = ()
    horizon: int | None = None

    @property
    def is_holds(self) -> bool:
        return self.status == HOLDS

    @staticmethod
    def holds(events: tuple[tuple[int, Fraction], ...]) -> "Verdict":
        return Verdict(HOLDS, events)

    @staticmethod
    def unknown(horizon: int) -> "Verdict":
        return Verdict(UNKNOWN, (), horizon)

    @staticmethod
    def fails(events: tuple[tuple[int, Fraction], ...]) -> "Verdict":
        return Verdict(FAILS, events)


def _orbit_pair(sys: SystemHandle, a: Cell, b: Cell, m: int) -> DistBound:
    return dist_cells(sys, orbit_cell(sys, a, m), orbit_cell(sys, b, m))


def proximal_check(sys: SystemHandle, a: Cell, b: Cell, eps: Fraction, horizon: int) -> Verdict:
    """holds at the first m <= horizon where the pair distance is < eps
    over the entire cells; otherwise unknown (never fails)."""
    if eps <= 0:
        raise PreconditionError("eps must be positive")
    check_cell(sys, a)
    check_cell(sys, b)
    for m in range(horizon + 1):
        bound = _orbit_pair(sys, a, b, m)
        if bound.upper < eps:
            return Verdict.holds(((m, bound.upper),))
    return Verdict.unknown(horizon)


def separation_check(sys: SystemHandle, a: Cell, b: Cell, delta: Fraction, horizon: int) -> Verdict:
    """holds with every m <= horizon where the pair distance is >= delta
    for all points of the cells; unknown when no such time exists."""
    if delta <= 0:
        raise PreconditionError("delta must be positive")
    check_cell(sys, a)
    check_cell(sys, b)
    events = []
    for m in range(horizon + 1):
        bound = _orbit_pair(sys, a, b, m)
        if bound.lower >= delta:
            events.append((m, bound.lower))
    if events:
        return Verdict.holds(tuple(events))
    return Verdict.unknown(horizon)


def liyorke_check(
    sys: SystemHandle,
    a: Cell,
    b: Cell,
    eps: Fraction,
    delta: Fraction,
    horizon: int,
) -> tuple[Verdict, Verdict]:
    """Proximal and separation verdicts side by side.

    Callers decide how many separation events they demand; a pair is
    desk-certified once both verdicts hold with enough events.
    """
    return (
        proximal_check(sys, a, b, eps, horizon),
        separation_check(sys, a, b, delta, horizon),
    )


def r_filtration_test(sys: SystemHandle, a: Cell, b: Cell, n: int, horizon: int) -> Verdict:
    """Stage-n membership: some m with n <= m <= horizon and distance < 2^-n."""
    if n < 0:
        raise PreconditionError("negative stage")
    check_cell(sys, a)
    check_cell(sys, b)
    eps = pow2(-n)
    for m in range(n, horizon + 1):
        bound = _orbit_pair(sys, a, b, m)
        if bound.upper < eps:
            return Verdict.holds(((m, bound.upper),))
    return Verdict.unknown(horizon)


class RFiltration:
    """The decreasing stage family for one system, bound to a horizon."""

    def __init__(self, sys: SystemHandle, horizon: int):
        self.sys = sys
        self.horizon = horizon

    def stage(self, n: int, a: Cell, b: Cell) -> Verdict:
        return r_filtration_test(self.sys, a, b, n, self.horizon)
