"""Finite Cantor scheme stages: a full binary tree of shrinking cells.

A depth-N scheme assigns a cell to every binary word of length <= N and
must satisfy, with exact arithmetic:

* nestedness   -- each child cell is contained in its parent cell,
* disjointness -- the two children of a node are disjoint (closed
                  intervals touching at an endpoint count as overlapping),
* shrinking    -- the cell of w has diameter at most 2^-|w|.

`validate_scheme` never raises on a bad scheme; every violation becomes a
report entry naming the offending word(s).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .core import PreconditionError
from .dyadic import pow2
from .systems import Cell, IntervalCell, SymbolicCell, SystemHandle, check_cell


@dataclass
class Scheme:
    depth: int
    cells: dict[str, Cell]

    def cell(self, w: str) -> Cell:
        try:
            return self.cells[w]
        except KeyError:
            raise PreconditionError(f"scheme has no cell for {w!r}") from None

    def words_at(self, length: int) -> list[str]:
        return sorted(w for w in self.cells if len(w) == length)

    def branches(self) -> list[str]:
        return self.words_at(self.depth)


@dataclass(frozen=True)
class Violation:
    kind: str  # "missing" | "nested" | "disjoint" | "shrinking" | "cell"
    words: tuple[str, ...]
    detail: str


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, kind: str, words: tuple[str, ...], detail: str) -> None:
        self.violations.append(Violation(kind, words, detail))

    def summary(self) -> str:
        if self.ok:
            return "scheme valid"
        first = self.violations[0]
        return f"{len(self.violations)} violation(s); first: {first.kind} at {first.words}: {first.detail}"


def cell_contains(outer: Cell, inner: Cell) -> bool:
    if isinstance(outer, SymbolicCell) and isinstance(inner, SymbolicCell):
        return inner.word.startswith(outer.word)
    if isinstance(outer, IntervalCell) and isinstance(inner, IntervalCell):
        return outer.lo <= inner.lo and inner.hi <= outer.hi
    return False


def cells_disjoint(a: Cell, b: Cell) -> bool:
    if isinstance(a, SymbolicCell) and isinstance(b, SymbolicCell):
        return not (a.word.startswith(b.word) or b.word.startswith(a.word))
    if isinstance(a, IntervalCell) and isinstance(b, IntervalCell):
        # closed cells: a shared endpoint is an intersection
        return a.hi < b.lo or b.hi < a.lo
    return True


def cell_diameter_ok(c: Cell, depth: int) -> bool:
    """diameter(c) <= 2^-depth, exactly."""
    if isinstance(c, SymbolicCell):
        return len(c.word) >= depth
    return c.hi - c.lo <= pow2(-depth)


def validate_scheme(sch: Scheme, sys: SystemHandle) -> ValidationReport:
    report = ValidationReport()
    for length in range(sch.depth + 1):
        for bits in range(1 << length):
            w = format(bits, "b").zfill(length) if length else ""
            if w not in sch.cells:
                report.add("missing", (w,), "no cell assigned")
    for w, c in sorted(sch.cells.items(), key=lambda kv: (len(kv[0]), kv[0])):
        try:
            check_cell(sys, c)
        except PreconditionError as exc:
            report.add("cell", (w,), str(exc))
            continue
        if not cell_diameter_ok(c, len(w)):
            report.add("shrinking", (w,), f"cell diameter exceeds 2^-{len(w)}")
        if len(w) < sch.depth:
            kids = [w + "0", w + "1"]
            if all(k in sch.cells for k in kids):
                c0, c1 = sch.cells[kids[0]], sch.cells[kids[1]]
                for k, ck in zip(kids, (c0, c1)):
                    if not cell_contains(c, ck):
                        report.add("nested", (w, k), "child cell not contained in parent")
                if not cells_disjoint(c0, c1):
                    report.add("disjoint", (w,), "children overlap")
    return report


def identity_scheme(depth: int) -> Scheme:
    """cell(w) = cylinder of w itself; the trivial valid scheme on sequences."""
    cells: dict[str, Cell] = {}
    for length in range(depth + 1):
        for bits in range(1 << length):
            w = format(bits, "b").zfill(length) if length else ""
            cells[w] = SymbolicCell(w)
    return Scheme(depth, cells)
