"""Finitely-presented dynamical systems evaluated exactly over whole cells.

Three system kinds are shipped:

* ``full-shift`` -- binary sequences with the left shift,
* ``sft``        -- a binary subshift of finite type given by a forbidden
                    word list (nonemptiness is checked at load time),
* ``tent``       -- the unit interval with T(x) = 1 - |2x - 1|.

Cells stand in for points: a cylinder (all sequences extending a word)
for the sequence systems, or a closed dyadic interval for the tent map.
All arithmetic on interval endpoints is exact; the tent map has slope 2,
so dyadic endpoints stay dyadic under iteration.

The sequence metric is d(x, y) = 2^-(first index where x and y differ),
0 for equal points.  The interval metric is |x - y|.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .core import PreconditionError, check_word
from .dyadic import ZERO, is_dyadic, pow2

SEQUENCE_KINDS = ("full-shift", "sft")


@dataclass(frozen=True)
class SystemHandle:
    kind: str
    name: str
    forbidden: tuple[str, ...] = ()

    def is_sequence(self) -> bool:
        return self.kind in SEQUENCE_KINDS


@dataclass(frozen=True)
class SymbolicCell:
    """The cylinder of all sequences extending `word`."""

    word: str


@dataclass(frozen=True)
class IntervalCell:
    """A closed interval [lo, hi] with exact dyadic endpoints in [0, 1]."""

    lo: Fraction
    hi: Fraction


Cell = SymbolicCell | IntervalCell


@dataclass(frozen=True)
class DistBound:
    """Exact bounds on the distance between any two points of two cells."""

    lower: Fraction
    upper: Fraction


def make_shift() -> SystemHandle:
    return SystemHandle("full-shift", "shift")


def make_tent() -> SystemHandle:
    return SystemHandle("tent", "tent")


def word_legal(forbidden: tuple[str, ...], w: str) -> bool:
    return not any(f in w for f in forbidden)


def make_sft(forbidden: tuple[str, ...], name: str = "sft") -> SystemHandle:
    """Build an SFT handle, rejecting lists whose shift space dies out.

    Emptiness check: exhaustively extend legal words to length
    (max forbidden length + 2); if none survive, no infinite legal
    sequence exists either.
    """
    for f in forbidden:
        check_word(f)
        if f == "":
            raise PreconditionError("empty forbidden word forbids everything")
    maxlen = max((len(f) for f in forbidden), default=0)
    target = maxlen + 2
    level = [""]
    for _ in range(target):
        level = [w + b for w in level for b in "01" if word_legal(forbidden, w + b)]
        if not level:
            raise PreconditionError(f"forbidden words {list(forbidden)} leave an empty shift space")
    return SystemHandle("sft", name, tuple(forbidden))


def load_system_file(path: str | Path) -> SystemHandle:
    """Parse a key-value system spec file (kind, name, forbidden)."""
    fields: dict[str, str] = {}
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise PreconditionError(f"bad system spec line: {raw!r}")
        key, value = line.split("=", 1)
        fields[key.strip()] = value.strip()
    kind = fields.get("kind", "")
    name = fields.get("name", kind or "system")
    if kind == "full-shift":
        return SystemHandle("full-shift", name)
    if kind == "tent":
        return SystemHandle("tent", name)
    if kind == "sft":
        words = tuple(w for w in fields.get("forbidden", "").replace(",", " ").split() if w)
        return make_sft(words, name)
    raise PreconditionError(f"unknown system kind: {kind!r}")


def resolve_system(spec: str) -> SystemHandle:
    """Resolve a CLI system reference: shift, tent, or sft:<path>."""
    if spec == "shift":
        return make_shift()
    if spec == "tent":
        return make_tent()
    if spec.startswith("sft:"):
        return load_system_file(spec[len("sft:") :])
    raise PreconditionError(f"unknown system {spec!r} (expected shift, tent, or sft:<path>)")


def whole_cell(sys: SystemHandle) -> Cell:
    if sys.is_sequence():
        return SymbolicCell("")
    return IntervalCell(Fraction(0), Fraction(1))


def check_cell(sys: SystemHandle, c: Cell) -> Cell:
    if sys.is_sequence():
        if not isinstance(c, SymbolicCell):
            raise PreconditionError(f"{sys.kind} system needs cylinder cells, got {type(c).__name__}")
        check_word(c.word)
        if sys.kind == "sft" and not word_legal(sys.forbidden, c.word):
            raise PreconditionError(f"word {c.word!r} contains a forbidden factor")
        return c
    if not isinstance(c, IntervalCell):
        raise PreconditionError(f"tent system needs interval cells, got {type(c).__name__}")
    if not (is_dyadic(c.lo) and is_dyadic(c.hi)):
        raise PreconditionError("interval endpoints must be dyadic rationals")
    if not (0 <= c.lo <= c.hi <= 1):
        raise PreconditionError(f"bad interval [{c.lo}, {c.hi}]")
    return c


# -- the step map on cells ------------------------------------------------

HALF = Fraction(1, 2)


def _tent_step_pair(lo_n: int, hi_n: int, exp: int) -> tuple[int, int]:
    """One tent step on [lo_n, hi_n] / 2^exp; the caller ensures exp >= 1."""
    half = 1 << (exp - 1)
    if hi_n <= half:
        return 2 * lo_n, 2 * hi_n
    if lo_n >= half:
        top = 1 << (exp + 1)
        return top - 2 * hi_n, top - 2 * lo_n
    top = 1 << (exp + 1)
    return min(2 * lo_n, top - 2 * hi_n), 1 << exp


def step_cell(sys: SystemHandle, c: Cell) -> Cell:
    """Image cell: contains f(x) for every point x of c, exactly."""
    check_cell(sys, c)
    if sys.is_sequence():
        return SymbolicCell(c.word[1:])
    return orbit_cell(sys, c, 1)


def orbit_cell(sys: SystemHandle, c: Cell, m: int) -> Cell:
    """m-fold composition of the step map; m = 0 returns c unchanged."""
    if m < 0:
        raise PreconditionError("negative orbit length")
    check_cell(sys, c)
    if sys.is_sequence():
        return SymbolicCell(c.word[m:])
    if m == 0:
        return c
    # integer fast path: endpoints as numerators over a common 2^exp
    exp = max(1, (c.lo.denominator.bit_length() - 1), (c.hi.denominator.bit_length() - 1))
    lo_n = c.lo.numerator << (exp - (c.lo.denominator.bit_length() - 1))
    hi_n = c.hi.numerator << (exp - (c.hi.denominator.bit_length() - 1))
    for _ in range(m):
        lo_n, hi_n = _tent_step_pair(lo_n, hi_n, exp)
    return IntervalCell(Fraction(lo_n, 1 << exp), Fraction(hi_n, 1 << exp))


def _forced_difference(u: str, v: str) -> int | None:
    """First index where two cylinder words are forced to disagree."""
    n = min(len(u), len(v))
    if u[:n] == v[:n]:
        return None
    # locate the first mismatch with integer xor (length-prefixed encoding)
    x = int("1" + u[:n], 2) ^ int("1" + v[:n], 2)
    return n - x.bit_length()


def dist_cells(sys: SystemHandle, a: Cell, b: Cell) -> DistBound:
    """Tight exact distance bounds over all point pairs of the two cells."""
    check_cell(sys, a)
    check_cell(sys, b)
    if sys.is_sequence():
        u, v = a.word, b.word
        diff = _forced_difference(u, v)
        if diff is not None:
            d = pow2(-diff)
            return DistBound(d, d)
        common = min(len(u), len(v))
        return DistBound(ZERO, pow2(-common))
    lower = max(ZERO, max(a.lo, b.lo) - min(a.hi, b.hi))
    upper = max(a.hi, b.hi) - min(a.lo, b.lo)
    return DistBound(lower, upper)


# -- tent itineraries -----------------------------------------------------


def itinerary_rank(w: str) -> int:
    """Index of the itinerary interval of w among the 2^|w| subintervals.

    The interval of w is [rank, rank + 1] / 2^|w|; the rank bits are the
    cumulative xor of the bits of w (the tent map reverses orientation on
    the right half, so the spatial order of the intervals is the binary
    reflected Gray ordering).
    """
    rank = 0
    acc = 0
    for ch in w:
        acc ^= int(ch)
        rank = (rank << 1) | acc
    return rank


def itinerary_cell(sys: SystemHandle, w: str) -> IntervalCell:
    """The closed dyadic interval of points whose first |w| tent symbols are w."""
    if sys.kind != "tent":
        raise PreconditionError("itineraries are defined for the tent system only")
    check_word(w)
    rank = itinerary_rank(w)
    den = 1 << len(w)
    return IntervalCell(Fraction(rank, den), Fraction(rank + 1, den))
