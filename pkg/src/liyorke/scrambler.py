"""Explicit scrambled Cantor scheme stages for the shift and the tent map.

The coding interleaves growing data segments with growing zero runs.  A
branch word x is sent to

    x[:1] 0^L(0) M  x[:2] 0^L(1) M  x[:3] 0^L(2) M ...

where L(m) = (m+1)^2 and M is an optional marker bit.  Right after the
stage-m data segment every branch shows the same zero run, so all pairs
come within 2^-L(m) of each other there; at the data positions the coded
sequences of two branches disagree wherever the branch words do, which
pins their distance from below.  The stage start positions p(m) and the
post-data positions r(m) = p(m) + m + 1 are closed-form.

A depth-N stage assigns to each word its maximal determined coded prefix.
Branch cells can additionally be refined along the all-zeros continuation
so that every stage the horizon can see is fully determined; the
certificate machinery uses this to certify events at all those stages.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass
from fractions import Fraction

from .core import PreconditionError
from .dyadic import ONE, largest_covering_exponent, pow2
from .scheme import Scheme
from .systems import (
    SymbolicCell,
    SystemHandle,
    itinerary_cell,
    make_shift,
    make_tent,
    word_legal,
)

UNBOUNDED_SCHEDULE = 1 << 30  # sentinel: the proximal schedule never stalls


@dataclass(frozen=True)
class BlockPlan:
    """Stage layout: data length m+1, zero run L(m) = (m+1)^2, marker."""

    marker: str = ""

    def data_len(self, m: int) -> int:
        return m + 1

    def pad_len(self, m: int) -> int:
        return (m + 1) * (m + 1)

    def stage_len(self, m: int) -> int:
        return self.data_len(m) + self.pad_len(m) + len(self.marker)

    def p(self, m: int) -> int:
        """Start position of stage m."""
        # sum of j+1 + (j+1)^2 for j < m, plus markers
        s = m * (m + 1) // 2 + m * (m + 1) * (2 * m + 1) // 6
        return s + m * len(self.marker)

    def r(self, m: int) -> int:
        """First position after the stage-m data segment."""
        return self.p(m) + self.data_len(m)

    def max_stage(self, horizon: int) -> int:
        """Largest m with p(m) <= horizon."""
        m = 0
        while self.p(m + 1) <= horizon:
            m += 1
        return m

    def coded_word(self, branch: str) -> str:
        """Maximal coded prefix determined by a finite branch word."""
        parts = []
        for m in range(len(branch)):
            parts.append(branch[: m + 1])
            parts.append("0" * self.pad_len(m))
            parts.append(self.marker)
        parts.append(branch)  # determined start of the next data segment
        return "".join(parts)


SHIFT_PLAN = BlockPlan(marker="")
TENT_PLAN = BlockPlan(marker="1")


@dataclass(frozen=True)
class ScrambleParams:
    eps: Fraction
    delta: Fraction
    k: int
    horizon: int

    def __post_init__(self) -> None:
        if self.eps <= 0 or self.delta <= 0:
            raise PreconditionError("eps and delta must be positive")
        if self.k < 1:
            raise PreconditionError("k must be at least 1")


@dataclass
class ScrambleBuild:
    """A built scrambled stage plus the coded words behind its cells."""

    sys: SystemHandle
    plan: BlockPlan
    depth: int
    horizon: int
    pad_to: int
    scheme: Scheme
    coded: dict[str, str]  # branch word -> coded symbol word of its cell

    def branch_pairs(self):
        branches = self.scheme.branches()
        for i, u in enumerate(branches):
            for v in branches[i + 1 :]:
                yield u, v

    def pair_events(
        self, u: str, v: str, max_sep: int | None = None
    ) -> tuple[list[tuple[int, Fraction]], list[tuple[int, Fraction]]]:
        """Exact (proximal, separation) event lists for a branch pair.

        Proximal events are emitted at the post-data positions r(m) of
        every fully determined stage within the horizon; separation
        events at every time at or before the horizon where the cells
        are strictly apart over all their points.
        """
        cu, cv = self.coded[u], self.coded[v]
        if self.sys.is_sequence():
            return self._events_symbolic(cu, cv, max_sep)
        return self._events_tent(cu, cv, max_sep)

    def _events_symbolic(self, cu, cv, max_sep):
        length = min(len(cu), len(cv))
        diffs = _diff_positions(cu[:length], cv[:length])
        sep = [(t, ONE) for t in diffs if t <= self.horizon]
        if max_sep is not None:
            sep = sep[:max_sep]
        prox = []
        for m in range(self.pad_to):
            t = self.plan.r(m)
            if t > self.horizon:
                break
            i = bisect_left(diffs, t)
            exponent = (diffs[i] - t) if i < len(diffs) else (length - t)
            prox.append((t, pow2(-exponent)))
        return prox, sep

    def _events_tent(self, cu, cv, max_sep):
        length = min(len(cu), len(cv))
        ru = _suffix_ranks(cu[:length])
        rv = _suffix_ranks(cv[:length])
        prox = []
        for m in range(self.pad_to):
            t = self.plan.r(m)
            if t > self.horizon or t >= length:
                break
            delta_rank = abs(ru[t] - rv[t])
            prox.append((t, Fraction(delta_rank + 1, 1 << (length - t))))
        sep = []
        for t in range(min(self.horizon, length - 1) + 1):
            delta_rank = abs(ru[t] - rv[t])
            if delta_rank >= 2:
                sep.append((t, Fraction(delta_rank - 1, 1 << (length - t))))
                if max_sep is not None and len(sep) >= max_sep:
                    break
        return prox, sep


def _diff_positions(u: str, v: str) -> list[int]:
    """Positions where two equal-length bit words differ, via integer xor."""
    x = int("1" + u, 2) ^ int("1" + v, 2)
    n = len(u)
    out = []
    while x:
        b = x.bit_length()
        out.append(n - b)
        x ^= 1 << (b - 1)
    return out


def _suffix_ranks(word: str) -> list[int]:
    """ranks[t] = itinerary interval index of word[t:], for every t.

    Uses cumulative-xor bits: the rank of a suffix is the tail of the
    cumulative-xor integer, complemented when the preceding cumulative
    bit is 1.
    """
    n = len(word)
    cum = []
    acc = 0
    for ch in word:
        acc ^= ord(ch) - 48
        cum.append(acc)
    tails = [0] * (n + 1)
    for t in range(n - 1, -1, -1):
        tails[t] = (cum[t] << (n - t - 1)) | tails[t + 1]
    ranks = [0] * n
    for t in range(n):
        if t == 0 or cum[t - 1] == 0:
            ranks[t] = tails[t]
        else:
            ranks[t] = (1 << (n - t)) - 1 - tails[t]
    return ranks


def _build(sys: SystemHandle, plan: BlockPlan, depth: int, horizon: int | None) -> ScrambleBuild:
    if depth < 1:
        raise PreconditionError("depth must be at least 1")
    if horizon is None:
        horizon = plan.p(depth + 1)
    pad_to = max(depth, plan.max_stage(horizon) + 1)
    cells: dict[str, object] = {}
    coded: dict[str, str] = {}
    for length in range(depth + 1):
        for bits in range(1 << length):
            w = format(bits, "b").zfill(length) if length else ""
            branch = w + "0" * (pad_to - depth) if length == depth else w
            symbol_word = plan.coded_word(branch)
            if length == depth:
                coded[w] = symbol_word
            if sys.kind == "tent":
                cells[w] = itinerary_cell(sys, symbol_word)
            else:
                if sys.kind == "sft" and not word_legal(sys.forbidden, symbol_word):
                    raise PreconditionError(
                        f"coded word for branch {branch!r} violates the forbidden list of {sys.name}"
                    )
                cells[w] = SymbolicCell(symbol_word)
    return ScrambleBuild(sys, plan, depth, horizon, pad_to, Scheme(depth, cells), coded)


def shift_scramble(depth: int, plan: BlockPlan = SHIFT_PLAN, horizon: int | None = None,
                   sys: SystemHandle | None = None) -> ScrambleBuild:
    """Scrambled stage on the full shift (or an SFT whose constraints admit it)."""
    return _build(sys or make_shift(), plan, depth, horizon)


def tent_scramble(depth: int, plan: BlockPlan = TENT_PLAN, horizon: int | None = None) -> ScrambleBuild:
    """Scrambled stage pushed into the unit interval through tent itineraries."""
    return _build(make_tent(), plan, depth, horizon)


# -- the eps/2 report ------------------------------------------------------


@dataclass(frozen=True)
class EpsilonRow:
    u: str
    v: str
    first_diff: int
    sep_count: int          # separation events with bound >= eps/2
    best_sep: Fraction
    best_prox: Fraction
    schedule_n: int         # largest n with a proximal event <= delta + 2^-n
    separated: bool


@dataclass
class EpsilonReport:
    eps: Fraction
    delta: Fraction
    horizon: int
    rows: list[EpsilonRow]

    @property
    def all_separated(self) -> bool:
        return all(r.separated for r in self.rows)

    @property
    def schedule_n(self) -> int:
        return min((r.schedule_n for r in self.rows), default=-1)

    def shortfalls(self) -> list[EpsilonRow]:
        return [r for r in self.rows if not r.separated]


def epsilon_scramble_report(build: ScrambleBuild, params: ScrambleParams,
                            delta_proximal: Fraction = Fraction(0),
                            collector=None) -> EpsilonReport:
    """Per-pair check that separation reaches eps/2 and proximality follows
    the delta + 2^-n schedule, both within the horizon.

    `collector(u, v, prox, sep)` sees every pair's raw event lists, so
    renderers can piggyback on the single pass.
    """
    half = params.eps / 2
    rows = []
    for u, v in build.branch_pairs():
        prox, sep = build.pair_events(u, v)
        if collector is not None:
            collector(u, v, prox, sep)
        good_sep = [b for _, b in sep if b >= half]
        best_sep = max((b for _, b in sep), default=Fraction(0))
        best_prox = min((b for _, b in prox), default=Fraction(2))
        margin = best_prox - delta_proximal
        n = largest_covering_exponent(margin) if margin > 0 else UNBOUNDED_SCHEDULE
        first = next(i for i in range(min(len(u), len(v))) if u[i] != v[i])
        rows.append(
            EpsilonRow(u, v, first, len(good_sep), best_sep, best_prox, n, bool(good_sep))
        )
    return EpsilonReport(params.eps, params.delta, params.horizon, rows)


# -- composition with a splitting stage -------------------------------------


@dataclass
class PipelineResult:
    scheme: Scheme
    depth: int
    pairs: dict[tuple[str, str], dict]


def transversal_clique_pipeline(hom, myc) -> PipelineResult:
    """Compose a splitting stage with a homomorphism stage.

    The output cell at w is the homomorphism's cell at the splitting
    stage's coded word for w; pairs inherit the homomorphism's filtration
    events and the splitting stage's difference witnesses.  The output
    depth is the largest one whose coded words the homomorphism covers.
    """
    out_depth = 0
    for d in range(1, myc.depth + 1):
        if myc.family.coded_len(d) <= hom.depth:
            out_depth = d
    if out_depth < 1:
        raise PreconditionError(
            f"no compatible depth: splitting words at depth 1 are longer than {hom.depth}"
        )
    cells = {}
    for length in range(out_depth + 1):
        for bits in range(1 << length):
            w = format(bits, "b").zfill(length) if length else ""
            cells[w] = hom.scheme.cell(myc.word(w))
    out = Scheme(out_depth, cells)
    pairs: dict[tuple[str, str], dict] = {}
    branches = out.branches()
    for i, u in enumerate(branches):
        for v in branches[i + 1 :]:
            wu, wv = myc.word(u), myc.word(v)
            pairs[(u, v)] = {
                "r": hom.pair_r_event(wu, wv),
                "wits": myc.pair_witnesses(u, v, upto=out_depth),
            }
    return PipelineResult(out, out_depth, pairs)
