"""The finite fusion engine and the splitting (Mycielski-style) engine.

The fusion engine grows a chain of *approximations*: a depth-n
approximation assigns to every binary word of length n a finite
natural-number word (a Baire-tree node), plus, for every level k < n, a
level map pairing up the two one-bit continuations of the k-th dense
word.  *Configurations* are the same shapes valued in Baire-space points,
represented here as a revealed finite prefix plus an opaque continuation
token.  A one-step extension deepens every map by one; the step itself is
produced by merging two configurations along an edge token, exactly the
construction used to contradict terminality in the dichotomy argument.

Oracles supply the interpretation (finite prefixes to cells, edge tokens
to certified cell pairs) and the search for extensions within a budget.
The engine trusts nothing: every extension is re-checked against the
one-step clauses (a)-(c), every configuration against the compatibility
clauses (i)-(iii) and the edge-coherence equation, and every new
approximation against the stage filtration invariant.

True terminality is not finitely decidable; a failed search within the
budget yields an `Exhausted` outcome rather than a coloring.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .core import LiYorkeError, PreconditionError, canonical_s, g0_edges_at_depth
from .dyadic import pow2
from .relations import Verdict, r_filtration_test
from .scheme import Scheme, cells_disjoint
from .systems import Cell, SymbolicCell, SystemHandle, dist_cells, make_shift, orbit_cell

NatWord = tuple[int, ...]


class OracleViolation(LiYorkeError):
    """An oracle produced data failing a mechanical clause check."""


def _words(length: int) -> list[str]:
    return [format(b, "b").zfill(length) if length else "" for b in range(1 << length)]


# -- fusion state ----------------------------------------------------------


@dataclass
class Approximation:
    depth: int
    phi: dict[str, NatWord]
    psi: dict[int, dict[str, NatWord]]  # level k < depth -> (words of len depth-k-1 -> NatWord of len depth)


@dataclass(frozen=True)
class BairePoint:
    """A Baire-space element at finite precision: prefix plus continuation."""

    prefix: NatWord
    token: tuple


@dataclass
class Configuration:
    depth: int
    phi: dict[str, BairePoint]
    psi: dict[int, dict[str, BairePoint]]


def initial_approximation() -> Approximation:
    return Approximation(0, {"": ()}, {})


def one_step_violations(a: Approximation, b: Approximation) -> list[str]:
    bad = []
    if b.depth != a.depth + 1:
        bad.append(f"(a) depth {b.depth} != {a.depth} + 1")
        return bad
    for s in _words(a.depth):
        for i in "01":
            t = s + i
            if t not in b.phi:
                bad.append(f"(b) phi missing at {t!r}")
            elif not (len(b.phi[t]) > len(a.phi[s]) and b.phi[t][: len(a.phi[s])] == a.phi[s]):
                bad.append(f"(b) phi({t!r}) does not strictly extend phi({s!r})")
    for n in range(a.depth):
        for s in _words(a.depth - (n + 1)):
            for i in "01":
                t = s + i
                old = a.psi[n][s]
                new = b.psi.get(n, {}).get(t)
                if new is None:
                    bad.append(f"(c) psi[{n}] missing at {t!r}")
                elif not (len(new) > len(old) and new[: len(old)] == old):
                    bad.append(f"(c) psi[{n}]({t!r}) does not strictly extend psi[{n}]({s!r})")
    n = a.depth
    if n not in b.psi or "" not in b.psi[n]:
        bad.append(f"(c) new level {n} missing")
    return bad


def check_one_step(a: Approximation, b: Approximation) -> bool:
    return not one_step_violations(a, b)


def compatibility_violations(gamma: Configuration, a: Approximation) -> list[str]:
    bad = []
    if gamma.depth != a.depth:
        return [f"(i) depth {gamma.depth} != {a.depth}"]
    for t, word in a.phi.items():
        point = gamma.phi.get(t)
        if point is None or point.prefix[: len(word)] != word:
            bad.append(f"(ii) phi({t!r}) not extended by the configuration")
    for n, table in a.psi.items():
        for t, word in table.items():
            point = gamma.psi.get(n, {}).get(t)
            if point is None or point.prefix[: len(word)] != word:
                bad.append(f"(iii) psi[{n}]({t!r}) not extended by the configuration")
    return bad


def check_compatible(gamma: Configuration, a: Approximation) -> bool:
    return not compatibility_violations(gamma, a)


def merge_configurations(
    g0: Configuration, g1: Configuration, d: BairePoint, oracle: "FusionOracle | None" = None
) -> Configuration:
    """Merge two equal-depth configurations into one a level deeper.

    The merged map sends t+i to the i-th configuration's value at t, and
    the new top level consists of the single edge token d.  When an
    oracle is supplied, d must certify exactly the pair of tip cells of
    the two configurations.
    """
    if g0.depth != g1.depth:
        raise PreconditionError(f"depth mismatch: {g0.depth} != {g1.depth}")
    n = g0.depth
    if oracle is not None:
        tip = canonical_s(n)
        box = oracle.edge_box(d.prefix)
        want = (oracle.cell_of(g0.phi[tip].prefix), oracle.cell_of(g1.phi[tip].prefix))
        if (box.left, box.right) != want:
            raise PreconditionError("edge token does not certify the configuration tips")
    gammas = (g0, g1)
    phi = {}
    for t in _words(n):
        for i in (0, 1):
            phi[t + str(i)] = gammas[i].phi[t]
    psi: dict[int, dict[str, BairePoint]] = {}
    for k in range(n):
        psi[k] = {}
        for t in _words(n - (k + 1)):
            for i in (0, 1):
                psi[k][t + str(i)] = gammas[i].psi[k][t]
    psi[n] = {"": d}
    return Configuration(n + 1, phi, psi)


def project_configuration(gamma: Configuration, i: int) -> Configuration:
    """Inverse of the merge on the i-th side: restrict along t -> t+i."""
    n = gamma.depth - 1
    tag = str(i)
    phi = {t: gamma.phi[t + tag] for t in _words(n)}
    psi = {k: {t: gamma.psi[k][t + tag] for t in _words(n - (k + 1))} for k in range(n)}
    return Configuration(n, phi, psi)


# -- oracles ---------------------------------------------------------------


def encode_pair(u: str, v: str) -> int:
    """One natural number carrying an ordered pair of binary words."""
    a = int("1" + u, 2)
    b = int("1" + v, 2)
    return (a + b) * (a + b + 1) // 2 + b


def decode_pair(code: int) -> tuple[str, str]:
    t = (math.isqrt(8 * code + 1) - 1) // 2
    b = code - t * (t + 1) // 2
    a = t - b
    if a <= 0 or b <= 0:
        raise PreconditionError(f"not a pair code: {code}")
    return format(a, "b")[1:], format(b, "b")[1:]


@dataclass(frozen=True)
class EdgeBox:
    """An ordered cell pair certified inside the target digraph, with the
    positions at which the two sides are forced to differ."""

    left: Cell
    right: Cell
    witnesses: tuple[int, ...]


@dataclass
class ExtendStep:
    approximation: Approximation
    configuration: Configuration
    cost: int


class FusionOracle:
    """Interpretation and search capabilities backing the fusion engine.

    Subclasses fix a target system, a digraph presentation, and a
    decreasing open filtration; all answers must be deterministic given
    (input, budget).
    """

    name: str = "abstract"
    sys: SystemHandle

    def cell_of(self, prefix: NatWord) -> Cell:
        raise NotImplementedError

    def edge_box(self, prefix: NatWord) -> EdgeBox:
        raise NotImplementedError

    def extend(self, a: Approximation, budget: int) -> ExtendStep | None:
        raise NotImplementedError

    def r_test(self, n: int, ca: Cell, cb: Cell) -> Verdict:
        raise NotImplementedError

    def r_threshold(self, n: int) -> Fraction:
        """Stage-n openness threshold of this oracle's filtration."""
        return pow2(-n)


class CodedWordOracle(FusionOracle):
    """Shared machinery for oracles whose Baire words are 0/1 codings.

    phi values are the coded words of tree branches; psi tokens carry, one
    digit per stage, the pair code of the two coded continuations below
    the relevant dense word.
    """

    def coded(self, branch: str) -> str:
        raise NotImplementedError

    def phi_digits(self, branch: str) -> NatWord:
        return tuple(ord(c) - 48 for c in self.coded(branch))

    def psi_digits(self, k: int, tail: str) -> NatWord:
        head = (0,) * k
        codes = tuple(
            encode_pair(
                self.coded(canonical_s(k) + "0" + tail[:j]),
                self.coded(canonical_s(k) + "1" + tail[:j]),
            )
            for j in range(len(tail) + 1)
        )
        return head + codes

    def cell_of(self, prefix: NatWord) -> Cell:
        return SymbolicCell("".join("01"[d & 1] for d in prefix))

    def edge_box(self, prefix: NatWord) -> EdgeBox:
        informative = [d for d in prefix if d > 0]
        if not informative:
            raise PreconditionError("edge token carries no pair code")
        u, v = decode_pair(informative[-1])
        length = min(len(u), len(v))
        wits = tuple(i for i in range(length) if u[i] != v[i])
        if not wits:
            raise PreconditionError("edge token decodes to identical sides")
        return EdgeBox(SymbolicCell(u), SymbolicCell(v), wits)

    def continuation(self, a: Approximation, bit_for: Callable[[str], str]) -> Configuration:
        """A configuration compatible with `a`: every branch is continued
        one bit further, the bit chosen per branch word."""
        n = a.depth
        phi = {}
        for w in _words(n):
            ext = w + bit_for(w)
            phi[w] = BairePoint(self.phi_digits(ext), (self.name, "branch", ext))
        psi: dict[int, dict[str, BairePoint]] = {}
        for k in range(n):
            psi[k] = {}
            for t in _words(n - (k + 1)):
                left = canonical_s(k) + "0" + t
                right = canonical_s(k) + "1" + t
                code = encode_pair(self.coded(left + bit_for(left)), self.coded(right + bit_for(right)))
                psi[k][t] = BairePoint(a.psi[k][t] + (code,), (self.name, "edge", k, t))
        return Configuration(n, phi, psi)

    def approximation_at(self, depth: int) -> Approximation:
        phi = {w: self.phi_digits(w) for w in _words(depth)}
        psi = {
            k: {t: self.psi_digits(k, t) for t in _words(depth - (k + 1))}
            for k in range(depth)
        }
        return Approximation(depth, phi, psi)

    def extend(self, a: Approximation, budget: int) -> ExtendStep | None:
        cost = 1 << (a.depth + 1)
        if budget < cost:
            return None
        g0 = self.continuation(a, lambda w: "0")
        g1 = self.continuation(a, lambda w: "1")
        d = BairePoint(self.psi_digits(a.depth, ""), (self.name, "edge", a.depth, ""))
        gamma = merge_configurations(g0, g1, d, self)
        return ExtendStep(self.approximation_at(a.depth + 1), gamma, cost)


class ShiftLiYorkeOracle(CodedWordOracle):
    """Full shift; edges certify recurring forced differences, the
    filtration certifies forced agreement runs.

    The coding uses longer zero runs than the scrambled-scheme plan
    (pad length (m+2)^2) so that the cells of a depth-n approximation
    already force stage-n filtration membership at threshold 2^-n.
    """

    name = "shift-liyorke"

    def __init__(self) -> None:
        self.sys = make_shift()

    def coded(self, branch: str) -> str:
        parts = []
        for m in range(len(branch)):
            parts.append(branch[: m + 1])
            parts.append("0" * ((m + 2) * (m + 2)))
        parts.append(branch)
        return "".join(parts)

    def _p(self, m: int) -> int:
        return sum(j + 1 + (j + 2) * (j + 2) for j in range(m))

    def r_event_time(self, depth: int) -> int:
        """Post-data position of the last complete stage of depth-size words."""
        return self._p(depth - 1) + depth

    def r_test(self, n: int, ca: Cell, cb: Cell) -> Verdict:
        if n == 0:
            bound = dist_cells(self.sys, ca, cb)
            return Verdict.holds(((0, bound.upper),))
        m = self.r_event_time(n)
        bound = dist_cells(self.sys, orbit_cell(self.sys, ca, m), orbit_cell(self.sys, cb, m))
        if m >= n and bound.upper < pow2(-n):
            return Verdict.holds(((m, bound.upper),))
        return r_filtration_test(self.sys, ca, cb, n, m + n)


class E0ComplementOracle(CodedWordOracle):
    """Prefix-repetition coding: distinct branches differ in every later
    block, certifying membership in the complement of eventual equality.
    The filtration here is the full relation (threshold 2 at every stage)."""

    name = "e0c"

    def __init__(self) -> None:
        self.sys = make_shift()

    def coded(self, branch: str) -> str:
        parts = []
        for j in range(len(branch)):
            parts.append(branch[j])
            parts.append(branch[: j + 1])
        return "".join(parts)

    def r_threshold(self, n: int) -> Fraction:
        return Fraction(2)

    def r_test(self, n: int, ca: Cell, cb: Cell) -> Verdict:
        bound = dist_cells(self.sys, orbit_cell(self.sys, ca, n), orbit_cell(self.sys, cb, n))
        return Verdict.holds(((n, bound.upper),))


ORACLES: dict[str, Callable[[], FusionOracle]] = {
    "shift-liyorke": ShiftLiYorkeOracle,
    "e0c": E0ComplementOracle,
}


# -- the engine ------------------------------------------------------------


@dataclass
class Exhausted:
    budget: int
    completed_depth: int


@dataclass
class EdgeRecord:
    u: str
    v: str
    level: int
    tail: str
    code: int
    left_word: str
    right_word: str
    witnesses: tuple[int, ...]


@dataclass
class FusionResult:
    oracle: FusionOracle
    depth: int
    scheme: Scheme
    trace: list[Approximation]
    configurations: list[Configuration]
    pairs: dict[tuple[str, str], tuple[int, int, Fraction]]  # (u,v) -> (stage, m, bound)
    edges: list[EdgeRecord]

    def pair_r_event(self, u: str, v: str) -> tuple[int, int, Fraction]:
        key = (u, v) if u <= v else (v, u)
        return self.pairs[key]


def _check_configuration_coherence(oracle: FusionOracle, gamma: Configuration) -> None:
    for k in range(gamma.depth):
        sk = canonical_s(k)
        for t in _words(gamma.depth - (k + 1)):
            box = oracle.edge_box(gamma.psi[k][t].prefix)
            left = oracle.cell_of(gamma.phi[sk + "0" + t].prefix)
            right = oracle.cell_of(gamma.phi[sk + "1" + t].prefix)
            if (box.left, box.right) != (left, right):
                raise OracleViolation(
                    f"configuration incoherent at level {k}, tail {t!r}: "
                    "edge token does not match the branch cells"
                )


def _check_approximation_invariant(oracle: FusionOracle, a: Approximation) -> None:
    words = _words(a.depth)
    cells = {w: oracle.cell_of(a.phi[w]) for w in words}
    for i, s in enumerate(words):
        for t in words[i + 1 :]:
            verdict = oracle.r_test(a.depth, cells[s], cells[t])
            if not verdict.is_holds:
                raise OracleViolation(
                    f"stage-{a.depth} filtration fails on branch pair ({s!r}, {t!r})"
                )


def fuse(oracle: FusionOracle, depth: int, budget: int) -> FusionResult | Exhausted:
    """Grow a depth-`depth` chain from the trivial approximation and
    assemble the re-checkable certificate data, or report exhaustion."""
    if depth < 1:
        raise PreconditionError("depth must be at least 1")
    a = initial_approximation()
    trace = [a]
    gammas: list[Configuration] = []
    remaining = budget
    for step in range(depth):
        result = oracle.extend(a, remaining)
        if result is None:
            return Exhausted(budget, step)
        remaining -= result.cost
        b, gamma = result.approximation, result.configuration
        bad = one_step_violations(a, b)
        if bad:
            raise OracleViolation(f"one-step extension rejected: {bad[0]}")
        bad = compatibility_violations(gamma, b)
        if bad:
            raise OracleViolation(f"configuration incompatible: {bad[0]}")
        _check_configuration_coherence(oracle, gamma)
        _check_approximation_invariant(oracle, b)
        trace.append(b)
        gammas.append(gamma)
        a = b
    return FusionResult(
        oracle,
        depth,
        _assemble_scheme(oracle, trace),
        trace,
        gammas,
        _assemble_pairs(oracle, a),
        _assemble_edges(oracle, a),
    )


def _assemble_scheme(oracle: FusionOracle, trace: list[Approximation]) -> Scheme:
    cells: dict[str, Cell] = {}
    for a in trace:
        for w, prefix in a.phi.items():
            cells[w] = oracle.cell_of(prefix)
    return Scheme(trace[-1].depth, cells)


def _assemble_pairs(
    oracle: FusionOracle, a: Approximation
) -> dict[tuple[str, str], tuple[int, int, Fraction]]:
    """For each distinct branch pair: a filtration event at the level where
    the two branch words split, valid for the canonical 2^-n thresholds."""
    words = _words(a.depth)
    cells = {w: oracle.cell_of(a.phi[w]) for w in words}
    pairs = {}
    for i, u in enumerate(words):
        for v in words[i + 1 :]:
            stage = next(j for j in range(a.depth) if u[j] != v[j]) + 1
            verdict = oracle.r_test(stage, cells[u], cells[v])
            if not verdict.is_holds:
                raise OracleViolation(f"no stage-{stage} event for pair ({u!r}, {v!r})")
            m, bound = verdict.events[0]
            pairs[(u, v)] = (stage, m, bound)
    return pairs


def _assemble_edges(oracle: FusionOracle, a: Approximation) -> list[EdgeRecord]:
    records = []
    for u, v in g0_edges_at_depth(a.depth):
        level = next(j for j in range(len(u)) if u[j] != v[j])
        tail = u[level + 1 :]
        token = a.psi[level][tail]
        box = oracle.edge_box(token)
        cu, cv = oracle.cell_of(a.phi[u]), oracle.cell_of(a.phi[v])
        if (box.left, box.right) != (cu, cv):
            raise OracleViolation(f"edge box for ({u!r}, {v!r}) does not match the branch cells")
        records.append(
            EdgeRecord(u, v, level, tail, token[-1], box.left.word, box.right.word, box.witnesses)
        )
    records.sort(key=lambda e: (e.u, e.v))
    return records


# -- splitting stages (Mycielski-style) -------------------------------------


class RefinerFamily:
    """An indexed family of dense-open refiners over cylinder levels.

    Refiner k strictly extends every word of a level so that all cross
    pairs land in the k-th dense open set; `witness` locates the
    membership evidence for one pair and `check` re-verifies it.
    """

    name: str = "abstract"

    def refine(self, k: int, labels: list[str], words: dict[str, str]) -> dict[str, str]:
        raise NotImplementedError

    def witness(self, k: int, u_word: str, v_word: str) -> int:
        raise NotImplementedError

    def check(self, k: int, u_word: str, v_word: str, witness: int) -> bool:
        raise NotImplementedError

    def coded_len(self, d: int) -> int:
        raise NotImplementedError


class E0Refiners(RefinerFamily):
    """Dense open sets D_k = "the two sequences differ at a position >= k";
    their intersection is the complement of eventual equality.  The
    refiner appends the whole branch label (a prefix-repetition block), so
    a branch-word difference at j recurs in every later block."""

    name = "e0"

    def refine(self, k, labels, words):
        return {w: words[w] + w for w in labels}

    def witness(self, k, u_word, v_word):
        length = min(len(u_word), len(v_word))
        for q in range(k, length):
            if u_word[q] != v_word[q]:
                return q
        raise PreconditionError(f"no difference at or after {k}")

    def check(self, k, u_word, v_word, witness):
        return (
            witness >= k
            and witness < min(len(u_word), len(v_word))
            and u_word[witness] != v_word[witness]
        )

    def coded_len(self, d: int) -> int:
        return d + d * (d + 1) // 2

    def block_span(self, d: int) -> tuple[int, int]:
        """Start and end positions of the depth-d repetition block."""
        start = self.coded_len(d - 1) + 1
        return start, start + d


class EqualityRefiners(RefinerFamily):
    """All dense open sets equal inequality; level disjointness is already
    the witness, so refinement only pads."""

    name = "eq"

    def refine(self, k, labels, words):
        return {w: words[w] + "0" for w in labels}

    def witness(self, k, u_word, v_word):
        length = min(len(u_word), len(v_word))
        for q in range(length):
            if u_word[q] != v_word[q]:
                return q
        raise PreconditionError("identical words")

    def check(self, k, u_word, v_word, witness):
        return witness < min(len(u_word), len(v_word)) and u_word[witness] != v_word[witness]

    def coded_len(self, d: int) -> int:
        return 2 * d


REFINERS: dict[str, Callable[[], RefinerFamily]] = {
    "e0": E0Refiners,
    "eq": EqualityRefiners,
}


@dataclass
class MycielskiResult:
    family: RefinerFamily
    depth: int
    scheme: Scheme
    words: dict[str, str]  # every word of length <= depth -> its coded word

    def word(self, w: str) -> str:
        return self.words[w]

    def pair_witnesses(self, u: str, v: str, upto: int | None = None) -> list[tuple[int, int]]:
        """(k, position) for every scheduled k; positions re-verify via check."""
        wu, wv = self.words[u], self.words[v]
        return [(k, self.family.witness(k, wu, wv)) for k in range(upto if upto is not None else self.depth)]

    def branch_pairs(self):
        branches = self.scheme.branches()
        for i, u in enumerate(branches):
            for v in branches[i + 1 :]:
                yield u, v


def mycielski_fuse(family: RefinerFamily, depth: int) -> MycielskiResult:
    """Interleave binary splitting with refiner passes.

    Refiner k runs right after the (k+1)-th split; dense open sets are
    inherited by extension, so each pass needs to run only once.  Every
    refiner output is checked to strictly extend its input.
    """
    if depth < 1:
        raise PreconditionError("depth must be at least 1")
    labels = [""]
    words = {"": ""}
    record: dict[str, str] = {"": ""}
    for d in range(1, depth + 1):
        labels = [w + b for w in labels for b in "01"]
        words = {w: words[w[:-1]] + w[-1] for w in labels}
        for k in (d - 1,):
            extended = family.refine(k, labels, words)
            for w in labels:
                if not (len(extended[w]) > len(words[w]) and extended[w].startswith(words[w])):
                    raise OracleViolation(f"refiner {k} did not strictly extend {w!r}")
            words = extended
        lead = words[labels[0]]
        if any(len(words[w]) != len(lead) for w in labels):
            raise OracleViolation("refiner produced unequal word lengths")
        record.update(words)
    cells = {w: SymbolicCell(cw) for w, cw in record.items()}
    result = MycielskiResult(family, depth, Scheme(depth, cells), record)
    for u, v in ((labels[0], labels[1]),):  # spot-check the engine output
        if not cells_disjoint(cells[u], cells[v]):
            raise OracleViolation("sibling cells not disjoint after refinement")
    return result
