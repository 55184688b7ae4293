"""Certificate files: canonical serialization, emission, verification.

A certificate is a JSON-Lines text file: one canonical JSON record per
line (keys sorted, minimal separators, ASCII only), in fixed order:

    header, cells, psi tables, edges, pairs, end

All numerics are exact: dyadic bounds as "p/2^q" strings, big pair codes
as decimal strings.  Nothing in a certificate depends on time, locale, or
machine, so re-emission is byte-identical.

`verify` re-derives every claim from scratch using only the word, system,
and relations layers: scheme invariants, pair coverage, every event bound
(via orbit and distance computations over whole cells), and the
construction-specific side conditions.  Verification failures are report
entries naming the first counterexample, never exceptions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Iterator

from .core import LiYorkeError, g0_edges_at_depth
from .dyadic import format_dyadic, parse_dyadic, pow2
from .fusion import E0Refiners, FusionResult, MycielskiResult, REFINERS, decode_pair
from .scheme import Scheme, validate_scheme
from .scrambler import PipelineResult, ScrambleBuild, ScrambleParams
from .systems import (
    Cell,
    IntervalCell,
    SymbolicCell,
    SystemHandle,
    dist_cells,
    make_sft,
    make_shift,
    make_tent,
    orbit_cell,
)

FORMAT = "scrambled-cantor/1"


class CertificateError(LiYorkeError):
    """Malformed certificate file (parse-level problem)."""


class InconclusiveError(LiYorkeError):
    """A construction could not meet its thresholds within the horizon."""


def canonical_line(record: dict) -> str:
    return json.dumps(record, sort_keys=True, separators=(",", ":")) + "\n"


@dataclass
class Certificate:
    header: dict
    records: Callable[[], Iterator[dict]]  # yields every record, header and end included


def emit(cert: Certificate, path: str | Path) -> int:
    """Write the canonical bytes atomically; returns the number of lines written.

    The record stream re-checks the construction's thresholds as it goes,
    so nothing is left at `path` when that fails mid-stream.
    """
    target = Path(path)
    if str(target) == "/dev/null":  # no atomic rename possible on device files
        count = 0
        with open(target, "w", encoding="ascii", newline="\n") as fh:
            for record in cert.records():
                fh.write(canonical_line(record))
                count += 1
        return count
    partial = target.with_name(target.name + ".partial")
    count = 0
    try:
        with open(partial, "w", encoding="ascii", newline="\n") as fh:
            for record in cert.records():
                fh.write(canonical_line(record))
                count += 1
    except BaseException:
        partial.unlink(missing_ok=True)
        raise
    partial.replace(target)
    return count


def _system_header(sys: SystemHandle) -> dict:
    rec = {"kind": sys.kind, "name": sys.name}
    if sys.kind == "sft":
        rec["forbidden"] = list(sys.forbidden)
    return rec


def _system_from_header(rec: dict) -> SystemHandle:
    kind = rec.get("kind")
    if kind == "full-shift":
        return make_shift()
    if kind == "tent":
        return make_tent()
    if kind == "sft":
        return make_sft(tuple(rec.get("forbidden", ())), rec.get("name", "sft"))
    raise CertificateError(f"unknown system kind in header: {kind!r}")


def _cell_record(w: str, cell: Cell) -> dict:
    if isinstance(cell, SymbolicCell):
        return {"cell": {"w": w, "word": cell.word}}
    return {"cell": {"w": w, "lo": format_dyadic(cell.lo), "hi": format_dyadic(cell.hi)}}


def _cell_from_record(rec: dict) -> tuple[str, Cell]:
    if "word" in rec:
        return rec["w"], SymbolicCell(rec["word"])
    return rec["w"], IntervalCell(parse_dyadic(rec["lo"]), parse_dyadic(rec["hi"]))


def _scheme_records(scheme: Scheme) -> Iterator[dict]:
    for w in sorted(scheme.cells, key=lambda w: (len(w), w)):
        yield _cell_record(w, scheme.cells[w])


def _events_json(events) -> list:
    return [[m, format_dyadic(b)] for m, b in events]


# -- builders ---------------------------------------------------------------


def scramble_certificate(build: ScrambleBuild, params: ScrambleParams) -> Certificate:
    """Certificate for a scrambled stage; raises InconclusiveError when a
    pair cannot meet the thresholds within the horizon."""
    scheme = build.scheme
    npairs = (1 << scheme.depth) * ((1 << scheme.depth) - 1) // 2
    header = {
        "header": {
            "format": FORMAT,
            "construction": f"scramble:{build.sys.kind}",
            "system": _system_header(build.sys),
            "depth": scheme.depth,
            "horizon": build.horizon,
            "params": {
                "eps": format_dyadic(params.eps),
                "delta": format_dyadic(params.delta),
                "k": params.k,
                "marker": build.plan.marker,
                "pad_to": build.pad_to,
            },
            "counts": {"cells": len(scheme.cells), "pairs": npairs},
        }
    }

    def records() -> Iterator[dict]:
        yield header
        yield from _scheme_records(scheme)
        for u, v in build.branch_pairs():
            prox, sep = build.pair_events(u, v, max_sep=params.k + 2)
            if not prox or min(b for _, b in prox) > params.eps:
                raise InconclusiveError(
                    f"pair ({u},{v}): no proximal event at or below {format_dyadic(params.eps)} "
                    f"within horizon {build.horizon}"
                )
            good = [(m, b) for m, b in sep if b >= params.delta]
            if len(good) < params.k:
                raise InconclusiveError(
                    f"pair ({u},{v}): only {len(good)} separation event(s) at or above "
                    f"{format_dyadic(params.delta)} within horizon {build.horizon}, need {params.k}"
                )
            yield {"pair": {"u": u, "v": v, "prox": _events_json(prox), "sep": _events_json(good)}}
        yield {"end": {"cells": len(scheme.cells), "pairs": npairs}}

    return Certificate(header["header"], records)


def mycielski_certificate(result: MycielskiResult) -> Certificate:
    scheme = result.scheme
    npairs = (1 << scheme.depth) * ((1 << scheme.depth) - 1) // 2
    header = {
        "header": {
            "format": FORMAT,
            "construction": f"mycielski:{result.family.name}",
            "system": _system_header(make_shift()),
            "depth": scheme.depth,
            "horizon": 0,
            "params": {"relation": result.family.name},
            "counts": {"cells": len(scheme.cells), "pairs": npairs},
        }
    }

    def records() -> Iterator[dict]:
        yield header
        yield from _scheme_records(scheme)
        for u, v in result.branch_pairs():
            wits = [[k, q] for k, q in result.pair_witnesses(u, v)]
            yield {"pair": {"u": u, "v": v, "wits": wits}}
        yield {"end": {"cells": len(scheme.cells), "pairs": npairs}}

    return Certificate(header["header"], records)


def fusion_certificate(result: FusionResult, budget: int) -> Certificate:
    scheme = result.scheme
    final = result.trace[-1]
    npairs = (1 << scheme.depth) * ((1 << scheme.depth) - 1) // 2
    npsi = sum(len(t) for t in final.psi.values())
    header = {
        "header": {
            "format": FORMAT,
            "construction": f"fuse:{result.oracle.name}",
            "system": _system_header(result.oracle.sys),
            "depth": scheme.depth,
            "horizon": max(m for _, m, _ in result.pairs.values()),
            "params": {"oracle": result.oracle.name, "budget": budget},
            "counts": {
                "cells": len(scheme.cells),
                "pairs": npairs,
                "edges": len(result.edges),
                "psi": npsi,
            },
        }
    }

    def records() -> Iterator[dict]:
        yield header
        yield from _scheme_records(scheme)
        for level in sorted(final.psi):
            for t in sorted(final.psi[level]):
                digits = [str(d) for d in final.psi[level][t]]
                yield {"psi": {"level": level, "t": t, "digits": digits}}
        for e in result.edges:
            yield {
                "edge": {
                    "u": e.u,
                    "v": e.v,
                    "level": e.level,
                    "t": e.tail,
                    "code": str(e.code),
                    "left": e.left_word,
                    "right": e.right_word,
                    "wits": list(e.witnesses),
                }
            }
        for (u, v), (stage, m, bound) in sorted(result.pairs.items()):
            yield {"pair": {"u": u, "v": v, "stage": stage, "m": m, "bound": format_dyadic(bound)}}
        yield {"end": {"cells": len(scheme.cells), "pairs": npairs}}

    return Certificate(header["header"], records)


def pipeline_certificate(result: PipelineResult, hom_name: str, myc_name: str, myc_depth: int) -> Certificate:
    scheme = result.scheme
    npairs = (1 << scheme.depth) * ((1 << scheme.depth) - 1) // 2
    header = {
        "header": {
            "format": FORMAT,
            "construction": "pipeline",
            "system": _system_header(make_shift()),
            "depth": scheme.depth,
            "horizon": max(m for _, m, _ in (p["r"] for p in result.pairs.values())),
            "params": {"hom": hom_name, "myc": myc_name, "myc_depth": myc_depth},
            "counts": {"cells": len(scheme.cells), "pairs": npairs},
        }
    }

    def records() -> Iterator[dict]:
        yield header
        yield from _scheme_records(scheme)
        for (u, v), payload in sorted(result.pairs.items()):
            stage, m, bound = payload["r"]
            yield {
                "pair": {
                    "u": u,
                    "v": v,
                    "stage": stage,
                    "m": m,
                    "bound": format_dyadic(bound),
                    "wits": [[k, q] for k, q in payload["wits"]],
                }
            }
        yield {"end": {"cells": len(scheme.cells), "pairs": npairs}}

    return Certificate(header["header"], records)


# -- verification ------------------------------------------------------------


@dataclass
class CheckResult:
    name: str
    ok: bool
    detail: str = ""


@dataclass
class VerificationReport:
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def fail(self, name: str, detail: str) -> None:
        self.checks.append(CheckResult(name, False, detail))

    def ok_check(self, name: str, detail: str = "") -> None:
        self.checks.append(CheckResult(name, True, detail))

    def first_failure(self) -> CheckResult | None:
        return next((c for c in self.checks if not c.ok), None)

    def render(self) -> str:
        lines = []
        for c in self.checks:
            mark = "ok" if c.ok else "FAIL"
            lines.append(f"{c.name}: {mark}" + (f" ({c.detail})" if c.detail else ""))
        return "\n".join(lines)


def iter_records(path: str | Path) -> Iterator[tuple[dict, str]]:
    with open(path, "r", encoding="ascii") as fh:
        for lineno, raw in enumerate(fh, 1):
            try:
                rec = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise CertificateError(f"line {lineno}: not JSON: {exc}") from None
            if not isinstance(rec, dict) or len(rec) != 1:
                raise CertificateError(f"line {lineno}: not a single-key record")
            yield rec, raw


def load(path: str | Path) -> dict:
    """Materialize a (small) certificate for inspection and tests."""
    out = {"header": None, "cells": {}, "psi": [], "edges": [], "pairs": [], "end": None}
    for rec, _ in iter_records(path):
        key = next(iter(rec))
        if key == "header":
            out["header"] = rec["header"]
        elif key == "cell":
            w, cell = _cell_from_record(rec["cell"])
            out["cells"][w] = cell
        elif key == "psi":
            out["psi"].append(rec["psi"])
        elif key == "edge":
            out["edges"].append(rec["edge"])
        elif key == "pair":
            out["pairs"].append(rec["pair"])
        elif key == "end":
            out["end"] = rec["end"]
        else:
            raise CertificateError(f"unknown record kind {key!r}")
    return out


def load_header_and_cells(path: str | Path) -> tuple[dict, dict[str, Cell]]:
    """Stream just the header and scheme cells; pair records are skipped."""
    header = None
    cells: dict[str, Cell] = {}
    for rec, _ in iter_records(path):
        if "header" in rec:
            header = rec["header"]
        elif "cell" in rec:
            w, cell = _cell_from_record(rec["cell"])
            cells[w] = cell
        elif "pair" in rec:
            break
    if header is None:
        raise CertificateError("missing header record")
    return header, cells


def _pair_label(u: str, v: str) -> str:
    return f"({u},{v})"


class _Verifier:
    def __init__(self, path: str | Path):
        self.path = path
        self.report = VerificationReport()

    def run(self) -> VerificationReport:
        rep = self.report
        header = None
        cells: dict[str, Cell] = {}
        psi: dict[tuple[int, str], list[str]] = {}
        edges: list[dict] = []
        pair_count = 0
        pair_fail = None
        coverage_fail = None
        canonical_fail = None
        order_state = 0  # header < cells < psi < edges < pairs < end
        order_fail = None
        last_pair = None
        expected_pairs = None
        end_seen = None
        sys = None
        depth = horizon = None
        params = {}
        construction = ""

        stage_rank = {"header": 0, "cell": 1, "psi": 2, "edge": 3, "pair": 4, "end": 5}

        lineno = 0
        for rec, raw in iter_records(self.path):
            lineno += 1
            key = next(iter(rec))
            if canonical_fail is None and canonical_line(rec) != raw:
                canonical_fail = f"non-canonical encoding in a {key} record"
            rank = stage_rank.get(key)
            if rank is None:
                raise CertificateError(f"unknown record kind {key!r}")
            if rank < order_state and order_fail is None:
                order_fail = f"{key} record out of order"
            order_state = max(order_state, rank)

            try:
                if key == "header":
                    header = rec["header"]
                    if header.get("format") != FORMAT:
                        raise CertificateError(f"unsupported format {header.get('format')!r}")
                    construction = header.get("construction", "")
                    depth = header.get("depth")
                    horizon = header.get("horizon")
                    params = header.get("params", {})
                    sys = _system_from_header(header.get("system", {}))
                elif key == "cell":
                    w, cell = _cell_from_record(rec["cell"])
                    cells[w] = cell
                elif key == "psi":
                    p = rec["psi"]
                    psi[(p["level"], p["t"])] = p["digits"]
                elif key == "edge":
                    edges.append(rec["edge"])
                elif key == "pair":
                    p = rec["pair"]
                    u, v = p["u"], p["v"]
                    if expected_pairs is None:
                        scheme = Scheme(depth, cells)
                        branches = scheme.branches()
                        expected_pairs = [
                            (a, b) for i, a in enumerate(branches) for b in branches[i + 1 :]
                        ]
                        self._check_scheme(sys, scheme, rep)
                    if coverage_fail is None:
                        if pair_count >= len(expected_pairs) or (u, v) != expected_pairs[pair_count]:
                            coverage_fail = f"pair {_pair_label(u, v)} unexpected at position {pair_count}"
                    if pair_fail is None:
                        pair_fail = self._check_pair(
                            construction, sys, cells, psi, depth, horizon, params, p
                        )
                    pair_count += 1
                    last_pair = (u, v)
                elif key == "end":
                    end_seen = rec["end"]
            except (KeyError, TypeError, ValueError) as exc:
                raise CertificateError(f"line {lineno}: malformed {key} record: {exc}") from None

        if header is None:
            raise CertificateError("missing header record")
        if expected_pairs is None and depth is not None:
            scheme = Scheme(depth, cells)
            expected_pairs = [
                (a, b)
                for i, a in enumerate(scheme.branches())
                for b in scheme.branches()[i + 1 :]
            ]
            self._check_scheme(sys, scheme, rep)

        if canonical_fail or order_fail:
            rep.fail("format", canonical_fail or order_fail)
        elif end_seen is None:
            rep.fail("format", "missing end record")
        elif end_seen.get("pairs") != pair_count or end_seen.get("cells") != len(cells):
            rep.fail("format", "end-record counts do not match the records present")
        else:
            rep.ok_check("format")

        if coverage_fail is None and expected_pairs is not None and pair_count != len(expected_pairs):
            coverage_fail = f"{pair_count} pair records, expected {len(expected_pairs)}"
        if coverage_fail:
            rep.fail("coverage", coverage_fail)
        else:
            rep.ok_check("coverage", f"{pair_count} pairs")

        if construction.startswith("fuse:"):
            edge_fail = self._check_edges(construction, cells, psi, edges, depth)
            if edge_fail:
                rep.fail("edges", edge_fail)
            else:
                rep.ok_check("edges", f"{len(edges)} edges")

        if pair_fail:
            rep.fail("events", pair_fail)
        else:
            rep.ok_check("events", f"last pair {last_pair}")
        return rep

    def _check_scheme(self, sys, scheme, rep) -> None:
        scheme_report = validate_scheme(scheme, sys)
        if scheme_report.ok:
            rep.ok_check("scheme", f"depth {scheme.depth}, {len(scheme.cells)} cells")
        else:
            rep.fail("scheme", scheme_report.summary())

    def _check_pair(self, construction, sys, cells, psi, depth, horizon, params, p) -> str | None:
        u, v = p["u"], p["v"]
        label = _pair_label(u, v)
        cu, cv = cells.get(u), cells.get(v)
        if cu is None or cv is None:
            return f"{label}: branch cell missing"
        if construction.startswith("scramble:"):
            eps = parse_dyadic(params["eps"])
            delta = parse_dyadic(params["delta"])
            need_k = params["k"]
            prox = p.get("prox", [])
            sep = p.get("sep", [])
            if not prox:
                return f"{label}: no proximal events"
            best = None
            for m, btext in prox:
                bound = parse_dyadic(btext)
                if m > horizon:
                    return f"{label}: proximal event at {m} beyond horizon {horizon}"
                actual = dist_cells(sys, orbit_cell(sys, cu, m), orbit_cell(sys, cv, m)).upper
                if actual > bound:
                    return f"{label}: proximal bound at {m} not reproducible"
                best = bound if best is None else min(best, bound)
            if best > eps:
                return f"{label}: best proximal bound above eps"
            good = 0
            for m, btext in sep:
                bound = parse_dyadic(btext)
                if m > horizon:
                    return f"{label}: separation event at {m} beyond horizon {horizon}"
                actual = dist_cells(sys, orbit_cell(sys, cu, m), orbit_cell(sys, cv, m)).lower
                if actual < bound:
                    return f"{label}: separation bound at {m} not reproducible"
                if bound >= delta:
                    good += 1
            if good < need_k:
                return f"{label}: {good} separation events >= delta, need {need_k}"
            return None
        if construction.startswith("mycielski:"):
            wu, wv = cu.word, cv.word
            family = REFINERS[params.get("relation", "e0")]()
            wits = p.get("wits", [])
            seen = {k for k, _ in wits}
            if seen != set(range(depth)):
                return f"{label}: witnesses do not cover every scheduled index"
            for k, q in wits:
                if not family.check(k, wu, wv, q):
                    return f"{label}: witness {q} fails the index-{k} membership test"
            return None
        if construction.startswith("fuse:") or construction == "pipeline":
            stage, m = p["stage"], p["m"]
            bound = parse_dyadic(p["bound"])
            if construction == "pipeline":
                # branch labels route through the splitting stage's coding
                wu, wv = family_closed_word(u), family_closed_word(v)
            else:
                wu, wv = u, v
            split = next(j for j in range(len(wu)) if wu[j] != wv[j]) + 1
            if stage != split:
                return f"{label}: stage {stage} is not the split level {split}"
            if m < stage:
                return f"{label}: event time {m} below stage {stage}"
            threshold = Fraction(2) if construction == "fuse:e0c" else pow2(-stage)
            if bound >= threshold:
                return f"{label}: bound not below the stage-{stage} threshold"
            actual = dist_cells(sys, orbit_cell(sys, cu, m), orbit_cell(sys, cv, m)).upper
            if actual > bound:
                return f"{label}: filtration bound at {m} not reproducible"
            if construction == "pipeline":
                family = E0Refiners()
                wits = p.get("wits", [])
                if {k for k, _ in wits} != set(range(len(u))):
                    return f"{label}: splitting witnesses incomplete"
                for k, q in wits:
                    if not family.check(k, wu, wv, q):
                        return f"{label}: splitting witness {q} fails at index {k}"
            return None
        return f"{label}: unknown construction {construction!r}"

    def _check_edges(self, construction, cells, psi, edges, depth) -> str | None:
        expected = g0_edges_at_depth(depth)
        by_pair = {(e["u"], e["v"]): e for e in edges}
        for u, v in expected:
            e = by_pair.get((u, v))
            if e is None:
                return f"edge ({u},{v}) missing"
            level, tail = e["level"], e["t"]
            digits = psi.get((level, tail))
            if digits is None:
                return f"edge ({u},{v}): psi entry ({level},{tail!r}) missing"
            if digits[-1] != e["code"]:
                return f"edge ({u},{v}): code does not match the psi table"
            left, right = decode_pair(int(e["code"]))
            if left != e["left"] or right != e["right"]:
                return f"edge ({u},{v}): code does not decode to the stated box"
            cu, cv = cells.get(u), cells.get(v)
            if not isinstance(cu, SymbolicCell) or cu.word != left or cv.word != right:
                return f"edge ({u},{v}): box does not match the branch cells"
            wits = e.get("wits", [])
            if not wits:
                return f"edge ({u},{v}): no difference witnesses"
            for q in wits:
                if q >= min(len(left), len(right)) or left[q] == right[q]:
                    return f"edge ({u},{v}): witness {q} is not a difference"
            if max(wits) < level:
                return f"edge ({u},{v}): no difference witness at or after level {level}"
        if len(edges) != len(expected):
            return f"{len(edges)} edge records, expected {len(expected)}"
        return None


def family_closed_word(w: str) -> str:
    """Closed form of the prefix-repetition coding used by the e0 refiners."""
    parts = []
    for j in range(len(w)):
        parts.append(w[j])
        parts.append(w[: j + 1])
    return "".join(parts)


def verify(path: str | Path) -> VerificationReport:
    return _Verifier(path).run()
