"""Command-line interface.

Exit codes: 0 success, 1 verification failure, 2 inconclusive or budget
exhausted, 3 invalid input (including unknown flags).
"""

from __future__ import annotations

import argparse
import sys as _sys
from fractions import Fraction

from .certificate import (
    CertificateError,
    InconclusiveError,
    emit,
    fusion_certificate,
    load_header_and_cells,
    mycielski_certificate,
    scramble_certificate,
    verify,
)
from .core import LiYorkeError, PreconditionError, canonical_s, edge_in_cylinder
from .dyadic import format_dyadic, parse_dyadic, pow2
from .fusion import ORACLES, REFINERS, Exhausted, fuse, mycielski_fuse
from .scrambler import (
    SHIFT_PLAN,
    TENT_PLAN,
    BlockPlan,
    ScrambleBuild,
    ScrambleParams,
    shift_scramble,
    tent_scramble,
)
from .systems import (
    IntervalCell,
    SymbolicCell,
    itinerary_cell,
    orbit_cell,
    resolve_system,
)

EXIT_OK = 0
EXIT_VERIFY_FAIL = 1
EXIT_INCONCLUSIVE = 2
EXIT_INVALID = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # unknown flags and bad values land here
        raise _UsageError(message)


def build_parser() -> _Parser:
    parser = _Parser(prog="liyorke", description="Scrambled Cantor schemes with verifiable certificates")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("scramble", help="build a scrambled stage and emit its certificate")
    p.add_argument("--system", required=True, help="shift, tent, or sft:<path>")
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--horizon", type=int, required=True)
    p.add_argument("--eps", help="proximal threshold, p/2^q")
    p.add_argument("--delta", help="separation threshold, p/2^q")
    p.add_argument("--k", type=int, help="separation events required per pair")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_scramble)

    p = sub.add_parser("verify", help="re-derive every claim of a certificate")
    p.add_argument("path")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("g0", help="inspect the dense family and its digraph")
    p.add_argument("--show", type=int, help="print the n-th dense word")
    p.add_argument("--edge-in", help="print an edge inside the cylinder of this word")
    p.add_argument("--depth", type=int, help="edge depth for --edge-in")
    p.set_defaults(func=cmd_g0)

    p = sub.add_parser("mycielski", help="build a splitting stage and emit its certificate")
    p.add_argument("--relation", choices=sorted(REFINERS), default="e0")
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_mycielski)

    p = sub.add_parser("fuse", help="run the fusion engine against an oracle")
    p.add_argument("--oracle", choices=sorted(ORACLES), required=True)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--budget", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_fuse)

    p = sub.add_parser("orbit", help="print the exact orbit of a cell")
    p.add_argument("--system", required=True)
    p.add_argument("--cell", required=True, help="a word; for tent, lo:hi dyadics or itin:<word>")
    p.add_argument("--steps", type=int, required=True)
    p.set_defaults(func=cmd_orbit)

    p = sub.add_parser("report", help="eps/2 report for a scramble certificate: CSV plus figures")
    p.add_argument("path")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--eps", default="1/2^0", help="scramble threshold eps, p/2^q")
    p.set_defaults(func=cmd_report)
    return parser


def _default_shift_k(plan: BlockPlan, depth: int, horizon: int, pad_to: int) -> int:
    worst = depth - 1
    count = sum(1 for m in range(worst, pad_to + 1) if plan.p(m) + worst <= horizon)
    return max(1, count)


def _build_scramble(system: str, depth: int, horizon: int) -> ScrambleBuild:
    sys_handle = resolve_system(system)
    if sys_handle.kind == "tent":
        return tent_scramble(depth, TENT_PLAN, horizon)
    return shift_scramble(depth, SHIFT_PLAN, horizon, sys_handle)


def _default_params(build: ScrambleBuild, args) -> ScrambleParams:
    eps = parse_dyadic(args.eps) if args.eps else pow2(-((build.depth // 2 + 1) ** 2))
    if args.delta:
        delta = parse_dyadic(args.delta)
    elif build.sys.kind == "tent":
        leaf = build.coded[build.scheme.branches()[0]]
        delta = pow2(-len(leaf))
    else:
        delta = Fraction(1)
    if args.k is not None:
        k = args.k
    elif build.sys.kind == "tent":
        k = 1
    else:
        k = _default_shift_k(build.plan, build.depth, build.horizon, build.pad_to)
    return ScrambleParams(eps, delta, k, build.horizon)


def cmd_scramble(args) -> int:
    build = _build_scramble(args.system, args.depth, args.horizon)
    params = _default_params(build, args)
    cert = scramble_certificate(build, params)
    lines = emit(cert, args.out)
    print(
        f"scramble {args.system} depth {args.depth} horizon {build.horizon}: "
        f"{lines} records -> {args.out} "
        f"(eps {format_dyadic(params.eps)}, delta {format_dyadic(params.delta)}, k {params.k})"
    )
    return EXIT_OK


def cmd_verify(args) -> int:
    report = verify(args.path)
    print(report.render())
    if report.ok:
        print("verdict: pass")
        return EXIT_OK
    first = report.first_failure()
    print(f"verdict: FAIL ({first.name}: {first.detail})")
    return EXIT_VERIFY_FAIL


def cmd_g0(args) -> int:
    if (args.show is None) == (args.edge_in is None):
        raise _UsageError("g0 needs exactly one of --show or --edge-in")
    if args.show is not None:
        print(canonical_s(args.show))
        return EXIT_OK
    if args.depth is None:
        raise _UsageError("--edge-in requires --depth")
    u, v = edge_in_cylinder(args.edge_in, args.depth)
    print(f"{u} {v}")
    return EXIT_OK


def cmd_mycielski(args) -> int:
    family = REFINERS[args.relation]()
    result = mycielski_fuse(family, args.depth)
    cert = mycielski_certificate(result)
    lines = emit(cert, args.out)
    print(f"mycielski {args.relation} depth {args.depth}: {lines} records -> {args.out}")
    return EXIT_OK


def cmd_fuse(args) -> int:
    oracle = ORACLES[args.oracle]()
    budget = args.budget if args.budget is not None else 1 << (args.depth + 1)
    result = fuse(oracle, args.depth, budget)
    if isinstance(result, Exhausted):
        print(f"budget {budget} exhausted after depth {result.completed_depth} of {args.depth}")
        return EXIT_INCONCLUSIVE
    if args.out:
        cert = fusion_certificate(result, budget)
        lines = emit(cert, args.out)
        print(f"fuse {args.oracle} depth {args.depth}: {lines} records -> {args.out}")
    else:
        print(f"fuse {args.oracle} depth {args.depth}: {len(result.pairs)} pairs, {len(result.edges)} edges")
    return EXIT_OK


def _parse_cell(sys_handle, text: str):
    if sys_handle.is_sequence():
        return SymbolicCell(text)
    if text.startswith("itin:"):
        return itinerary_cell(sys_handle, text[len("itin:") :])
    parts = text.split(":")
    if len(parts) != 2:
        raise PreconditionError(f"bad tent cell spec {text!r}; want lo:hi or itin:<word>")
    return IntervalCell(parse_dyadic(parts[0]), parse_dyadic(parts[1]))


def _render_cell(cell) -> str:
    if isinstance(cell, SymbolicCell):
        return cell.word if cell.word else "(whole space)"
    return f"[{format_dyadic(cell.lo)}, {format_dyadic(cell.hi)}]"


def cmd_orbit(args) -> int:
    sys_handle = resolve_system(args.system)
    cell = _parse_cell(sys_handle, args.cell)
    for m in range(args.steps + 1):
        print(f"{m}\t{_render_cell(orbit_cell(sys_handle, cell, m))}")
    return EXIT_OK


def cmd_report(args) -> int:
    from .report import render_scramble_report

    header, cells = load_header_and_cells(args.path)
    construction = header.get("construction", "")
    if not construction.startswith("scramble:"):
        raise PreconditionError(f"report needs a scramble certificate, got {construction!r}")
    depth, horizon = header["depth"], header["horizon"]
    plan = BlockPlan(marker=header["params"]["marker"])
    if header["system"]["kind"] == "tent":
        build = tent_scramble(depth, plan, horizon)
    else:
        build = shift_scramble(depth, plan, horizon, resolve_system_header(header))
    for w, cell in cells.items():
        if build.scheme.cells[w] != cell:
            raise PreconditionError(f"certificate cell {w!r} does not match its construction")
    params = ScrambleParams(
        parse_dyadic(header["params"]["eps"]),
        parse_dyadic(header["params"]["delta"]),
        header["params"]["k"],
        horizon,
    )
    eps = parse_dyadic(args.eps)
    report, paths = render_scramble_report(build, ScrambleParams(eps, params.delta, params.k, horizon), args.out_dir)
    print(f"pairs: {len(report.rows)}")
    print(f"all pairs separated at eps/2 = {format_dyadic(eps / 2)}: {report.all_separated}")
    print(f"proximal schedule holds through stage index {report.schedule_n}")
    for p in paths:
        print(f"wrote {p}")
    return EXIT_OK if report.all_separated else EXIT_VERIFY_FAIL


def resolve_system_header(header: dict):
    rec = header["system"]
    if rec["kind"] == "sft":
        from .systems import make_sft

        return make_sft(tuple(rec.get("forbidden", ())), rec.get("name", "sft"))
    return resolve_system("shift")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=_sys.stderr)
        print(parser.format_usage(), file=_sys.stderr, end="")
        return EXIT_INVALID
    except SystemExit as exc:  # --help
        return 0 if exc.code in (0, None) else EXIT_INVALID
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return EXIT_INVALID
    except InconclusiveError as exc:
        print(f"inconclusive: {exc}", file=_sys.stderr)
        return EXIT_INCONCLUSIVE
    except (CertificateError, PreconditionError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return EXIT_INVALID
    except LiYorkeError as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    _sys.exit(main())
