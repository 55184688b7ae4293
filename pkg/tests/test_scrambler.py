from fractions import Fraction

import pytest

from liyorke.core import PreconditionError
from liyorke.dyadic import pow2
from liyorke.relations import proximal_check, separation_check
from liyorke.scheme import cells_disjoint, validate_scheme
from liyorke.scrambler import (
    SHIFT_PLAN,
    TENT_PLAN,
    ScrambleParams,
    epsilon_scramble_report,
    shift_scramble,
    tent_scramble,
    transversal_clique_pipeline,
)
from liyorke.fusion import E0Refiners, ShiftLiYorkeOracle, fuse, mycielski_fuse
from liyorke.systems import dist_cells, make_sft, make_shift, make_tent, orbit_cell

SHIFT = make_shift()
TENT = make_tent()
ONE = Fraction(1)


def test_plan_positions_frozen():
    assert [SHIFT_PLAN.p(m) for m in range(11)] == [0, 2, 8, 20, 40, 70, 112, 168, 240, 330, 440]
    assert [SHIFT_PLAN.r(m) for m in range(5)] == [1, 4, 11, 24, 45]
    assert [TENT_PLAN.p(m) for m in range(8)] == [0, 3, 10, 23, 44, 75, 118, 175]
    assert SHIFT_PLAN.max_stage(440) == 10
    assert SHIFT_PLAN.max_stage(439) == 9


def test_depth_one_events():
    build = shift_scramble(1, horizon=SHIFT_PLAN.p(2))
    prox, sep = build.pair_events("0", "1")
    assert sep[0] == (0, ONE)  # distance exactly 1 at time 0
    assert prox[0] == (1, Fraction(1, 2))  # 2^-L(0) right after the data
    assert [m for m, _ in sep] == [0, 2, 8]


def test_depth_rejected():
    with pytest.raises(PreconditionError):
        shift_scramble(0)


def test_scheme_valid_and_branches_disjoint():
    build = shift_scramble(4, horizon=SHIFT_PLAN.p(5))
    assert validate_scheme(build.scheme, SHIFT).ok
    branches = build.scheme.branches()
    for i, u in enumerate(branches):
        for v in branches[i + 1 :]:
            assert cells_disjoint(build.scheme.cell(u), build.scheme.cell(v))


def test_events_match_relations_module():
    # the fast event generator and the generic three-valued checks agree
    build = shift_scramble(3, horizon=SHIFT_PLAN.p(5))
    for u, v in [("000", "001"), ("010", "110"), ("011", "100")]:
        cu, cv = build.scheme.cell(u), build.scheme.cell(v)
        prox, sep = build.pair_events(u, v)
        verdict = separation_check(SHIFT, cu, cv, ONE, build.horizon)
        assert list(verdict.events) == sep
        for m, bound in prox:
            d = dist_cells(SHIFT, orbit_cell(SHIFT, cu, m), orbit_cell(SHIFT, cv, m))
            assert d.upper == bound
        exact = proximal_check(SHIFT, cu, cv, pow2(-4), build.horizon)
        assert exact.is_holds


def test_event_completeness_all_stages():
    build = shift_scramble(4, horizon=SHIFT_PLAN.p(6))
    for u, v in [("0000", "0001"), ("0100", "1100")]:
        k = next(i for i in range(4) if u[i] != v[i])
        _, sep = build.pair_events(u, v)
        times = {m for m, _ in sep}
        for m in range(k, build.pad_to + 1):
            expected = SHIFT_PLAN.p(m) + k
            if expected <= build.horizon:
                assert expected in times


def test_proximal_bounds_decay_from_split_stage():
    build = shift_scramble(4, horizon=SHIFT_PLAN.p(7))
    prox, _ = build.pair_events("0010", "0011")
    k = 3
    for stage, (m, bound) in enumerate(prox):
        assert m == SHIFT_PLAN.r(stage)
        assert bound <= pow2(-SHIFT_PLAN.pad_len(stage))
    tail = [b for m, b in prox if m >= SHIFT_PLAN.r(k)]
    assert all(tail[i + 1] < tail[i] for i in range(len(tail) - 1))


def test_sft_scramble_legal_and_illegal():
    ok = make_sft(("1111111111",), "long-run")
    build = shift_scramble(3, horizon=SHIFT_PLAN.p(4), sys=ok)
    assert validate_scheme(build.scheme, ok).ok
    golden = make_sft(("11",), "golden-mean")
    with pytest.raises(PreconditionError):
        shift_scramble(3, horizon=SHIFT_PLAN.p(4), sys=golden)


# -- tent pushforward --------------------------------------------------------


def test_tent_scheme_valid():
    for depth in (1, 2, 3, 4):
        build = tent_scramble(depth, horizon=TENT_PLAN.p(depth + 1))
        assert validate_scheme(build.scheme, TENT).ok


def test_tent_depth_one_proximal():
    build = tent_scramble(1, horizon=10)
    prox, sep = build.pair_events("0", "1")
    assert prox[0][0] == TENT_PLAN.r(0)
    assert prox[0][1] <= Fraction(1, 2)  # both orbit cells inside a 2^-L(0) interval
    assert sep and sep[0][1] > 0


def test_tent_all_pairs_have_positive_separation():
    build = tent_scramble(3, horizon=TENT_PLAN.p(4))
    for u, v in build.branch_pairs():
        _, sep = build.pair_events(u, v)
        assert sep, (u, v)
        assert all(b > 0 for _, b in sep)


def test_tent_events_reverify_exactly():
    build = tent_scramble(3, horizon=TENT_PLAN.p(4))
    for u, v in [("000", "001"), ("010", "101")]:
        cu, cv = build.scheme.cell(u), build.scheme.cell(v)
        prox, sep = build.pair_events(u, v)
        for m, bound in prox:
            d = dist_cells(TENT, orbit_cell(TENT, cu, m), orbit_cell(TENT, cv, m))
            assert d.upper == bound
        for m, bound in sep[:4]:
            d = dist_cells(TENT, orbit_cell(TENT, cu, m), orbit_cell(TENT, cv, m))
            assert d.lower == bound


# -- eps/2 report -------------------------------------------------------------


def test_epsilon_report_shift():
    build = shift_scramble(4, horizon=SHIFT_PLAN.p(6))
    params = ScrambleParams(ONE, ONE, 1, build.horizon)
    report = epsilon_scramble_report(build, params)
    assert report.all_separated
    assert all(r.best_sep == ONE for r in report.rows)
    assert report.schedule_n >= SHIFT_PLAN.pad_len(3)


def test_epsilon_report_monotone_in_horizon():
    small = shift_scramble(3, horizon=SHIFT_PLAN.p(4))
    large = shift_scramble(3, horizon=SHIFT_PLAN.p(6))
    p_small = ScrambleParams(ONE, ONE, 1, small.horizon)
    p_large = ScrambleParams(ONE, ONE, 1, large.horizon)
    rows_small = {(r.u, r.v): r for r in epsilon_scramble_report(small, p_small).rows}
    rows_large = {(r.u, r.v): r for r in epsilon_scramble_report(large, p_large).rows}
    for key, r in rows_small.items():
        assert rows_large[key].sep_count >= r.sep_count
        assert rows_large[key].schedule_n >= r.schedule_n


def test_epsilon_report_shortfalls_without_error():
    build = shift_scramble(2, horizon=SHIFT_PLAN.p(3))
    params = ScrambleParams(Fraction(4), ONE, 99, build.horizon)  # eps/2 = 2 is unreachable
    report = epsilon_scramble_report(build, params)
    assert not report.all_separated
    assert len(report.shortfalls()) == len(report.rows)


# -- composition ---------------------------------------------------------------


def test_pipeline_composition():
    hom = fuse(ShiftLiYorkeOracle(), 5, 1 << 7)
    myc = mycielski_fuse(E0Refiners(), 4)
    pipe = transversal_clique_pipeline(hom, myc)
    assert pipe.depth == 2  # largest d with coded length <= 5
    assert validate_scheme(pipe.scheme, SHIFT).ok
    assert len(pipe.pairs) == 6
    for (u, v), payload in pipe.pairs.items():
        stage, m, bound = payload["r"]
        assert bound < pow2(-stage)
        assert payload["wits"]
        # output cells are the homomorphism cells at the splitting words
        assert pipe.scheme.cell(u) == hom.scheme.cell(myc.word(u))


def test_pipeline_depth_incompatibility():
    hom = fuse(ShiftLiYorkeOracle(), 1, 1 << 3)
    myc = mycielski_fuse(E0Refiners(), 3)
    with pytest.raises(PreconditionError):
        transversal_clique_pipeline(hom, myc)


def test_pipeline_independent_of_construction_order():
    first = transversal_clique_pipeline(
        fuse(ShiftLiYorkeOracle(), 5, 1 << 7), mycielski_fuse(E0Refiners(), 3)
    )
    myc = mycielski_fuse(E0Refiners(), 3)  # reversed build order
    second = transversal_clique_pipeline(fuse(ShiftLiYorkeOracle(), 5, 1 << 7), myc)
    assert first.scheme.cells == second.scheme.cells
    assert first.pairs == second.pairs


def test_suffix_rank_fast_path_matches_public_ops():
    # dual route: the Gray-rank arithmetic behind tent events must agree
    # with itinerary_cell + dist_cells on arbitrary word pairs
    import random

    from liyorke.scrambler import _suffix_ranks
    from liyorke.systems import itinerary_cell

    rng = random.Random(42)
    for _ in range(50):
        n = rng.randrange(2, 12)
        u = "".join(rng.choice("01") for _ in range(n))
        v = "".join(rng.choice("01") for _ in range(n))
        ru, rv = _suffix_ranks(u), _suffix_ranks(v)
        for t in range(n):
            cu, cv = itinerary_cell(TENT, u[t:]), itinerary_cell(TENT, v[t:])
            d = dist_cells(TENT, cu, cv)
            delta = abs(ru[t] - rv[t])
            assert d.upper == Fraction(delta + 1, 1 << (n - t))
            assert d.lower == Fraction(max(0, delta - 1), 1 << (n - t))
