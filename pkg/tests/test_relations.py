import random
from fractions import Fraction

import pytest

from liyorke.core import PreconditionError
from liyorke.dyadic import pow2
from liyorke.relations import (
    RFiltration,
    liyorke_check,
    proximal_check,
    r_filtration_test,
    separation_check,
)
from liyorke.scrambler import SHIFT_PLAN, shift_scramble
from liyorke.systems import IntervalCell, SymbolicCell, make_shift, make_tent

SHIFT = make_shift()
TENT = make_tent()
ONE = Fraction(1)


def cell(w):
    return SymbolicCell(w)


def test_proximal_identical_cells():
    v = proximal_check(SHIFT, cell("0"), cell("0"), ONE, 0)
    assert v.is_holds and v.events[0][0] == 0


def test_proximal_unknown_at_zero_horizon():
    v = proximal_check(SHIFT, cell("0"), cell("1"), Fraction(1, 2), 0)
    assert v.status == "unknown" and v.horizon == 0


def test_proximal_never_fails():
    for h in range(4):
        for wa in ("0", "1", "01"):
            for wb in ("0", "1", "10"):
                v = proximal_check(SHIFT, cell(wa), cell(wb), Fraction(1, 4), h)
                assert v.status in ("holds", "unknown")


def test_proximal_requires_positive_eps():
    with pytest.raises(PreconditionError):
        proximal_check(SHIFT, cell("0"), cell("1"), Fraction(0), 3)


def test_separation_examples():
    v = separation_check(SHIFT, cell("0"), cell("1"), ONE, 0)
    assert v.is_holds and v.events == ((0, ONE),)
    v = separation_check(SHIFT, cell("01"), cell("01"), Fraction(1, 8), 5)
    assert v.status == "unknown"
    v = separation_check(TENT, IntervalCell(Fraction(0), Fraction(1, 4)),
                         IntervalCell(Fraction(3, 4), Fraction(1)), Fraction(1, 2), 0)
    assert v.is_holds


def test_constant_sequences():
    a, b = cell("000000"), cell("111111")
    prox, sep = liyorke_check(SHIFT, a, b, Fraction(1, 2), ONE, 4)
    assert prox.status == "unknown"
    assert sep.is_holds and len(sep.events) == 5


def test_scrambler_pair_proximal_example():
    # depth-4 build at horizon p(4): the stage-3 zero run certifies eps = 2^-9
    build = shift_scramble(4, horizon=SHIFT_PLAN.p(4))
    a, b = build.scheme.cell("0110"), build.scheme.cell("1001")
    v = proximal_check(SHIFT, a, b, pow2(-9), SHIFT_PLAN.p(4))
    assert v.is_holds


def test_scrambler_pair_liyorke_example():
    # sibling pair at horizon p(6): three separation events of size 1
    build = shift_scramble(4, horizon=SHIFT_PLAN.p(6))
    a, b = build.scheme.cell("0000"), build.scheme.cell("0001")
    prox, sep = liyorke_check(SHIFT, a, b, pow2(-9), ONE, SHIFT_PLAN.p(6))
    assert prox.is_holds
    assert sep.is_holds and len(sep.events) >= 3
    assert all(bound == ONE for _, bound in sep.events)


def test_point_is_proximal_and_not_separated_from_itself():
    a = cell("0101")
    prox, sep = liyorke_check(SHIFT, a, a, ONE, ONE, 3)
    assert prox.is_holds
    assert sep.status == "unknown"


def test_filtration_examples():
    v = r_filtration_test(SHIFT, cell("01"), cell("01"), 0, 0)
    assert v.is_holds
    v = r_filtration_test(SHIFT, cell("0"), cell("1"), 3, 2)  # horizon below stage
    assert v.status == "unknown"


def test_filtration_decreasing_on_scrambler_pairs():
    build = shift_scramble(3, horizon=SHIFT_PLAN.p(7))
    horizon = SHIFT_PLAN.p(7)
    pairs = [("000", "001"), ("010", "101"), ("011", "100")]
    for u, v in pairs:
        a, b = build.scheme.cell(u), build.scheme.cell(v)
        held = None
        for n in range(7, -1, -1):
            verdict = r_filtration_test(SHIFT, a, b, n, horizon)
            if held is not None and held:
                assert verdict.is_holds  # holds at n+1 implies holds at n
            held = verdict.is_holds


def test_monotone_horizons():
    build = shift_scramble(2, horizon=SHIFT_PLAN.p(5))
    a, b = build.scheme.cell("00"), build.scheme.cell("11")
    small = separation_check(SHIFT, a, b, ONE, 10)
    large = separation_check(SHIFT, a, b, ONE, 40)
    assert set(small.events) <= set(large.events)
    p_small = proximal_check(SHIFT, a, b, pow2(-4), SHIFT_PLAN.r(2))
    p_large = proximal_check(SHIFT, a, b, pow2(-4), SHIFT_PLAN.r(3))
    assert p_small.is_holds and p_large.is_holds
    assert p_small.events == p_large.events  # same first witness


def test_results_order_independent():
    build = shift_scramble(3, horizon=SHIFT_PLAN.p(5))
    branches = build.scheme.branches()
    pairs = [(u, v) for i, u in enumerate(branches) for v in branches[i + 1 :]]

    def run(order):
        out = {}
        for u, v in order:
            out[(u, v)] = liyorke_check(
                SHIFT, build.scheme.cell(u), build.scheme.cell(v), pow2(-4), ONE, 50
            )
        return out

    shuffled = list(pairs)
    random.Random(3).shuffle(shuffled)
    assert run(pairs) == run(shuffled)


def test_rfiltration_wrapper():
    filt = RFiltration(SHIFT, 20)
    assert filt.stage(0, cell("0"), cell("0")).is_holds
