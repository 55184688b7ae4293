import random
from fractions import Fraction

import pytest

from liyorke.core import PreconditionError
from liyorke.dyadic import format_dyadic, is_dyadic, parse_dyadic, pow2
from liyorke.scheme import Scheme, identity_scheme, validate_scheme
from liyorke.systems import (
    IntervalCell,
    SymbolicCell,
    dist_cells,
    itinerary_cell,
    load_system_file,
    make_sft,
    make_shift,
    make_tent,
    orbit_cell,
    resolve_system,
    step_cell,
)

SHIFT = make_shift()
TENT = make_tent()


def F(p, q=1):
    return Fraction(p, q)


def test_dyadic_round_trip():
    for x in [F(0), F(1), F(1, 2), F(3, 4), F(5, 32), F(-7, 8)]:
        assert parse_dyadic(format_dyadic(x)) == x
    assert format_dyadic(F(1)) == "1/2^0"
    assert format_dyadic(F(1, 1 << 25)) == "1/2^25"
    with pytest.raises(ValueError):
        parse_dyadic("1/3")
    with pytest.raises(ValueError):
        format_dyadic(F(1, 3))


def test_shift_step_and_orbit():
    assert step_cell(SHIFT, SymbolicCell("011")) == SymbolicCell("11")
    assert orbit_cell(SHIFT, SymbolicCell("011"), 0) == SymbolicCell("011")
    assert orbit_cell(SHIFT, SymbolicCell("011"), 3) == SymbolicCell("")


def test_tent_step_examples():
    assert step_cell(TENT, IntervalCell(F(0), F(1, 2))) == IntervalCell(F(0), F(1))
    assert step_cell(TENT, IntervalCell(F(1, 4), F(3, 8))) == IntervalCell(F(1, 2), F(3, 4))
    # right half reverses orientation
    assert step_cell(TENT, IntervalCell(F(1, 2), F(3, 4))) == IntervalCell(F(1, 2), F(1))
    # straddling 1/2 takes the hull
    assert step_cell(TENT, IntervalCell(F(3, 8), F(5, 8))) == IntervalCell(F(3, 4), F(1))


def test_tent_orbit_example():
    assert orbit_cell(TENT, IntervalCell(F(0), F(1, 8)), 3) == IntervalCell(F(0), F(1))


def test_tent_step_sampling_soundness():
    rng = random.Random(7)
    cell = IntervalCell(F(3, 16), F(5, 8))
    image = step_cell(TENT, cell)
    for _ in range(1000):
        x = cell.lo + (cell.hi - cell.lo) * F(rng.randrange(0, 1 << 20), 1 << 20)
        fx = 1 - abs(2 * x - 1)
        assert image.lo <= fx <= image.hi


def test_dist_shift_examples():
    d = dist_cells(SHIFT, SymbolicCell("00"), SymbolicCell("01"))
    assert (d.lower, d.upper) == (F(1, 2), F(1, 2))
    d = dist_cells(SHIFT, SymbolicCell("0"), SymbolicCell("0"))
    assert (d.lower, d.upper) == (F(0), F(1, 2))
    d = dist_cells(SHIFT, SymbolicCell(""), SymbolicCell(""))
    assert (d.lower, d.upper) == (F(0), F(1))


def test_dist_tent_examples():
    d = dist_cells(TENT, IntervalCell(F(0), F(1, 4)), IntervalCell(F(1, 2), F(3, 4)))
    assert (d.lower, d.upper) == (F(1, 4), F(3, 4))
    d = dist_cells(TENT, IntervalCell(F(0), F(1, 2)), IntervalCell(F(1, 4), F(3, 4)))
    assert d.lower == F(0)


def test_dist_sampling_soundness():
    rng = random.Random(11)
    a = IntervalCell(F(1, 8), F(5, 16))
    b = IntervalCell(F(1, 4), F(7, 8))
    d = dist_cells(TENT, a, b)
    for _ in range(1000):
        x = a.lo + (a.hi - a.lo) * F(rng.randrange(0, 1 << 16), 1 << 16)
        y = b.lo + (b.hi - b.lo) * F(rng.randrange(0, 1 << 16), 1 << 16)
        assert d.lower <= abs(x - y) <= d.upper


def test_dist_shift_sampling_soundness():
    rng = random.Random(13)
    u, v = "0110", "01"
    d = dist_cells(SHIFT, SymbolicCell(u), SymbolicCell(v))
    for _ in range(1000):
        tail_x = "".join(rng.choice("01") for _ in range(30))
        tail_y = "".join(rng.choice("01") for _ in range(30))
        x, y = u + tail_x, v + tail_y
        n = min(len(x), len(y))
        diff = next((i for i in range(n) if x[i] != y[i]), None)
        if diff is not None:
            assert d.lower <= pow2(-diff) <= d.upper


def test_itinerary_examples():
    assert itinerary_cell(TENT, "") == IntervalCell(F(0), F(1))
    assert itinerary_cell(TENT, "0") == IntervalCell(F(0), F(1, 2))
    assert itinerary_cell(TENT, "1") == IntervalCell(F(1, 2), F(1))
    assert itinerary_cell(TENT, "10") == IntervalCell(F(3, 4), F(1))


def test_itinerary_nesting_and_shift():
    for bits in range(1 << 6):
        w = format(bits, "b").zfill(6)
        cell = itinerary_cell(TENT, w)
        assert cell.hi - cell.lo == pow2(-6)
        parent = itinerary_cell(TENT, w[:-1])
        assert parent.lo <= cell.lo and cell.hi <= parent.hi
        for k in (1, 2, 5):
            assert orbit_cell(TENT, cell, k) == itinerary_cell(TENT, w[k:])


def test_itinerary_requires_tent():
    with pytest.raises(PreconditionError):
        itinerary_cell(SHIFT, "0")


def test_tent_arithmetic_stays_dyadic():
    cell = itinerary_cell(TENT, "1011001")
    for m in range(10):
        c = orbit_cell(TENT, cell, m)
        assert is_dyadic(c.lo) and is_dyadic(c.hi)


def test_sft_construction_and_legality():
    sft = make_sft(("11",), "golden-mean")
    assert step_cell(sft, SymbolicCell("0101")) == SymbolicCell("101")
    with pytest.raises(PreconditionError):
        step_cell(sft, SymbolicCell("0110"))
    with pytest.raises(PreconditionError):
        make_sft(("0", "11"))  # dies out: only 1s allowed but 11 forbidden


def test_system_file_round_trip(tmp_path):
    path = tmp_path / "sys.txt"
    path.write_text("kind = sft\nname = golden\nforbidden = 11\n")
    sft = load_system_file(path)
    assert sft.kind == "sft" and sft.forbidden == ("11",)
    assert resolve_system(f"sft:{path}") == sft
    assert resolve_system("shift").kind == "full-shift"
    assert resolve_system("tent").kind == "tent"
    with pytest.raises(PreconditionError):
        resolve_system("logistic")


def test_identity_scheme_valid():
    report = validate_scheme(identity_scheme(4), SHIFT)
    assert report.ok


def test_scheme_disjointness_violation():
    sch = identity_scheme(1)
    sch.cells["0"] = SymbolicCell("1")
    sch.cells["1"] = SymbolicCell("1")
    report = validate_scheme(sch, SHIFT)
    assert not report.ok
    assert any(v.kind == "disjoint" and v.words == ("",) for v in report.violations)


def test_scheme_shrinking_violation():
    sch = identity_scheme(2)
    sch.cells["00"] = SymbolicCell("0")  # diameter 2^-1 > 2^-2
    report = validate_scheme(sch, SHIFT)
    assert any(v.kind == "shrinking" for v in report.violations)


def test_interval_scheme_endpoint_touch_counts_as_overlap():
    cells = {
        "": IntervalCell(F(0), F(1)),
        "0": IntervalCell(F(0), F(1, 2)),
        "1": IntervalCell(F(1, 2), F(1)),
    }
    report = validate_scheme(Scheme(1, cells), TENT)
    assert any(v.kind == "disjoint" for v in report.violations)
