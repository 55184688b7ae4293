import pytest

from liyorke.core import (
    PreconditionError,
    canonical_s,
    density_witness,
    edge_in_cylinder,
    g0_edges_at_depth,
    g0_involution,
    g0_related,
    is_g0_edge,
    lex_index,
    lex_word,
)


def all_words(max_len):
    for length in range(max_len + 1):
        for bits in range(1 << length):
            yield format(bits, "b").zfill(length) if length else ""


def brute_lex_words(count):
    """Independent length-lex enumeration, by explicit generation."""
    out = []
    length = 0
    while len(out) < count:
        if length == 0:
            out.append("")
        else:
            out.extend(format(v, "b").zfill(length) for v in range(1 << length))
        length += 1
    return out[:count]


def test_lex_enumeration_against_brute_force():
    ref = brute_lex_words(600)
    for i, w in enumerate(ref):
        assert lex_word(i) == w
        assert lex_index(w) == i


def test_canonical_family_frozen_values():
    assert canonical_s(0) == ""
    assert canonical_s(1) == "0"
    assert canonical_s(2) == "10"
    assert canonical_s(3) == "000"
    assert canonical_s(5) == "10000"


def test_canonical_family_lengths():
    for n in range(600):
        assert len(canonical_s(n)) == n


def test_density_witness_examples():
    assert density_witness("") == 0
    assert density_witness("0") == 1
    assert density_witness("10") == 2


def test_density_witness_is_least():
    def scan(s):
        n = len(s)
        while not canonical_s(n).startswith(s):
            n += 1
        return n

    for s in all_words(8):
        n = density_witness(s)
        assert n == scan(s)
        assert canonical_s(n).startswith(s)


def test_g0_edge_examples():
    assert is_g0_edge("00", "01") is True
    assert is_g0_edge("0", "0") is False
    assert is_g0_edge("01", "00") is False
    assert g0_related("01", "00") is True


def test_g0_edge_requires_equal_lengths():
    with pytest.raises(PreconditionError):
        is_g0_edge("0", "01")


def test_g0_edge_stable_under_tail_extension():
    for u, v in g0_edges_at_depth(4):
        for tail in ("", "0", "1", "0110"):
            assert is_g0_edge(u + tail, v + tail)


def test_g0_edges_at_depth_complete():
    depth = 5
    edges = set(g0_edges_at_depth(depth))
    brute = {
        (u, v)
        for u in all_words(depth)
        for v in all_words(depth)
        if len(u) == len(v) == depth and is_g0_edge(u, v)
    }
    assert edges == brute


def test_involution_examples():
    assert g0_involution(1, "000") == "010"
    for x in ("000", "0101", "01110"):
        assert g0_involution(1, g0_involution(1, x)) == x


def test_involution_gives_edges():
    for n in range(4):
        s = canonical_s(n)
        x = s + "0" + "10"
        y = g0_involution(n, x)
        assert is_g0_edge(x, y)


def test_involution_precondition():
    with pytest.raises(PreconditionError):
        g0_involution(2, "00")  # too short / not below s_2 = "10"
    with pytest.raises(PreconditionError):
        g0_involution(2, "000")  # does not extend s_2


def test_edge_in_cylinder_examples():
    assert edge_in_cylinder("", 1) == ("0", "1")
    u, v = edge_in_cylinder("1", density_witness("1") + 1)
    assert u.startswith("1") and v.startswith("1")
    assert is_g0_edge(u, v)


def test_edge_in_cylinder_depth_too_small():
    with pytest.raises(PreconditionError):
        edge_in_cylinder("1", density_witness("1"))


def test_involution_bijection_on_truncations():
    for n in range(4):
        s = canonical_s(n)
        for depth in (n + 1, n + 3):
            words = [s + format(b, "b").zfill(depth - n) for b in range(1 << (depth - n))]
            mapped = [g0_involution(n, w) for w in words]
            assert sorted(mapped) == sorted(words)
            for u, v in g0_edges_at_depth(depth):
                if u[:n] == s == v[:n] and u[n] != v[n] and u[n + 1 :] == v[n + 1 :]:
                    assert g0_involution(n, u) == v


def test_edge_in_cylinder_all_short_words():
    for s in all_words(6):
        depth = density_witness(s) + 1
        u, v = edge_in_cylinder(s, depth)
        assert len(u) == len(v) == depth
        assert u.startswith(s) and v.startswith(s)
        assert is_g0_edge(u, v)
        # deeper versions work too
        u2, v2 = edge_in_cylinder(s, depth + 3)
        assert is_g0_edge(u2, v2)
