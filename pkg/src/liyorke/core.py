"""Binary words, the canonical dense word family, and the level digraph.

Words are plain Python strings over the characters "0" and "1"; the empty
word is "".  Serialization everywhere is the ASCII bit string itself.

The dense family s_0, s_1, ... assigns to each index n a word of length
exactly n such that every finite word is extended by some s_n.  The
canonical choice here: s_n is the n-th word in length-lexicographic order
("", "0", "1", "00", "01", "10", "11", "000", ...) padded on the right
with zeros to length n.  This makes the family reproducible bit-exactly
and gives a computable density witness.

The digraph pairs up the two one-bit continuations of each s_n: its edges
at word depth d are the ordered pairs (s_n + "0" + w, s_n + "1" + w) with
n < d.  Edges are directed, 0-branch first; use `g0_related` for the
symmetric closure.
"""

from __future__ import annotations


class LiYorkeError(Exception):
    """Base class for errors raised by this package."""


class PreconditionError(LiYorkeError):
    """An operation was called outside its stated domain."""


_BITS = frozenset("01")


def check_word(w: str) -> str:
    if w and set(w) - _BITS:
        raise PreconditionError(f"not a binary word: {w!r}")
    return w


def is_prefix(u: str, v: str) -> bool:
    """u extends to v (u is an initial segment of v, possibly equal)."""
    return v.startswith(u)


def lex_word(index: int) -> str:
    """The index-th word in length-lex order; lex_word(0) == ""."""
    if index < 0:
        raise PreconditionError("negative word index")
    n = index + 1
    length = n.bit_length() - 1
    offset = n - (1 << length)
    if length == 0:
        return ""
    return format(offset, "b").zfill(length)


def lex_index(w: str) -> int:
    """Position of w in length-lex order; inverse of lex_word."""
    if w == "":
        return 0
    return (1 << len(w)) + int(w, 2) - 1


def canonical_s(n: int) -> str:
    """The n-th member of the canonical dense family; always length n."""
    if n < 0:
        raise PreconditionError("negative family index")
    t = lex_word(n)
    return t + "0" * (n - len(t))


def density_witness(s: str) -> int:
    """Least n with s a prefix of canonical_s(n).

    canonical_s(n) is the n-th length-lex word padded with zeros, so the
    witnesses of s are exactly the length-lex indices of the prefixes p
    of s whose removal leaves only zeros (p includes s itself), subject
    to the index being at least |s|.
    """
    check_word(s)
    best = lex_index(s)
    cut = len(s)
    while cut > 0 and s[cut - 1] == "0":
        cut -= 1
        n = lex_index(s[:cut])
        if len(s) <= n < best:
            best = n
    return best


def is_g0_edge(u: str, v: str) -> bool:
    """True iff (u, v) is a depth-|u| edge: u = s_n + "0" + w, v = s_n + "1" + w."""
    check_word(u)
    check_word(v)
    if len(u) != len(v):
        raise PreconditionError("edge endpoints must have equal length")
    for n in range(len(u)):
        if u[n] == "0" and v[n] == "1" and u[:n] == v[:n] == canonical_s(n) and u[n + 1 :] == v[n + 1 :]:
            return True
    return False


def g0_related(u: str, v: str) -> bool:
    """Symmetric closure of the edge relation."""
    return is_g0_edge(u, v) or is_g0_edge(v, u)


def g0_edges_at_depth(depth: int) -> list[tuple[str, str]]:
    """All edges between depth-length words, in (level, tail) order."""
    edges = []
    for n in range(depth):
        s = canonical_s(n)
        for tail_bits in range(1 << (depth - n - 1)):
            w = format(tail_bits, "b").zfill(depth - n - 1) if depth - n - 1 else ""
            edges.append((s + "0" + w, s + "1" + w))
    return edges


def g0_involution(n: int, x: str) -> str:
    """Swap the bit of x just after s_n, fixing everything else.

    Defined on words extending s_n by at least one bit; applying it twice
    is the identity, and (x, swap(x)) ordered by that bit is an edge pair.
    """
    check_word(x)
    s = canonical_s(n)
    if len(x) <= n or not x.startswith(s):
        raise PreconditionError(f"word {x!r} is not below s_{n} = {s!r}")
    flipped = "1" if x[n] == "0" else "0"
    return x[:n] + flipped + x[n + 1 :]


def edge_in_cylinder(s: str, depth: int) -> tuple[str, str]:
    """A depth-length edge pair whose endpoints both extend s.

    Constructive clopen analog of "no nonempty cylinder avoids the
    digraph": take n to be the density witness of s and pad with zeros.
    """
    check_word(s)
    n = density_witness(s)
    if depth < n + 1:
        raise PreconditionError(f"depth {depth} too small; need at least {n + 1} for {s!r}")
    pad = "0" * (depth - n - 1)
    sn = canonical_s(n)
    return sn + "0" + pad, sn + "1" + pad
