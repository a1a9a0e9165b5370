"""Reduction from triangle finding to oracle-refined matching.

An undirected graph G becomes a pattern and an input string whose match
answer is "G contains a triangle".  The single query E is answered by an
oracle that looks only at the two endpoints of its window and checks
whether they form an edge.

The input string lists every vertex id twice, delimiter-separated:

    # v1 v1 # v2 v2 ... # vn vn

A match picks three blocks i < j < k and certifies the three edges
{i,j}, {j,k}, {i,k} with three oracle windows: two short ones running
from the second copy of one id to the first copy of the next chosen id,
and one long outer window spanning first copy of i to second copy of k.
The two short refinements nest inside the outer one.

Two renderings are provided: one distinct byte per vertex (readable, at
most 94 vertices) and fixed-width binary ids over {0, 1, #} (scales to
any vertex count).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Tuple

from .oracles import Oracle
from .patterns import Cat, CharSet, Lit, Pattern, Refine, Star

EDGE_QUERY = "E"

DELIM = "#"

# vertex palette for the one-byte rendering: digits first so small
# graphs read naturally (#11#22#33), then the rest of printable ASCII
# minus the delimiter; 94 symbols total
_PALETTE = list("1234567890")
_PALETTE += [c for c in map(chr, range(33, 127)) if c not in _PALETTE and c != DELIM]
_PALETTE.append(" ")


@dataclass(frozen=True)
class UndirectedGraph:
    """Vertices 1..n and canonical (min, max) edge pairs, no self-loops."""

    n: int
    edges: FrozenSet[Tuple[int, int]]


def graph(n: int, edges) -> UndirectedGraph:
    if n < 0:
        raise ValueError("vertex count must be nonnegative")
    canon = set()
    for i, j in edges:
        if i == j:
            raise ValueError(f"self-loop at vertex {i}")
        if not (1 <= i <= n and 1 <= j <= n):
            raise ValueError(f"edge ({i}, {j}) outside 1..{n}")
        canon.add((min(i, j), max(i, j)))
    return UndirectedGraph(n, frozenset(canon))


def brute_force_triangle(g: UndirectedGraph) -> bool:
    """Cubic scan over vertex triples."""
    adj = [set() for _ in range(g.n + 1)]
    for i, j in g.edges:
        adj[i].add(j)
        adj[j].add(i)
    for i in range(1, g.n + 1):
        for j in range(i + 1, g.n + 1):
            if j not in adj[i]:
                continue
            for k in range(j + 1, g.n + 1):
                if k in adj[i] and k in adj[j]:
                    return True
    return False


class _EdgeOracle(Oracle):
    """Accept a window iff its endpoint vertex ids form an edge.

    Endpoint decoding is injected so the unary and binary renderings
    share the membership logic.  Windows whose endpoints do not decode
    to vertices (delimiters, fragments) are rejected, as is the empty
    window.
    """

    def __init__(self, g: UndirectedGraph, decode_ends):
        self.edges = g.edges
        self.decode_ends = decode_ends

    def evaluate(self, query: str, s: str) -> bool:
        ends = self.decode_ends(s)
        if ends is None:
            return False
        i, j = ends
        return (min(i, j), max(i, j)) in self.edges


def _sigma_star(sigma: CharSet) -> Pattern:
    return Star(Lit(sigma))


def _cat(parts: List[Pattern]) -> Pattern:
    out = parts[0]
    for p in parts[1:]:
        out = Cat(out, p)
    return out


def _reduction_pattern(sigma: CharSet, ident: Pattern) -> Pattern:
    """Sigma* # (id . edge . edge . id)&E Sigma*  where
    edge = (id Sigma* # id)&E."""
    delim = Lit(CharSet(frozenset(DELIM.encode())))

    def edge_window() -> Pattern:
        return Refine(_cat([ident, _sigma_star(sigma), delim, ident]), EDGE_QUERY)

    outer = Refine(_cat([ident, edge_window(), edge_window(), ident]), EDGE_QUERY)
    return _cat([_sigma_star(sigma), delim, outer, _sigma_star(sigma)])


def encode_instance(g: UndirectedGraph) -> Tuple[Pattern, str, Oracle]:
    """One distinct printable byte per vertex."""
    if g.n < 1:
        raise ValueError("need at least one vertex")
    if g.n > len(_PALETTE):
        raise ValueError(f"one-byte rendering supports at most {len(_PALETTE)} vertices")
    sym = {i + 1: _PALETTE[i] for i in range(g.n)}
    back = {c: v for v, c in sym.items()}
    sigma = CharSet(frozenset((DELIM + "".join(sym.values())).encode()))
    ident = Lit(CharSet(frozenset("".join(sym.values()).encode())))

    def decode_ends(s: str):
        if not s:
            return None
        first, last = back.get(s[0]), back.get(s[-1])
        if first is None or last is None:
            return None
        return first, last

    w = "".join(DELIM + sym[v] + sym[v] for v in range(1, g.n + 1))
    return _reduction_pattern(sigma, ident), w, _EdgeOracle(g, decode_ends)


def binary_width(n: int) -> int:
    return max(1, (n - 1).bit_length())


def encode_instance_binary(g: UndirectedGraph) -> Tuple[Pattern, str, Oracle]:
    """Fixed-width binary vertex ids over the alphabet {0, 1, #}."""
    if g.n < 1:
        raise ValueError("need at least one vertex")
    width = binary_width(g.n)
    sigma = CharSet(frozenset("01#".encode()))
    bit = Lit(CharSet(frozenset("01".encode())))
    ident = _cat([bit] * width)

    def render(v: int) -> str:
        return format(v - 1, "b").zfill(width)

    def decode_block(block: str):
        if len(block) != width or any(c not in "01" for c in block):
            return None
        v = int(block, 2) + 1
        return v if v <= g.n else None

    def decode_ends(s: str):
        if len(s) < width:
            return None
        first = decode_block(s[:width])
        last = decode_block(s[-width:])
        if first is None or last is None:
            return None
        return first, last

    w = "".join(DELIM + render(v) + render(v) for v in range(1, g.n + 1))
    return _reduction_pattern(sigma, ident), w, _EdgeOracle(g, decode_ends)


def read_edge_list(path: str) -> UndirectedGraph:
    """Graph file: one `i j` pair per line, 1-based; blank lines and
    `;` comments skipped; n is the largest endpoint mentioned.  A line
    `n K` pins the vertex count explicitly."""
    n = 0
    pairs = []
    with open(path, "r", encoding="ascii") as f:
        for ln, raw in enumerate(f, 1):
            line = raw.strip()
            if not line or line.startswith(";"):
                continue
            parts = line.split()
            if len(parts) == 2 and parts[0] == "n":
                n = max(n, int(parts[1]))
                continue
            if len(parts) != 2:
                raise ValueError(f"{path}:{ln}: expected 'i j' or 'n K'")
            i, j = int(parts[0]), int(parts[1])
            pairs.append((i, j))
            n = max(n, i, j)
    return graph(n, pairs)
