"""Baseline evaluators that operationalize the language equations directly.

match_dp: top-down memoized dynamic programming over (subexpression,
window).  Star is evaluated as reachability over split positions, which
both terminates (each block is nonempty) and keeps the recursion depth
proportional to the pattern instead of the input.

match_naive: the same recursion with no memoization at all, usable only
on short inputs; it exists as an independent correctness reference.
"""

from __future__ import annotations

import sys
import time
from collections import deque
from typing import Dict, FrozenSet, Tuple, Union

from .engine import MatchMetrics
from .oracles import MeteringOracle, Oracle
from .patterns import (
    Alt,
    Cat,
    Empty,
    Epsilon,
    Lit,
    Pattern,
    Refine,
    Star,
    children,
    depth,
)

_NAIVE_MAX_LEN = 14


def _number_nodes(r: Pattern) -> Dict[int, int]:
    """Stable small ids per distinct node object, for memo keys."""
    ids: Dict[int, int] = {}
    stack = [r]
    while stack:
        node = stack.pop()
        if id(node) in ids:
            continue
        ids[id(node)] = len(ids)
        stack.extend(children(node))
    return ids


def _ensure_recursion_headroom(r: Pattern) -> None:
    # evaluation recurses once per tree level; leave generous margin
    need = 3 * depth(r) + 1000
    if sys.getrecursionlimit() < need:
        sys.setrecursionlimit(need)


def match_dp(
    r: Pattern, w: Union[str, bytes], oracle: Oracle
) -> Tuple[bool, MatchMetrics]:
    """Memoized evaluation of the defining equations over every window.

    The oracle is consulted for a refinement window only after the inner
    pattern has matched it, so structurally impossible windows cost no
    oracle calls.
    """
    if isinstance(w, str):
        w = w.encode("latin-1")
    t0 = time.perf_counter()
    meter = MeteringOracle(oracle)
    n = len(w)
    ids = _number_nodes(r)
    _ensure_recursion_headroom(r)
    memo: Dict[Tuple[int, int, int], bool] = {}
    reach: Dict[Tuple[int, int], FrozenSet[int]] = {}

    def ev(node: Pattern, i: int, j: int) -> bool:
        key = (ids[id(node)], i, j)
        hit = memo.get(key)
        if hit is not None:
            return hit
        if isinstance(node, Empty):
            out = False
        elif isinstance(node, Epsilon):
            out = i == j
        elif isinstance(node, Lit):
            out = j == i + 1 and node.chars.contains(w[i])
        elif isinstance(node, Alt):
            out = ev(node.left, i, j) or ev(node.right, i, j)
        elif isinstance(node, Cat):
            out = any(
                ev(node.left, i, k) and ev(node.right, k, j)
                for k in range(i, j + 1)
            )
        elif isinstance(node, Star):
            out = j in star_reach(node, i)
        else:  # Refine
            out = ev(node.inner, i, j) and meter.evaluate(
                node.query, w[i:j].decode("latin-1")
            )
        memo[key] = out
        return out

    def star_reach(node: Star, i: int) -> FrozenSet[int]:
        """Positions reachable from i by concatenating nonempty blocks of
        the star's body."""
        key = (ids[id(node)], i)
        hit = reach.get(key)
        if hit is not None:
            return hit
        seen = {i}
        queue = deque([i])
        while queue:
            k = queue.popleft()
            for k2 in range(k + 1, n + 1):
                if k2 not in seen and ev(node.inner, k, k2):
                    seen.add(k2)
                    queue.append(k2)
        out = frozenset(seen)
        reach[key] = out
        return out

    matched = ev(r, 0, n)
    rd = meter.readings
    return matched, MatchMetrics(
        oracle_calls=rd.calls,
        distinct_queries=rd.distinct,
        submitted_chars=rd.chars,
        wall_time=time.perf_counter() - t0,
        matched=matched,
    )


def match_naive(
    r: Pattern, w: Union[str, bytes], oracle: Oracle, max_len: int = _NAIVE_MAX_LEN
) -> bool:
    """Unmemoized recursion on the defining equations; exponential.

    Star splits off a nonempty first block, which is what makes the
    recursion well-founded.  Refuses inputs longer than max_len.
    """
    if isinstance(w, str):
        w = w.encode("latin-1")
    if len(w) > max_len:
        raise ValueError(f"input longer than {max_len}; naive evaluation refused")
    _ensure_recursion_headroom(r)

    def ev(node: Pattern, s: bytes) -> bool:
        if isinstance(node, Empty):
            return False
        if isinstance(node, Epsilon):
            return s == b""
        if isinstance(node, Lit):
            return len(s) == 1 and node.chars.contains(s[0])
        if isinstance(node, Alt):
            return ev(node.left, s) or ev(node.right, s)
        if isinstance(node, Cat):
            return any(
                ev(node.left, s[:k]) and ev(node.right, s[k:])
                for k in range(len(s) + 1)
            )
        if isinstance(node, Star):
            if s == b"":
                return True
            return any(
                ev(node.inner, s[:k]) and ev(node, s[k:])
                for k in range(1, len(s) + 1)
            )
        return ev(node.inner, s) and oracle.evaluate(node.query, s.decode("latin-1"))

    return ev(r, w)
