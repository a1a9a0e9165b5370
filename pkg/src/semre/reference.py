"""Independent reference evaluators used to cross-check the engines.

These take the slow, obviously-correct road: explicit configuration
search over the machine with the open-marker stack carried along.  They
share no code with the production evaluator, which is the point.
"""

from __future__ import annotations

from collections import deque
from typing import FrozenSet, Tuple

from .oracles import Oracle
from .snfa import CLOSE, OPEN, SNFA, EpsilonAnswers


def snfa_accepts(m: SNFA, w: bytes, oracle: Oracle, max_configs: int = 500_000) -> bool:
    """Does some feasible path spell out w from start to end?

    A configuration is (state, input position, stack of open markers with
    their positions).  Entering a state applies its mark: opens push,
    closes pop after the oracle accepts the window, blanks do nothing.
    Acceptance requires reaching the end state at the end of input with
    an empty stack.
    """

    def enter(state: int, pos: int, stack: Tuple) -> Tuple:
        """Returns the new stack, or None when the mark is infeasible."""
        lab = m.labels[state]
        if lab is None:
            return stack
        kind, q = lab
        if kind == OPEN:
            return stack + ((q, pos),)
        if not stack or stack[-1][0] != q:
            return None
        open_q, open_pos = stack[-1]
        if not oracle.evaluate(q, w[open_pos:pos].decode("latin-1")):
            return None
        return stack[:-1]

    start_stack = enter(m.start, 0, ())
    if start_stack is None:
        return False
    n = len(w)
    initial = (m.start, 0, start_stack)
    seen = {initial}
    queue = deque([initial])
    while queue:
        state, pos, stack = queue.popleft()
        if state == m.end and pos == n and not stack:
            return True
        moves = [(t, pos) for t in m.eps_succs[state]]
        if pos < n:
            byte = w[pos]
            moves.extend(
                (t, pos + 1) for cs, t in m.char_out[state] if cs.contains(byte)
            )
        for t, new_pos in moves:
            new_stack = enter(t, new_pos, stack)
            if new_stack is None:
                continue
            cfg = (t, new_pos, new_stack)
            if cfg not in seen:
                if len(seen) >= max_configs:
                    raise ValueError("configuration budget exceeded")
                seen.add(cfg)
                queue.append(cfg)
    return False


def eps_pairs_bruteforce(
    m: SNFA, eps_answers: EpsilonAnswers
) -> FrozenSet[Tuple[int, int]]:
    """The empty-window relation by direct configuration reachability.

    (s, s') is included when some silent path, starting from a silent
    successor of s, reaches s' with every opened query closed again and
    every closed query accepting the empty string.
    """

    def enter(state: int, stack: Tuple[str, ...]):
        lab = m.labels[state]
        if lab is None:
            return stack
        kind, q = lab
        if kind == OPEN:
            return stack + (q,)
        if not stack or stack[-1] != q or not eps_answers[q]:
            return None
        return stack[:-1]

    pairs = set()
    for s in range(m.n_states):
        seen = set()
        queue = deque()
        for s2 in m.eps_succs[s]:
            stack = enter(s2, ())
            if stack is None:
                continue
            cfg = (s2, stack)
            if cfg not in seen:
                seen.add(cfg)
                queue.append(cfg)
        while queue:
            state, stack = queue.popleft()
            if not stack:
                pairs.add((s, state))
            for t in m.eps_succs[state]:
                new_stack = enter(t, stack)
                if new_stack is None:
                    continue
                cfg = (t, new_stack)
                if cfg not in seen:
                    seen.add(cfg)
                    queue.append(cfg)
    return frozenset(pairs)
