"""Labeled epsilon-NFA for oracle-refined patterns.

States carry one of three marks: blank, ``open(q)`` or ``close(q)``.  A
matched span between an open marker and its balancing close marker is the
window submitted to the oracle for query ``q``.  Every start-to-end path
of a machine built here has well-parenthesized marks.

Also home to the empty-window epsilon relation ``Eps``: pairs (s, s')
such that some epsilon-only path from an epsilon-successor of s reaches
s' while consuming no input and closing every query it opens, with each
closed query accepting the empty string.  The matcher consults Eps when
deciding which marker states are reachable between two input characters.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

from .parsing import charset_to_text
from .patterns import (
    Alt,
    Cat,
    CharSet,
    Empty,
    Epsilon,
    Lit,
    Pattern,
    Refine,
    Star,
    children,
)

# state label: None for blank, else (kind, query)
OPEN = "open"
CLOSE = "close"
Label = Optional[Tuple[str, str]]

EpsilonAnswers = Mapping[str, bool]


@dataclass(frozen=True)
class QueryContext:
    """Unmatched close and open markers along any start-to-state path."""

    unmatched_closes: Tuple[str, ...]
    unmatched_opens: Tuple[str, ...]


_EMPTY_CONTEXT = QueryContext((), ())


class SNFA:
    """A 5-tuple machine: states, transitions, labels, start, end.

    States are dense integer ids.  Character transitions carry CharSet
    guards; epsilon transitions carry nothing.  Instances are immutable
    after construction and safe to share between threads.
    """

    def __init__(
        self,
        labels: List[Label],
        char_edges: Iterable[Tuple[int, CharSet, int]],
        eps_edges: Iterable[Tuple[int, int]],
        start: int,
        end: int,
    ):
        self.labels = list(labels)
        self.char_edges = list(char_edges)
        self.eps_edges = list(eps_edges)
        self.start = start
        self.end = end
        n = len(self.labels)
        self.n_states = n
        self.eps_succs: List[List[int]] = [[] for _ in range(n)]
        self.eps_preds: List[List[int]] = [[] for _ in range(n)]
        for s, t in self.eps_edges:
            self.eps_succs[s].append(t)
            self.eps_preds[t].append(s)
        self.char_out: List[List[Tuple[CharSet, int]]] = [[] for _ in range(n)]
        self.char_in: List[List[Tuple[int, CharSet]]] = [[] for _ in range(n)]
        for s, cs, t in self.char_edges:
            self.char_out[s].append((cs, t))
            self.char_in[t].append((s, cs))
        self._contexts: Optional[List[Optional[QueryContext]]] = None

    def queries(self) -> Tuple[str, ...]:
        seen: List[str] = []
        for lab in self.labels:
            if lab is not None and lab[1] not in seen:
                seen.append(lab[1])
        return tuple(seen)

    # -- query contexts ------------------------------------------------

    def _propagate_contexts(self) -> Tuple[List[Optional[QueryContext]], bool]:
        """Breadth-first context propagation from the start state.

        Returns (contexts, consistent); consistent goes false on a
        mismatched close or on a state reached with two different
        contexts.
        """
        ctxs: List[Optional[QueryContext]] = [None] * self.n_states
        start_ctx = _extend_context(_EMPTY_CONTEXT, self.labels[self.start])
        if start_ctx is None:
            return ctxs, False
        ctxs[self.start] = start_ctx
        queue = [self.start]
        ok = True
        while queue:
            s = queue.pop()
            ctx = ctxs[s]
            succs = list(self.eps_succs[s])
            succs.extend(t for _, t in self.char_out[s])
            for t in succs:
                new = _extend_context(ctx, self.labels[t])
                if new is None:
                    ok = False
                    continue
                if ctxs[t] is None:
                    ctxs[t] = new
                    queue.append(t)
                elif ctxs[t] != new:
                    ok = False
        return ctxs, ok

    def contexts(self) -> List[Optional[QueryContext]]:
        if self._contexts is None:
            self._contexts, _ = self._propagate_contexts()
        return self._contexts


def _extend_context(ctx: QueryContext, lab: Label) -> Optional[QueryContext]:
    if lab is None:
        return ctx
    kind, q = lab
    if kind == OPEN:
        return QueryContext(ctx.unmatched_closes, ctx.unmatched_opens + (q,))
    if ctx.unmatched_opens:
        if ctx.unmatched_opens[-1] != q:
            return None  # close marker does not balance the innermost open
        return QueryContext(ctx.unmatched_closes, ctx.unmatched_opens[:-1])
    return QueryContext(ctx.unmatched_closes + (q,), ctx.unmatched_opens)


def query_context(m: SNFA, s: int) -> QueryContext:
    """The (unmatched closes, unmatched opens) of any start-to-s path."""
    ctx = m.contexts()[s]
    if ctx is None:
        raise ValueError(f"state {s} is unreachable from the start state")
    return ctx


def check_well_parenthesized(m: SNFA) -> bool:
    """True iff context propagation from start is consistent and the end
    state (when reachable) carries the empty context."""
    ctxs, ok = m._propagate_contexts()
    if not ok:
        return False
    end_ctx = ctxs[m.end]
    return end_ctx is None or end_ctx == _EMPTY_CONTEXT


def build_snfa(r: Pattern) -> SNFA:
    """Translate a core pattern into a machine, two fresh states per node.

    Construction is case-by-case on the constructors; sub-machines are
    embedded whole and stitched together with epsilon transitions.  The
    refinement case gives the new start/end states the open and close
    marks for its query.
    """
    labels: List[Label] = []
    eps: List[Tuple[int, int]] = []
    chars: List[Tuple[int, CharSet, int]] = []

    def new_state(lab: Label = None) -> int:
        labels.append(lab)
        return len(labels) - 1

    results: List[Tuple[int, int]] = []
    work: List[Tuple[Pattern, bool]] = [(r, False)]
    while work:
        node, expanded = work.pop()
        if not expanded:
            work.append((node, True))
            for k in reversed(children(node)):
                work.append((k, False))
            continue
        if isinstance(node, Empty):
            results.append((new_state(), new_state()))
        elif isinstance(node, Epsilon):
            s0, sf = new_state(), new_state()
            eps.append((s0, sf))
            results.append((s0, sf))
        elif isinstance(node, Lit):
            s0, sf = new_state(), new_state()
            chars.append((s0, node.chars, sf))
            results.append((s0, sf))
        elif isinstance(node, Alt):
            s20, s2f = results.pop()
            s10, s1f = results.pop()
            s0, sf = new_state(), new_state()
            eps.extend([(s0, s10), (s0, s20), (s1f, sf), (s2f, sf)])
            results.append((s0, sf))
        elif isinstance(node, Cat):
            s20, s2f = results.pop()
            s10, s1f = results.pop()
            s0, sf = new_state(), new_state()
            eps.extend([(s0, s10), (s1f, s20), (s2f, sf)])
            results.append((s0, sf))
        elif isinstance(node, Star):
            s10, s1f = results.pop()
            s0, sf = new_state(), new_state()
            eps.extend([(s0, s10), (s1f, s0), (s0, sf)])
            results.append((s0, sf))
        else:  # Refine
            s10, s1f = results.pop()
            s0 = new_state((OPEN, node.query))
            sf = new_state((CLOSE, node.query))
            eps.extend([(s0, s10), (s1f, sf)])
            results.append((s0, sf))
    start, end = results.pop()
    return SNFA(labels, chars, eps, start, end)


def normalize(m: SNFA) -> SNFA:
    """Make the start state blank and every character-transition target
    blank, inserting fresh blank states where needed.

    Returns m itself when nothing needs fixing.  Language and
    oracle-window semantics are unchanged: the inserted states carry no
    marks and add only epsilon hops.
    """
    needs_start = m.labels[m.start] is not None
    reroute = [i for i, (_, _, t) in enumerate(m.char_edges) if m.labels[t] is not None]
    if not needs_start and not reroute:
        return m
    labels = list(m.labels)
    eps = list(m.eps_edges)
    chars = list(m.char_edges)
    start = m.start
    if needs_start:
        labels.append(None)
        fresh = len(labels) - 1
        eps.append((fresh, m.start))
        start = fresh
    for i in reroute:
        s, cs, t = chars[i]
        labels.append(None)
        mid = len(labels) - 1
        chars[i] = (s, cs, mid)
        eps.append((mid, t))
    return SNFA(labels, chars, eps, start, m.end)


def compute_eps(m: SNFA, eps_answers: EpsilonAnswers) -> frozenset:
    """The empty-window reachability relation over states.

    One depth-first search per root state.  The search carries the
    multiset of currently open queries; a close marker is passable only
    when its query is open and accepts the empty string.  A pair
    (root, s') is recorded whenever s' is reached with every opened query
    closed again.  The visited set is per root and is not rolled back on
    backtracking, except that a pruned close marker stays unvisited so a
    later branch may pass it under a richer context.
    """
    pairs = []
    for root in range(m.n_states):
        visited = set()
        sigma: Dict[str, int] = {}
        depth = 0
        stack = [iter(m.eps_succs[root])]
        undo: List[Optional[Tuple[int, str]]] = [None]
        while stack:
            s2 = next(stack[-1], -1)
            if s2 < 0:
                stack.pop()
                u = undo.pop()
                if u is not None:
                    kind, q = u
                    if kind == 0:
                        sigma[q] -= 1
                        depth -= 1
                    else:
                        sigma[q] += 1
                        depth += 1
                continue
            if s2 in visited:
                continue
            lab = m.labels[s2]
            if lab is None:
                visited.add(s2)
                if depth == 0:
                    pairs.append((root, s2))
                stack.append(iter(m.eps_succs[s2]))
                undo.append(None)
            elif lab[0] == OPEN:
                visited.add(s2)
                q = lab[1]
                sigma[q] = sigma.get(q, 0) + 1
                depth += 1
                stack.append(iter(m.eps_succs[s2]))
                undo.append((0, q))
            else:
                q = lab[1]
                if sigma.get(q, 0) == 0 or not eps_answers[q]:
                    continue
                visited.add(s2)
                sigma[q] -= 1
                depth -= 1
                if depth == 0:
                    pairs.append((root, s2))
                stack.append(iter(m.eps_succs[s2]))
                undo.append((1, q))
    return frozenset(pairs)


def to_dot(m: SNFA, include_contexts: bool = True) -> str:
    """Graphviz rendering of the machine for debugging dumps."""
    ctxs = m.contexts() if include_contexts else [None] * m.n_states
    out = ["digraph snfa {", "  rankdir=LR;"]
    for s in range(m.n_states):
        lab = m.labels[s]
        text = f"s{s}" if lab is None else f"s{s} {lab[0]}({lab[1]})"
        ctx = ctxs[s]
        if ctx is not None and (ctx.unmatched_closes or ctx.unmatched_opens):
            text += f"\\nctx c={list(ctx.unmatched_closes)} o={list(ctx.unmatched_opens)}"
        shape = "doublecircle" if s == m.end else "circle"
        extra = ", style=bold" if s == m.start else ""
        out.append(f'  s{s} [label="{text}", shape={shape}{extra}];')
    for s, t in m.eps_edges:
        out.append(f"  s{s} -> s{t} [style=dashed];")
    for s, cs, t in m.char_edges:
        text = charset_to_text(cs).replace("\\", "\\\\").replace('"', '\\"')
        out.append(f'  s{s} -> s{t} [label="{text}"];')
    out.append("}")
    return "\n".join(out)
