"""Layered product of the machine with an input string.

For a machine with states S and an input of length n, the graph has
vertices S x {1,2,3} x {1..n+1}.  Within one index, the three layers form
a gadget summarizing everything the machine can do between two input
characters: layer 1 progressively closes open queries, layer 2 reopens
them, layer 3 performs the remaining silent moves.  Character transitions
connect layer 3 at index i to layer 1 at index i+1.  A close-marked
vertex lives on layer 1 and an open-marked vertex on layer 2; everything
else is blank.  Matching asks whether a feasible start-to-end path exists
where each balanced open..close span's text window is accepted by the
oracle.

Nothing is materialized: edges are computed on demand from the machine,
the empty-window relation Eps, and the input.  Repeated construction of
explicit graphs per line is exactly what this representation avoids.
Predecessor functions are primary (the evaluator consumes incoming
edges); successors exist for debugging dumps and the brute-force
reference evaluator.
"""

from __future__ import annotations

from typing import Dict, FrozenSet, Iterator, List, NamedTuple, Optional, Tuple

from .oracles import Oracle
from .snfa import CLOSE, OPEN, Label, SNFA


class QGVertex(NamedTuple):
    state: int
    layer: int
    index: int


class StructuralPathError(Exception):
    """A path whose markers are not well-parenthesized; feasibility is
    undefined for it, which is different from being false."""


class GadgetTables:
    """Per-(machine, Eps) adjacency tables, shared across input lines.

    marker_pre[t] lists the states s from which the marker state t is
    enterable between characters: either a direct silent edge s -> t, or
    Eps(s, s') followed by a silent edge s' -> t.  The same table serves
    layer 1 (t close-marked) and layer 2 (t open-marked).
    """

    def __init__(self, m: SNFA, eps: FrozenSet[Tuple[int, int]]):
        self.machine = m
        self.eps = eps
        n = m.n_states
        eps_pre: List[List[int]] = [[] for _ in range(n)]
        eps_img: List[List[int]] = [[] for _ in range(n)]
        for s, t in sorted(eps):
            eps_pre[t].append(s)
            eps_img[s].append(t)
        self.eps_pre = [tuple(x) for x in eps_pre]
        self.eps_img = [tuple(x) for x in eps_img]

        marker_pre: List[Tuple[int, ...]] = []
        for t in range(n):
            if m.labels[t] is None:
                marker_pre.append(())
                continue
            sources = set(m.eps_preds[t])
            for mid in m.eps_preds[t]:
                sources.update(eps_pre[mid])
            marker_pre.append(tuple(sorted(sources)))
        self.marker_pre = marker_pre

        marker_succ_close: List[Tuple[int, ...]] = []
        marker_succ_open: List[Tuple[int, ...]] = []
        for s in range(n):
            closes = set()
            opens = set()
            hops = list(m.eps_succs[s])
            for mid in eps_img[s]:
                hops.extend(m.eps_succs[mid])
            for t in hops:
                lab = m.labels[t]
                if lab is None:
                    continue
                (closes if lab[0] == CLOSE else opens).add(t)
            marker_succ_close.append(tuple(sorted(closes)))
            marker_succ_open.append(tuple(sorted(opens)))
        self.marker_succ_close = marker_succ_close
        self.marker_succ_open = marker_succ_open


class QueryGraph:
    """Immutable view tying tables to one input string."""

    def __init__(self, tables: GadgetTables, w: bytes):
        self.tables = tables
        self.machine = tables.machine
        self.w = w
        self.n = len(w)
        # (state, byte) -> sources with a matching character transition
        self._char_pre: Dict[Tuple[int, int], Tuple[int, ...]] = {}

    def char_preds(self, state: int, byte: int) -> Tuple[int, ...]:
        key = (state, byte)
        hit = self._char_pre.get(key)
        if hit is None:
            hit = tuple(
                src
                for src, cs in self.machine.char_in[state]
                if cs.contains(byte)
            )
            self._char_pre[key] = hit
        return hit


def qg_start(g: QueryGraph) -> QGVertex:
    return QGVertex(g.machine.start, 1, 1)


def qg_end(g: QueryGraph) -> QGVertex:
    return QGVertex(g.machine.end, 3, g.n + 1)


def qg_idx(g: QueryGraph, v: QGVertex) -> int:
    return v.index


def qg_label(g: QueryGraph, v: QGVertex) -> Label:
    lab = g.machine.labels[v.state]
    if lab is None:
        return None
    if v.layer == 1 and lab[0] == CLOSE:
        return lab
    if v.layer == 2 and lab[0] == OPEN:
        return lab
    return None


def qg_predecessors(g: QueryGraph, v: QGVertex) -> List[QGVertex]:
    t = g.tables
    s, layer, i = v
    out: List[QGVertex] = []
    if layer == 1:
        lab = g.machine.labels[s]
        if lab is not None and lab[0] == CLOSE:
            out.extend(QGVertex(p, 1, i) for p in t.marker_pre[s])
        if i >= 2:
            out.extend(QGVertex(p, 3, i - 1) for p in g.char_preds(s, g.w[i - 2]))
    elif layer == 2:
        out.append(QGVertex(s, 1, i))
        lab = g.machine.labels[s]
        if lab is not None and lab[0] == OPEN:
            out.extend(QGVertex(p, 2, i) for p in t.marker_pre[s])
    else:
        out.append(QGVertex(s, 2, i))
        out.extend(QGVertex(p, 2, i) for p in t.eps_pre[s])
    return out


def qg_successors(g: QueryGraph, v: QGVertex) -> List[QGVertex]:
    t = g.tables
    s, layer, i = v
    out: List[QGVertex] = []
    if layer == 1:
        out.extend(QGVertex(p, 1, i) for p in t.marker_succ_close[s])
        out.append(QGVertex(s, 2, i))
    elif layer == 2:
        out.extend(QGVertex(p, 2, i) for p in t.marker_succ_open[s])
        out.append(QGVertex(s, 3, i))
        out.extend(QGVertex(p, 3, i) for p in t.eps_img[s])
    else:
        if i <= g.n:
            byte = g.w[i - 1]
            for cs, dst in g.machine.char_out[s]:
                if cs.contains(byte):
                    out.append(QGVertex(dst, 1, i + 1))
    return out


def path_feasible(g: QueryGraph, path: List[QGVertex], oracle: Oracle) -> bool:
    """Check one path against the oracle.

    Every balanced open(q)@i .. close(q)@j span must have its window
    w_i..w_{j-1} accepted.  Marker mismatches or unbalanced spans raise
    StructuralPathError rather than answering false.
    """
    stack: List[Tuple[str, int]] = []
    ok = True
    for v in path:
        lab = qg_label(g, v)
        if lab is None:
            continue
        kind, q = lab
        if kind == OPEN:
            stack.append((q, v.index))
        else:
            if not stack or stack[-1][0] != q:
                raise StructuralPathError(f"unbalanced close({q}) at {v}")
            _, i = stack.pop()
            window = g.w[i - 1 : v.index - 1].decode("latin-1")
            if ok and not oracle.evaluate(q, window):
                ok = False
    if stack:
        raise StructuralPathError(f"dangling open markers: {stack}")
    return ok


def iter_paths(
    g: QueryGraph,
    source: QGVertex,
    target: QGVertex,
    limit: int,
) -> Iterator[List[QGVertex]]:
    """All source-to-target paths of the DAG, depth-first.

    Raises ValueError when more than `limit` paths exist; reference use
    only.
    """
    # count paths to target first so oversized instances fail fast
    counts: Dict[QGVertex, int] = {}

    def count(v: QGVertex) -> int:
        if v == target:
            return 1
        got = counts.get(v)
        if got is None:
            got = 0
            for nxt in qg_successors(g, v):
                got += count(nxt)
                if got > limit:
                    break
            counts[v] = got
        return got

    total = count(source)
    if total > limit:
        raise ValueError(f"too many paths (> {limit}) for brute-force evaluation")

    path = [source]

    def walk(v: QGVertex) -> Iterator[List[QGVertex]]:
        if v == target:
            yield list(path)
            return
        for nxt in qg_successors(g, v):
            if counts.get(nxt, 1 if nxt == target else 0) == 0:
                continue
            path.append(nxt)
            yield from walk(nxt)
            path.pop()

    return walk(source)


def eval_bruteforce(g: QueryGraph, oracle: Oracle, limit: int = 200_000) -> bool:
    """Disjunction of path_feasible over every start-to-end path.

    Exponential; small instances only.  Raises ValueError when the path
    count exceeds `limit`.
    """
    for path in iter_paths(g, qg_start(g), qg_end(g), limit):
        if path_feasible(g, path, oracle):
            return True
    return False


def to_dot(g: QueryGraph, max_vertices: int = 2_000) -> str:
    """Graphviz rendering of the sub-DAG reachable from start."""
    seen = []
    seen_set = set()
    frontier = [qg_start(g)]
    while frontier:
        v = frontier.pop()
        if v in seen_set:
            continue
        seen_set.add(v)
        seen.append(v)
        if len(seen) > max_vertices:
            raise ValueError(f"query graph dump over {max_vertices} vertices")
        frontier.extend(qg_successors(g, v))

    def vid(v: QGVertex) -> str:
        return f"v{v.state}_{v.layer}_{v.index}"

    out = ["digraph qg {", "  rankdir=LR;"]
    for v in sorted(seen):
        lab = qg_label(g, v)
        text = f"s{v.state} L{v.layer} i{v.index}"
        if lab is not None:
            text += f"\\n{lab[0]}({lab[1]})"
        shape = "doublecircle" if v == qg_end(g) else "circle"
        extra = ", style=bold" if v == qg_start(g) else ""
        out.append(f'  {vid(v)} [label="{text}", shape={shape}{extra}];')
    for v in sorted(seen):
        for t in qg_successors(g, v):
            if t in seen_set:
                style = " [style=dashed]" if t.index == v.index else ""
                out.append(f"  {vid(v)} -> {vid(t)}{style};")
    out.append("}")
    return "\n".join(out)
