"""The production matcher: lazy dynamic programming over the layered graph.

Four quantities are computed per vertex, memoized, and pulled on demand
starting from the end vertex:

  Alive(v)    true iff a tentatively feasible path reaches v: true at
              start; for blank and open vertices, the disjunction of the
              predecessors' Alive; for a close vertex, AQ(v) nonempty.
  LOQ(v)      the live open vertices whose span could close here: alive
              open-marked predecessors, plus Backref of every other
              predecessor.
  AQ(v)       for close(q) vertices: the members of LOQ(v) whose window
              the oracle accepts.
  Backref(v)  the last unclosed open vertex of paths into v: LOQ(v) for
              blank and open vertices; for a close vertex, the union of
              Backref over AQ(v).

The graph is a DAG and all dependencies point to earlier vertices, so a
memoized traversal terminates; an explicit work stack keeps long lines
from exhausting the interpreter stack.  Demand-driven evaluation is what
makes the matcher frugal with the oracle: windows are only submitted at
close vertices that some backward chain from the end actually reaches,
with live opens to pair them with.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Tuple, Union

from .oracles import MeteringOracle, Oracle
from .patterns import Pattern
from .query_graph import GadgetTables, QueryGraph
from .snfa import CLOSE, OPEN, SNFA, build_snfa, compute_eps, normalize


@dataclass
class MatchMetrics:
    oracle_calls: int
    distinct_queries: int
    submitted_chars: int
    wall_time: float
    matched: bool


_EMPTY: FrozenSet[int] = frozenset()

# work-stack frame kinds
_ALIVE, _AQ, _LOQ, _BREF = 0, 1, 2, 3


class SemreMatcher:
    """Compile a pattern once, then match any number of lines.

    Construction builds and normalizes the machine, asks the oracle about
    the empty string once per query, computes the Eps relation from those
    answers, and precomputes the between-character adjacency tables.  All
    of that is immutable afterwards, so one matcher may serve concurrent
    line workers; the oracle is the only shared mutable dependency.
    """

    def __init__(self, pattern: Pattern, oracle: Oracle):
        self.machine = normalize(build_snfa(pattern))
        self.oracle = oracle
        self.query_names = self.machine.queries()
        self.eps_answers = {q: oracle.evaluate(q, "") for q in self.query_names}
        self.eps = compute_eps(self.machine, self.eps_answers)
        self.tables = GadgetTables(self.machine, self.eps)

    def match(self, line: Union[str, bytes]) -> Tuple[bool, MatchMetrics]:
        if isinstance(line, str):
            line = line.encode("latin-1")
        t0 = time.perf_counter()
        meter = MeteringOracle(self.oracle)
        matched = _Evaluation(self, line, meter).run()
        r = meter.readings
        return matched, MatchMetrics(
            oracle_calls=r.calls,
            distinct_queries=r.distinct,
            submitted_chars=r.chars,
            wall_time=time.perf_counter() - t0,
            matched=matched,
        )

    def graph(self, line: bytes) -> QueryGraph:
        return QueryGraph(self.tables, line)


class _Evaluation:
    """One line's worth of memo tables and the work-stack interpreter.

    Vertices are packed into ints: ((index-1)*3 + (layer-1)) * n_states
    + state, so layer-1 codes at index 1 start at 0 and the tables below
    stay plain dicts keyed by small ints.
    """

    def __init__(self, matcher: SemreMatcher, w: bytes, meter: MeteringOracle):
        self.m = matcher.machine
        self.tables = matcher.tables
        self.eps_answers = matcher.eps_answers
        self.meter = meter
        self.w = w
        self.n = len(w)
        self.S = self.m.n_states
        self.start_code = self.m.start  # (start, layer 1, index 1)
        self.alive: Dict[int, bool] = {}
        self.aq: Dict[int, FrozenSet[int]] = {}
        self.loq: Dict[int, FrozenSet[int]] = {}
        self.bref: Dict[int, FrozenSet[int]] = {}
        # (state, byte) -> predecessor states over a matching character edge
        self.char_pre: Dict[Tuple[int, int], Tuple[int, ...]] = {}

    def run(self) -> bool:
        end_code = (self.n * 3 + 2) * self.S + self.m.end
        return self.eval_alive(end_code)

    # -- vertex decoding ----------------------------------------------

    def label(self, v: int):
        """The vertex mark: state close marks show on layer 1 only, open
        marks on layer 2 only."""
        s = v % self.S
        lab = self.m.labels[s]
        if lab is None:
            return None
        layer = (v // self.S) % 3
        if layer == 0 and lab[0] == CLOSE:
            return lab
        if layer == 1 and lab[0] == OPEN:
            return lab
        return None

    def idx(self, v: int) -> int:
        return v // (3 * self.S) + 1

    def preds(self, v: int) -> List[int]:
        S = self.S
        s = v % S
        rest = v // S
        layer = rest % 3
        i = rest // 3 + 1
        base = (i - 1) * 3 * S
        out: List[int] = []
        if layer == 0:
            lab = self.m.labels[s]
            if lab is not None and lab[0] == CLOSE:
                out.extend(base + p for p in self.tables.marker_pre[s])
            if i >= 2:
                byte = self.w[i - 2]
                key = (s, byte)
                sources = self.char_pre.get(key)
                if sources is None:
                    sources = tuple(
                        src for src, cs in self.m.char_in[s] if cs.contains(byte)
                    )
                    self.char_pre[key] = sources
                prev_base = (i - 2) * 3 * S + 2 * S
                out.extend(prev_base + p for p in sources)
        elif layer == 1:
            out.append(base + s)
            lab = self.m.labels[s]
            if lab is not None and lab[0] == OPEN:
                out.extend(base + S + p for p in self.tables.marker_pre[s])
        else:
            out.append(base + S + s)
            out.extend(base + S + p for p in self.tables.eps_pre[s])
        return out

    # -- the interpreter ----------------------------------------------

    def eval_alive(self, v0: int) -> bool:
        alive, aq, loq, bref = self.alive, self.aq, self.loq, self.bref
        if v0 in alive:
            return alive[v0]
        # frame: [kind, vertex, worklist, cursor, accumulator]
        stack: List[list] = [[_ALIVE, v0, None, 0, None]]
        while stack:
            fr = stack[-1]
            kind, v = fr[0], fr[1]

            if kind == _ALIVE:
                if v in alive:
                    stack.pop()
                    continue
                if v == self.start_code:
                    alive[v] = True
                    stack.pop()
                    continue
                lab = self.label(v)
                if lab is not None and lab[0] == CLOSE:
                    got = aq.get(v)
                    if got is None:
                        stack.append([_AQ, v, None, 0, None])
                        continue
                    alive[v] = bool(got)
                    stack.pop()
                    continue
                if fr[2] is None:
                    fr[2] = self.preds(v)
                found = False
                suspended = False
                while fr[3] < len(fr[2]):
                    p = fr[2][fr[3]]
                    a = alive.get(p)
                    if a is None:
                        stack.append([_ALIVE, p, None, 0, None])
                        suspended = True
                        break
                    if a:
                        found = True
                        break
                    fr[3] += 1
                if suspended:
                    continue
                alive[v] = found
                stack.pop()

            elif kind == _AQ:
                if v in aq:
                    stack.pop()
                    continue
                got = loq.get(v)
                if got is None:
                    stack.append([_LOQ, v, None, 0, None])
                    continue
                q = self.m.labels[v % self.S][1]
                j = self.idx(v)
                kept = []
                for member in sorted(got):
                    i = self.idx(member)
                    if i == j:
                        ok = self.eps_answers[q]
                    else:
                        window = self.w[i - 1 : j - 1].decode("latin-1")
                        ok = self.meter.evaluate(q, window)
                    if ok:
                        kept.append(member)
                aq[v] = frozenset(kept) if kept else _EMPTY
                stack.pop()

            elif kind == _LOQ:
                if v in loq:
                    stack.pop()
                    continue
                if fr[2] is None:
                    fr[2] = self.preds(v)
                    fr[4] = []
                suspended = False
                while fr[3] < len(fr[2]):
                    p = fr[2][fr[3]]
                    plab = self.label(p)
                    if plab is not None and plab[0] == OPEN:
                        a = self.alive.get(p)
                        if a is None:
                            stack.append([_ALIVE, p, None, 0, None])
                            suspended = True
                            break
                        if a:
                            fr[4].append(p)
                    else:
                        b = bref.get(p)
                        if b is None:
                            stack.append([_BREF, p, None, 0, None])
                            suspended = True
                            break
                        if b:
                            fr[4].append(b)
                    fr[3] += 1
                if suspended:
                    continue
                loq[v] = _union(fr[4])
                stack.pop()

            else:  # _BREF
                if v in bref:
                    stack.pop()
                    continue
                lab = self.label(v)
                if lab is None or lab[0] == OPEN:
                    got = loq.get(v)
                    if got is None:
                        stack.append([_LOQ, v, None, 0, None])
                        continue
                    bref[v] = got
                    stack.pop()
                    continue
                got = aq.get(v)
                if got is None:
                    stack.append([_AQ, v, None, 0, None])
                    continue
                if fr[2] is None:
                    fr[2] = sorted(got)
                    fr[4] = []
                suspended = False
                while fr[3] < len(fr[2]):
                    member = fr[2][fr[3]]
                    b = bref.get(member)
                    if b is None:
                        stack.append([_BREF, member, None, 0, None])
                        suspended = True
                        break
                    if b:
                        fr[4].append(b)
                    fr[3] += 1
                if suspended:
                    continue
                bref[v] = _union(fr[4])
                stack.pop()

        return alive[v0]


def _union(parts: list) -> FrozenSet[int]:
    """Union of ints and frozensets, reusing singleton inputs."""
    if not parts:
        return _EMPTY
    if len(parts) == 1:
        only = parts[0]
        return only if isinstance(only, frozenset) else frozenset((only,))
    singles = [x for x in parts if not isinstance(x, frozenset)]
    sets = [x for x in parts if isinstance(x, frozenset)]
    if singles:
        sets.append(frozenset(singles))
    return sets[0].union(*sets[1:])


def match_semre(
    r: Pattern, w: Union[str, bytes], oracle: Oracle
) -> Tuple[bool, MatchMetrics]:
    """One-shot convenience: compile, match a single string.

    Metrics cover the match itself; the compile step's empty-string
    materialization still reaches the oracle but is not metered here.
    """
    return SemreMatcher(r, oracle).match(w)
