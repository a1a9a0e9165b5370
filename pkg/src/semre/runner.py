"""Line-oriented execution: grep mode and benchmark mode.

Both modes share the same pipeline: read the input as bytes, split on
LF, strip a trailing CR, drop lines that fail the active filters, run
the selected engine(s) on each surviving line, and either print matches
or write per-line metric records.  Pattern artifacts are compiled once;
with a worker pool the per-line work fans out while output order stays
the input order.
"""

from __future__ import annotations

import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, IO, Iterable, Iterator, List, Optional, Tuple

from .baseline import _NAIVE_MAX_LEN, match_dp, match_naive
from .engine import MatchMetrics, SemreMatcher
from .oracles import (
    CachingOracle,
    MeteringOracle,
    Oracle,
    OracleError,
    builtin_oracle,
    load_oracle_config,
)
from .parsing import ParseError, parse_semre
from .patterns import ANY_CHAR, Cat, Lit, Pattern, Star, queries


@dataclass
class RunConfig:
    pattern: str
    oracle_config_path: Optional[str] = None
    input_path: Optional[str] = None  # None reads standard input
    engine: str = "snfa"  # snfa | dp | naive | all
    whole_line: bool = False  # False pads the pattern as .* r .*
    max_line_len: int = 1000
    ascii_only: bool = True
    per_line_timeout: Optional[float] = None
    metrics_out: Optional[str] = None
    jobs: int = 1
    timeout: Optional[float] = None  # whole-run budget in seconds


@dataclass
class LineReport:
    line_number: int
    matched: bool
    oracle_calls: int
    distinct_queries: int
    submitted_chars: int
    elapsed: float


class RunError(Exception):
    """Configuration or input problem that maps to exit status 2."""


class _TimingOracle(Oracle):
    """Accumulate wall time spent in the wrapped backend."""

    def __init__(self, inner: Oracle):
        self.inner = inner
        self.seconds = 0.0

    def evaluate(self, query: str, s: str) -> bool:
        t0 = time.perf_counter()
        try:
            return self.inner.evaluate(query, s)
        finally:
            self.seconds += time.perf_counter() - t0

    def close(self) -> None:
        self.inner.close()


def effective_pattern(cfg: RunConfig) -> Pattern:
    try:
        r = parse_semre(cfg.pattern)
    except ParseError as e:
        raise RunError(f"pattern: {e}") from None
    if not cfg.whole_line:
        r = Cat(Cat(Star(Lit(ANY_CHAR)), r), Star(Lit(ANY_CHAR)))
    return r


def build_oracle(cfg: RunConfig, r: Pattern) -> Tuple[CachingOracle, _TimingOracle]:
    """Load bindings, check every pattern query is bound, add the timing
    and caching layers (cache outermost)."""
    needed = queries(r)
    if cfg.oracle_config_path is not None:
        backend = load_oracle_config(cfg.oracle_config_path)
        bound = set(backend.bindings)
    else:
        backend = builtin_oracle("always_false")
        bound = set()
    missing = [q for q in needed if q not in bound]
    if missing and cfg.oracle_config_path is None:
        raise RunError(
            f"pattern uses quer{'ies' if len(missing) > 1 else 'y'} "
            f"{', '.join(missing)} but no oracle config was given (-O)"
        )
    if missing:
        raise RunError(
            f"{cfg.oracle_config_path}: no binding for "
            f"quer{'ies' if len(missing) > 1 else 'y'} {', '.join(missing)}"
        )
    timed = _TimingOracle(backend)
    return CachingOracle(timed), timed


def iter_lines(cfg: RunConfig, stream: IO[bytes]) -> Iterator[Tuple[int, bytes]]:
    """Numbered surviving lines; filters drop, they never fail the run."""
    for number, raw in enumerate(stream, 1):
        line = raw[:-1] if raw.endswith(b"\n") else raw
        if line.endswith(b"\r"):
            line = line[:-1]
        if len(line) > cfg.max_line_len:
            continue
        if cfg.ascii_only and any(b > 127 for b in line):
            continue
        yield number, line


def _open_input(cfg: RunConfig) -> IO[bytes]:
    if cfg.input_path is None or cfg.input_path == "-":
        return sys.stdin.buffer
    try:
        return open(cfg.input_path, "rb")
    except OSError as e:
        raise RunError(str(e)) from None


Engine = Callable[[bytes], Tuple[bool, MatchMetrics]]


def build_engines(cfg: RunConfig, r: Pattern, oracle: Oracle) -> List[Tuple[str, Engine]]:
    names = ["snfa", "dp"] if cfg.engine == "all" else [cfg.engine]
    if cfg.engine == "all" and cfg.max_line_len <= _NAIVE_MAX_LEN:
        names.append("naive")
    engines: List[Tuple[str, Engine]] = []
    for name in names:
        if name == "snfa":
            matcher = SemreMatcher(r, oracle)
            engines.append((name, matcher.match))
        elif name == "dp":
            engines.append((name, lambda w, r=r, o=oracle: match_dp(r, w, o)))
        elif name == "naive":
            if cfg.max_line_len > _NAIVE_MAX_LEN:
                raise RunError(
                    f"engine naive needs --max-line-len <= {_NAIVE_MAX_LEN} "
                    f"(got {cfg.max_line_len})"
                )

            def run_naive(w: bytes, r=r, o=oracle) -> Tuple[bool, MatchMetrics]:
                t0 = time.perf_counter()
                meter = MeteringOracle(o)
                ok = match_naive(r, w, meter, max_len=cfg.max_line_len)
                rd = meter.readings
                return ok, MatchMetrics(
                    rd.calls, rd.distinct, rd.chars, time.perf_counter() - t0, ok
                )

            engines.append((name, run_naive))
        else:
            raise RunError(f"unknown engine {name!r}")
    return engines


def _map_lines(
    cfg: RunConfig,
    lines: Iterable[Tuple[int, bytes]],
    work: Callable[[Tuple[int, bytes]], object],
) -> Iterator[object]:
    if cfg.jobs <= 1:
        yield from map(work, lines)
        return
    with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
        # pool.map preserves submission order, so output order is stable
        yield from pool.map(work, lines)


def _deadline(cfg: RunConfig) -> Optional[float]:
    return None if cfg.timeout is None else time.monotonic() + cfg.timeout


def run_grep(cfg: RunConfig, out: Optional[IO[bytes]] = None, err=None) -> int:
    """Print matching lines; 0 when something matched, 1 when nothing
    did, 2 on any error (grep convention)."""
    out = out if out is not None else sys.stdout.buffer
    err = err if err is not None else sys.stderr
    try:
        r = effective_pattern(cfg)
        oracle, _ = build_oracle(cfg, r)
        engines = build_engines(cfg, r, oracle)
        stream = _open_input(cfg)
    except (RunError, OracleError) as e:
        print(f"semre: {e}", file=err)
        return 2
    deadline = _deadline(cfg)
    matched_any = False
    failed = False

    def work(item: Tuple[int, bytes]):
        number, line = item
        verdicts = []
        for name, engine in engines:
            try:
                ok, metrics = engine(line)
            except OracleError as e:
                return number, line, None, f"line {number}: oracle failure: {e}"
            if cfg.per_line_timeout is not None and metrics.wall_time > cfg.per_line_timeout:
                return number, line, None, f"line {number}: exceeded per-line timeout"
            verdicts.append((name, ok))
        answers = {ok for _, ok in verdicts}
        if len(answers) > 1:
            detail = ", ".join(f"{name}={ok}" for name, ok in verdicts)
            return number, line, None, f"line {number}: engines disagree ({detail})"
        return number, line, answers.pop(), None

    try:
        for number, line, verdict, problem in _map_lines(cfg, iter_lines(cfg, stream), work):
            if deadline is not None and time.monotonic() > deadline:
                print("semre: run timeout exceeded", file=err)
                return 2
            if problem is not None:
                print(f"semre: {problem}", file=err)
                failed = True
                continue
            if verdict:
                matched_any = True
                out.write(line + b"\n")
        out.flush()
    finally:
        if stream is not sys.stdin.buffer:
            stream.close()
    if failed:
        return 2
    return 0 if matched_any else 1


_BENCH_HEADER = (
    "# line\tengine\tline_number\tmatched\toracle_calls\tdistinct_queries"
    "\tsubmitted_chars\telapsed_s\n"
    "# agg\tengine\tlines\tmatched\toracle_calls\tdistinct_queries"
    "\tsubmitted_chars\telapsed_s\trt_ms_per_line\trt_ms_per_matched"
    "\tcalls_per_line\tchars_per_line\toracle_time_frac\n"
)


def run_bench(cfg: RunConfig, err=None) -> int:
    """Run every requested engine over the corpus and write tab-separated
    per-line records plus one aggregate record per engine."""
    err = err if err is not None else sys.stderr
    try:
        r = effective_pattern(cfg)
    except RunError as e:
        print(f"semre: {e}", file=err)
        return 2
    deadline = _deadline(cfg)

    try:
        stream = _open_input(cfg)
        try:
            lines = list(iter_lines(cfg, stream))
        finally:
            if stream is not sys.stdin.buffer:
                stream.close()
    except RunError as e:
        print(f"semre: {e}", file=err)
        return 2

    dest = cfg.metrics_out
    sink = sys.stdout if dest in (None, "-") else open(dest, "w", encoding="ascii")
    status = 0
    try:
        sink.write(_BENCH_HEADER)
        engine_names = ["snfa", "dp"] if cfg.engine == "all" else [cfg.engine]
        if cfg.engine == "all" and cfg.max_line_len <= _NAIVE_MAX_LEN:
            engine_names.append("naive")
        for name in engine_names:
            # fresh oracle stack per engine so cache stats do not leak
            sub = RunConfig(**{**cfg.__dict__, "engine": name})
            try:
                oracle, timed = build_oracle(sub, r)
                [(_, engine)] = build_engines(sub, r, oracle)
            except (RunError, OracleError) as e:
                print(f"semre: {e}", file=err)
                return 2
            reports: List[LineReport] = []

            def work(item: Tuple[int, bytes], engine=engine):
                number, line = item
                ok, m = engine(line)
                return LineReport(
                    number, ok, m.oracle_calls, m.distinct_queries,
                    m.submitted_chars, m.wall_time,
                )

            wall0 = time.perf_counter()
            for rep in _map_lines(cfg, lines, work):
                if deadline is not None and time.monotonic() > deadline:
                    print("semre: run timeout exceeded", file=err)
                    return 2
                reports.append(rep)
                sink.write(
                    f"line\t{name}\t{rep.line_number}\t{int(rep.matched)}"
                    f"\t{rep.oracle_calls}\t{rep.distinct_queries}"
                    f"\t{rep.submitted_chars}\t{rep.elapsed:.6f}\n"
                )
            wall = time.perf_counter() - wall0
            n = len(reports)
            matched = sum(1 for rep in reports if rep.matched)
            calls = sum(rep.oracle_calls for rep in reports)
            distinct = sum(rep.distinct_queries for rep in reports)
            chars = sum(rep.submitted_chars for rep in reports)
            elapsed = sum(rep.elapsed for rep in reports)
            per_line = 1000.0 * elapsed / n if n else 0.0
            per_match = (
                1000.0 * sum(rep.elapsed for rep in reports if rep.matched) / matched
                if matched
                else float("nan")
            )
            frac = timed.seconds / wall if wall > 0 else 0.0
            sink.write(
                f"agg\t{name}\t{n}\t{matched}\t{calls}\t{distinct}\t{chars}"
                f"\t{elapsed:.6f}\t{per_line:.6f}\t{per_match:.6f}"
                f"\t{calls / n if n else 0.0:.6f}\t{chars / n if n else 0.0:.6f}"
                f"\t{frac:.6f}\n"
            )
            oracle.close()
    except OracleError as e:
        print(f"semre: {e}", file=err)
        status = 2
    finally:
        if sink is not sys.stdout:
            sink.close()
    return status
