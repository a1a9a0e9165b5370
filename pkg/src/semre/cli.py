"""Command-line front end.

Grep mode (the default):

    semre [options] PATTERN [FILE]
    semre -e PATTERN [options] [FILE]

reads FILE (or standard input) line by line and prints the lines the
pattern matches.  Oracle queries inside the pattern are bound to
backends with an oracle config file (-O).  Exit status follows grep:
0 with at least one match, 1 with none, 2 on error.

Triangle mode:

    semre triangle EDGE_LIST [--encoding unary|binary|both]

encodes the graph as a matching instance and reports the verdict of the
reduction next to a direct brute-force check.
"""

from __future__ import annotations

import argparse
import sys
from typing import List, Optional

from .engine import SemreMatcher, match_semre
from .oracles import OracleError
from .parsing import ParseError, parse_semre
from .query_graph import to_dot as qg_to_dot
from .runner import (
    RunConfig,
    RunError,
    build_oracle,
    effective_pattern,
    iter_lines,
    run_bench,
    run_grep,
)
from .snfa import build_snfa, normalize, to_dot as snfa_to_dot
from .triangle import (
    brute_force_triangle,
    encode_instance,
    encode_instance_binary,
    read_edge_list,
)


def _grep_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="semre",
        description="grep for oracle-refined regular expressions",
        epilog="run `semre triangle --help` for the graph reduction mode",
    )
    p.add_argument("-e", "--pattern", dest="pattern_flag", metavar="PATTERN")
    p.add_argument("-O", "--oracles", metavar="FILE", help="oracle config file")
    p.add_argument(
        "--engine",
        choices=["snfa", "dp", "naive", "all"],
        default="snfa",
        help="matching engine; `all` cross-checks and benchmarks every engine",
    )
    p.add_argument(
        "-x",
        "--whole-line",
        action="store_true",
        help="match the whole line instead of any substring",
    )
    p.add_argument("--max-line-len", type=int, default=1000, metavar="N")
    p.add_argument(
        "--ascii-only",
        action=argparse.BooleanOptionalAction,
        default=True,
        help="skip lines containing non-ASCII bytes (default on)",
    )
    p.add_argument(
        "--bench",
        metavar="OUT",
        help="write per-line and aggregate metric records to OUT (- for stdout)",
    )
    p.add_argument(
        "--dump-snfa",
        action="store_true",
        help="print the compiled machine as Graphviz and exit",
    )
    p.add_argument(
        "--dump-qg",
        action="store_true",
        help="print the query graph of the first surviving input line and exit",
    )
    p.add_argument("--jobs", type=int, default=1, metavar="N")
    p.add_argument("--timeout", type=float, metavar="SECS", help="whole-run budget")
    p.add_argument("positional", nargs="*", metavar="PATTERN [FILE]")
    return p


def _split_positionals(args) -> Optional[str]:
    """Returns an error message, or None; fills args.pattern/args.input."""
    pos: List[str] = list(args.positional)
    if args.pattern_flag is not None:
        args.pattern = args.pattern_flag
    elif pos:
        args.pattern = pos.pop(0)
    else:
        return "no pattern given (positional or -e)"
    if len(pos) > 1:
        return f"unexpected extra arguments: {' '.join(pos[1:])}"
    args.input = pos[0] if pos else None
    return None


def _config_from_args(args) -> RunConfig:
    return RunConfig(
        pattern=args.pattern,
        oracle_config_path=args.oracles,
        input_path=args.input,
        engine=args.engine,
        whole_line=args.whole_line,
        max_line_len=args.max_line_len,
        ascii_only=args.ascii_only,
        metrics_out=args.bench,
        jobs=args.jobs,
        timeout=args.timeout,
    )


def _dump_snfa(cfg: RunConfig) -> int:
    try:
        machine = normalize(build_snfa(effective_pattern(cfg)))
    except RunError as e:
        print(f"semre: {e}", file=sys.stderr)
        return 2
    print(snfa_to_dot(machine))
    return 0


def _dump_qg(cfg: RunConfig) -> int:
    try:
        r = effective_pattern(cfg)
        oracle, _ = build_oracle(cfg, r)
        matcher = SemreMatcher(r, oracle)
        stream = (
            sys.stdin.buffer
            if cfg.input_path in (None, "-")
            else open(cfg.input_path, "rb")
        )
        try:
            first = next(iter_lines(cfg, stream), None)
        finally:
            if stream is not sys.stdin.buffer:
                stream.close()
        if first is None:
            print("semre: no input line survives the filters", file=sys.stderr)
            return 2
        print(qg_to_dot(matcher.graph(first[1])))
        return 0
    except (RunError, OracleError, OSError, ValueError) as e:
        print(f"semre: {e}", file=sys.stderr)
        return 2


def _triangle_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="semre triangle",
        description="triangle finding via the matching reduction",
    )
    p.add_argument("graph", metavar="EDGE_LIST", help="file of `i j` lines, 1-based")
    p.add_argument(
        "--encoding",
        choices=["unary", "binary", "both"],
        default="both",
        help="vertex rendering for the reduction (default both)",
    )
    return p


def triangle_main(argv: List[str]) -> int:
    args = _triangle_parser().parse_args(argv)
    try:
        g = read_edge_list(args.graph)
    except (OSError, ValueError) as e:
        print(f"semre: {e}", file=sys.stderr)
        return 2
    want = brute_force_triangle(g)
    print(f"graph: {g.n} vertices, {len(g.edges)} edges")
    print(f"brute force: {'triangle' if want else 'no triangle'}")
    encoders = {
        "unary": [("unary", encode_instance)],
        "binary": [("binary", encode_instance_binary)],
        "both": [("unary", encode_instance), ("binary", encode_instance_binary)],
    }[args.encoding]
    agree = True
    found = want
    for name, encode in encoders:
        try:
            r, w, oracle = encode(g)
        except ValueError as e:
            print(f"semre: {name}: {e}", file=sys.stderr)
            return 2
        ok, metrics = match_semre(r, w, oracle)
        print(
            f"{name} reduction: {'triangle' if ok else 'no triangle'} "
            f"(|w|={len(w)}, oracle calls={metrics.oracle_calls})"
        )
        agree = agree and ok == want
        found = ok
    if not agree:
        print("semre: reduction disagrees with brute force", file=sys.stderr)
        return 2
    return 0 if found else 1


def main(argv: Optional[List[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv and argv[0] == "triangle":
        return triangle_main(argv[1:])
    args = _grep_parser().parse_args(argv)
    problem = _split_positionals(args)
    if problem is not None:
        print(f"semre: {problem}", file=sys.stderr)
        return 2
    cfg = _config_from_args(args)
    try:
        if args.dump_snfa:
            return _dump_snfa(cfg)
        if args.dump_qg:
            return _dump_qg(cfg)
        if args.bench is not None:
            return run_bench(cfg)
        return run_grep(cfg)
    except ParseError as e:
        print(f"semre: pattern: {e}", file=sys.stderr)
        return 2
    except KeyboardInterrupt:
        return 2


if __name__ == "__main__":
    sys.exit(main())
