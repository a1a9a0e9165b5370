"""Oracle backends: the external predicates that refinements consult.

An oracle answers boolean questions ``evaluate(query, s)`` about strings.
Every backend here is deterministic or is made to look deterministic by
the caching wrapper.  Backend failures raise OracleError; a failed oracle
never silently becomes ``false``, because membership verdicts would then
be fabricated.

Strings cross this boundary as latin-1 text: one character per input
byte, so windows of a byte line survive round trips bit-exactly.
"""

from __future__ import annotations

import shlex
import subprocess
import threading
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, Mapping, Optional, Tuple


class OracleError(Exception):
    """A backend failed to produce an answer."""


class Oracle:
    """Interface: a deterministic boolean predicate over (query, string)."""

    def evaluate(self, query: str, s: str) -> bool:
        raise NotImplementedError

    def close(self) -> None:
        pass


class FunctionOracle(Oracle):
    """Wrap any callable (query, s) -> bool.  Handy in tests."""

    def __init__(self, fn: Callable[[str, str], bool]):
        self.fn = fn

    def evaluate(self, query: str, s: str) -> bool:
        return bool(self.fn(query, s))


_BUILTINS: Dict[str, Callable[[str], bool]] = {
    "palindrome": lambda s: s == s[::-1],
    "always_true": lambda s: True,
    "always_false": lambda s: False,
    "nonempty": lambda s: len(s) > 0,
}


def builtin_oracle(name: str) -> Oracle:
    """One of the named pure predicates: palindrome, always_true,
    always_false, nonempty."""
    try:
        fn = _BUILTINS[name]
    except KeyError:
        raise OracleError(f"unknown builtin oracle {name!r}") from None
    return FunctionOracle(lambda _q, s: fn(s))


class WordSetOracle(Oracle):
    """Membership in a fixed set of words; the query name is ignored
    (which set to use is decided by the binding, not the query)."""

    def __init__(self, words: Iterable[str]):
        self.words = frozenset(words)

    def evaluate(self, query: str, s: str) -> bool:
        return s in self.words


def wordset_oracle(path: str) -> WordSetOracle:
    """Load newline-separated entries from a file (read as bytes)."""
    try:
        with open(path, "rb") as f:
            data = f.read()
    except OSError as e:
        raise OracleError(f"cannot read word set {path}: {e}") from None
    return WordSetOracle(line.decode("latin-1") for line in data.splitlines())


class TableOracle(Oracle):
    """Explicit (query, string) -> bool lookup with a default."""

    def __init__(self, table: Mapping[Tuple[str, str], bool], default: bool = False):
        self.table = dict(table)
        self.default = default

    def evaluate(self, query: str, s: str) -> bool:
        return self.table.get((query, s), self.default)


def table_oracle(pairs: Mapping[Tuple[str, str], bool], default: bool = False) -> TableOracle:
    return TableOracle(pairs, default)


# -- external process backend ------------------------------------------

def escape_payload(s: str) -> str:
    return s.replace("\\", "\\\\").replace("\t", "\\t").replace("\n", "\\n")


def unescape_payload(s: str) -> str:
    out = []
    i = 0
    while i < len(s):
        c = s[i]
        if c == "\\":
            if i + 1 >= len(s):
                raise ValueError("dangling backslash in payload")
            nxt = s[i + 1]
            if nxt == "\\":
                out.append("\\")
            elif nxt == "t":
                out.append("\t")
            elif nxt == "n":
                out.append("\n")
            else:
                raise ValueError(f"bad escape \\{nxt}")
            i += 2
            continue
        out.append(c)
        i += 1
    return "".join(out)


class ProcessOracle(Oracle):
    """Ask a child process over a line protocol.

    Request:  escape(query) TAB escape(payload) LF, where escaping maps
    backslash, tab and newline to \\\\, \\t and \\n (latin-1 bytes).
    Reply:  a line containing "1" (true) or "0" (false).

    The child is spawned lazily on first use and is expected to answer
    requests one at a time in order; concurrent evaluate calls are
    serialized.  Spawn failures, protocol violations and early exits all
    raise OracleError.
    """

    def __init__(self, command: str):
        self.command = command
        self.proc: Optional[subprocess.Popen] = None
        self.lock = threading.Lock()

    def _spawn(self) -> subprocess.Popen:
        if self.proc is None or self.proc.poll() is not None:
            try:
                self.proc = subprocess.Popen(
                    shlex.split(self.command),
                    stdin=subprocess.PIPE,
                    stdout=subprocess.PIPE,
                )
            except OSError as e:
                raise OracleError(f"cannot spawn oracle {self.command!r}: {e}") from None
        return self.proc

    def evaluate(self, query: str, s: str) -> bool:
        with self.lock:
            proc = self._spawn()
            line = escape_payload(query) + "\t" + escape_payload(s) + "\n"
            try:
                proc.stdin.write(line.encode("latin-1"))
                proc.stdin.flush()
                reply = proc.stdout.readline()
            except (OSError, ValueError) as e:
                raise OracleError(f"oracle {self.command!r} pipe failure: {e}") from None
            if reply == b"":
                raise OracleError(f"oracle {self.command!r} exited mid-stream")
            verdict = reply.strip()
            if verdict == b"1":
                return True
            if verdict == b"0":
                return False
            raise OracleError(
                f"oracle {self.command!r} protocol violation: {reply[:80]!r}"
            )

    def close(self) -> None:
        with self.lock:
            if self.proc is not None and self.proc.poll() is None:
                self.proc.stdin.close()
                try:
                    self.proc.wait(timeout=2)
                except subprocess.TimeoutExpired:
                    self.proc.kill()
                    self.proc.wait()
            self.proc = None


def process_oracle(command: str) -> ProcessOracle:
    return ProcessOracle(command)


# -- caching and metering wrappers -------------------------------------

@dataclass
class CacheStats:
    hits: int = 0
    misses: int = 0
    chars_forwarded: int = 0

    @property
    def calls_forwarded(self) -> int:
        return self.misses


class CachingOracle(Oracle):
    """Memoize (query, s) pairs and pin down the first answer.

    Within one run, repeated pairs return the cached answer even if the
    inner backend would have flip-flopped.  Concurrent misses on the same
    key are serialized so the pair is forwarded at most once; errors are
    reported to every waiter but never cached, so a later call retries.
    """

    def __init__(self, inner: Oracle):
        self.inner = inner
        self.stats = CacheStats()
        self._cache: Dict[Tuple[str, str], bool] = {}
        self._inflight: Dict[Tuple[str, str], threading.Event] = {}
        self._errors: Dict[Tuple[str, str], BaseException] = {}
        self._lock = threading.Lock()

    def evaluate(self, query: str, s: str) -> bool:
        key = (query, s)
        while True:
            with self._lock:
                if key in self._cache:
                    self.stats.hits += 1
                    return self._cache[key]
                event = self._inflight.get(key)
                if event is None:
                    event = threading.Event()
                    self._inflight[key] = event
                    self.stats.misses += 1
                    self.stats.chars_forwarded += len(s)
                    mine = True
                else:
                    mine = False
            if not mine:
                event.wait()
                with self._lock:
                    if key in self._cache:
                        self.stats.hits += 1
                        return self._cache[key]
                    err = self._errors.pop(key, None)
                if err is not None:
                    raise err
                continue  # owner failed and cleaned up; retry as a fresh call
            try:
                answer = self.inner.evaluate(query, s)
            except BaseException as e:
                with self._lock:
                    del self._inflight[key]
                    self._errors[key] = e
                event.set()
                raise
            with self._lock:
                self._cache[key] = answer
                del self._inflight[key]
            event.set()
            return answer

    def close(self) -> None:
        self.inner.close()


@dataclass
class MeterReadings:
    calls: int = 0
    chars: int = 0
    seen: set = field(default_factory=set)

    @property
    def distinct(self) -> int:
        return len(self.seen)


class MeteringOracle(Oracle):
    """Count calls, distinct (query, window) pairs and submitted chars.

    One instance per match; not thread-safe (a match runs on one thread).
    """

    def __init__(self, inner: Oracle):
        self.inner = inner
        self.readings = MeterReadings()

    def evaluate(self, query: str, s: str) -> bool:
        r = self.readings
        r.calls += 1
        r.chars += len(s)
        r.seen.add((query, s))
        return self.inner.evaluate(query, s)


def caching_oracle(inner: Oracle) -> CachingOracle:
    return CachingOracle(inner)


class DispatchOracle(Oracle):
    """Route each query name to its bound backend."""

    def __init__(self, bindings: Mapping[str, Oracle]):
        self.bindings = dict(bindings)

    def evaluate(self, query: str, s: str) -> bool:
        oracle = self.bindings.get(query)
        if oracle is None:
            raise OracleError(f"query {query!r} is not bound to any oracle")
        return oracle.evaluate(query, s)

    def close(self) -> None:
        for oracle in self.bindings.values():
            oracle.close()


def load_table_file(path: str) -> TableOracle:
    """Key-value oracle file: lines of `query TAB string TAB 0|1` using
    the wire-protocol escaping.  Missing keys answer false."""
    table: Dict[Tuple[str, str], bool] = {}
    try:
        with open(path, "rb") as f:
            data = f.read()
    except OSError as e:
        raise OracleError(f"cannot read table {path}: {e}") from None
    for ln, raw in enumerate(data.splitlines(), 1):
        line = raw.decode("latin-1")
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3 or parts[2] not in ("0", "1"):
            raise OracleError(f"{path}:{ln}: expected 'query<TAB>string<TAB>0|1'")
        try:
            q = unescape_payload(parts[0])
            s = unescape_payload(parts[1])
        except ValueError as e:
            raise OracleError(f"{path}:{ln}: {e}") from None
        table[(q, s)] = parts[2] == "1"
    return TableOracle(table)


def load_oracle_config(path: str) -> DispatchOracle:
    """Parse an oracle config file into a dispatching oracle.

    One binding per line: `query_name = spec`, where spec is one of
    builtin:NAME, wordset:PATH, table:PATH, process:COMMAND, true, false.
    Relative paths are resolved against the config file's directory.
    `#` starts a comment line; blank lines are skipped.
    """
    import os

    base = os.path.dirname(os.path.abspath(path))
    bindings: Dict[str, Oracle] = {}
    try:
        with open(path, "r", encoding="utf-8") as f:
            lines = f.readlines()
    except OSError as e:
        raise OracleError(f"cannot read oracle config {path}: {e}") from None
    for ln, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise OracleError(f"{path}:{ln}: expected 'query = spec'")
        name, spec = (part.strip() for part in line.split("=", 1))
        if not name:
            raise OracleError(f"{path}:{ln}: empty query name")
        if name in bindings:
            raise OracleError(f"{path}:{ln}: duplicate binding for {name!r}")
        bindings[name] = _parse_spec(spec, base, f"{path}:{ln}")
    return DispatchOracle(bindings)


def _parse_spec(spec: str, base: str, where: str) -> Oracle:
    import os

    def resolve(p: str) -> str:
        return p if os.path.isabs(p) else os.path.join(base, p)

    if spec == "true":
        return builtin_oracle("always_true")
    if spec == "false":
        return builtin_oracle("always_false")
    kind, sep, arg = spec.partition(":")
    if not sep or not arg:
        raise OracleError(f"{where}: malformed oracle spec {spec!r}")
    if kind == "builtin":
        return builtin_oracle(arg)
    if kind == "wordset":
        return wordset_oracle(resolve(arg))
    if kind == "table":
        return load_table_file(resolve(arg))
    if kind == "process":
        return ProcessOracle(arg)
    raise OracleError(f"{where}: unknown oracle backend {kind!r}")
