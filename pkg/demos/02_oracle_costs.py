import random

from semre.baseline import match_dp
from semre.engine import SemreMatcher
from semre.oracles import CachingOracle, FunctionOracle, builtin_oracle
from semre.parsing import parse_semre

# Oracle answers are the expensive part of a semantic-regex workload
# (imagine each call being a web request or a model prompt), so the
# engine is built to ask as rarely as possible and a cache deduplicates
# whatever is still asked.

# Worst case first: .*<q>.* with an oracle that always says no forces
# the engine to try every window of the input.  Distinct windows of
# 0^m 1^m number (m+1)^2, so forwarded calls grow 4x per doubling.
r = parse_semre(".*<q>.*")
print("all-false oracle on 0^m 1^m:")
prev = None
for n in (16, 32, 64, 128):
    cache = CachingOracle(builtin_oracle("always_false"))
    SemreMatcher(r, cache).match("0" * (n // 2) + "1" * (n // 2))
    calls = cache.stats.calls_forwarded
    ratio = "" if prev is None else f"  ({calls / prev:.2f}x)"
    print(f"  |w|={n:4}  forwarded={calls}{ratio}")
    prev = calls

# Laziness: the refinement in x<q> sits behind a literal 'x'.  On lines
# without any 'x' the classical part already fails, so the oracle is
# never consulted, no matter what it would cost.
guarded = parse_semre("x<q>")
calls = []
oracle = FunctionOracle(lambda q, s: calls.append(s) or False)
matcher = SemreMatcher(guarded, oracle)   # one probe for the empty window
compile_probes = len(calls)
rng = random.Random(0)
for _ in range(1000):
    matcher.match("".join(rng.choice("abc") for _ in range(20)))
print(f"\n1000 x-free lines against x<q>: "
      f"{len(calls) - compile_probes} oracle calls during matching")

# The dynamic-programming baseline reaches the same verdicts but asks
# more often: it evaluates a refinement window before looking at what
# must follow it, while the engine only asks once the surrounding
# context is still viable.  Here the window must be followed by a 'c',
# so the engine skips every a..b window that isn't.
r = parse_semre(".*((a.*b)&<q>c).*")
lines = ["".join(rng.choice("abc") for _ in range(24)) for _ in range(50)]
lazy = dp = 0
oracle = builtin_oracle("always_false")
matcher = SemreMatcher(r, oracle)
for line in lines:
    lazy += matcher.match(line)[1].oracle_calls
    dp += match_dp(r, line, oracle)[1].oracle_calls
print(f"\n50 random lines against .*((a.*b)&<q>c).*:")
print(f"  lazy engine: {lazy} calls")
print(f"  dp baseline: {dp} calls")
