from semre.engine import match_semre
from semre.parsing import to_text
from semre.triangle import (
    brute_force_triangle,
    encode_instance,
    encode_instance_binary,
    graph,
)

# Matching with oracles is provably expensive in general: deciding
# whether a graph contains a triangle can be phrased as one semantic
# regex match.  The graph's vertices become a delimited word and a
# single edge oracle answers "do the two endpoints of this window share
# an edge?".  A match then picks out three mutually adjacent vertices.

g = graph(5, [(1, 2), (2, 3), (1, 3), (3, 4), (4, 5)])
print("edges:", sorted(g.edges))
print("cubic check says:", brute_force_triangle(g))

r, w, oracle = encode_instance(g)
print("\nunary encoding")
print("  word:   ", w)
print("  pattern:", to_text(r))
ok, metrics = match_semre(r, w, oracle)
print(f"  match={ok} oracle_calls={metrics.oracle_calls}")

# The unary encoding spends one symbol per vertex; the binary encoding
# writes vertex ids as fixed-width 01-blocks instead, so the alphabet
# stays {0, 1, #} no matter how large the graph gets.
r, w, oracle = encode_instance_binary(g)
print("\nbinary encoding")
print("  word:   ", w)
ok, metrics = match_semre(r, w, oracle)
print(f"  match={ok} oracle_calls={metrics.oracle_calls}")

# A triangle-free graph: same machinery, negative verdict.
g = graph(6, [(i, i + 1) for i in range(1, 6)])
for name, encode in [("unary", encode_instance), ("binary", encode_instance_binary)]:
    r, w, oracle = encode(g)
    ok, metrics = match_semre(r, w, oracle)
    print(f"\npath graph, {name}: match={ok} (calls={metrics.oracle_calls})")
