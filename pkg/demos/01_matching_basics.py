from semre.engine import SemreMatcher, match_semre
from semre.oracles import FunctionOracle, builtin_oracle
from semre.parsing import parse_semre, to_text
from semre.patterns import skeleton

# A pattern is ordinary regex syntax plus refinements: r&<q> matches a
# window only when the classical part r matches it AND the oracle
# answers true for query q on that window.  A bare <q> abbreviates
# .*&<q>, i.e. "any window the oracle likes".
r = parse_semre(".*a<pal>")
print("pattern:", to_text(r))

# The oracle is any callable deciding (query, window) pairs.  Here:
# does the window read the same forwards and backwards?
pal = builtin_oracle("palindrome")

# "babccb" factors as b . a . bccb, and "bccb" is a palindrome.
print("babccb ->", match_semre(r, "babccb", pal)[0])
# "bacbcb": no split puts a palindrome after an 'a'.
print("bacbcb ->", match_semre(r, "bacbcb", pal)[0])

# Compile once when matching many lines; match() also reports metrics.
matcher = SemreMatcher(r, pal)
for w in ["aa", "baab", "ab", "a", ""]:
    ok, m = matcher.match(w)
    print(f"{w!r:8} matched={ok!s:5} oracle_calls={m.oracle_calls}"
          f" submitted_chars={m.submitted_chars}")

# Refinements nest.  The engine asks only about windows that the
# classical structure can actually produce; watch which ones.
nested = parse_semre(".*a(.*b<q2>)&<q>")
asked = []
spy = FunctionOracle(lambda q, s: asked.append((q, s)) or True)
print("\nnested:", to_text(nested), "on babcbc ->",
      match_semre(nested, "babcbc", spy)[0])
for q, s in asked:
    print(f"  asked {q}({s!r})")

# Erasing every refinement leaves the classical skeleton, an ordinary
# regex; with an always-true oracle both match exactly the same lines.
print("\nskeleton:", to_text(skeleton(nested)))
