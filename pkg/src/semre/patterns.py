"""Syntax trees for oracle-refined regular expressions.

A pattern is a classical regular expression over bytes extended with one
extra constructor: ``Refine(r, q)`` restricts the language of ``r`` to the
strings that an external oracle accepts for the query named ``q``.
Refinements may nest.

Trees are immutable and safe to share across threads.  Helper functions
walk trees with explicit stacks so that very deep patterns (long literal
concatenations, expanded repetitions) do not hit the interpreter's
recursion limit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Tuple, Union

# Matching is byte-oriented.  The default universe is 7-bit ASCII, which is
# what the line filters of the CLI assume; callers may widen to 256.
ASCII_ALPHABET = 128
BYTE_ALPHABET = 256


@dataclass(frozen=True)
class CharSet:
    """A set of byte values, stored directly or as a complement.

    ``negated=True`` means "every alphabet byte except ``chars``", so the
    full-alphabet set stays cheap no matter how wide the alphabet is.
    """

    chars: frozenset
    negated: bool = False

    def contains(self, byte: int) -> bool:
        return (byte in self.chars) != self.negated

    def members(self, alphabet_size: int) -> Iterator[int]:
        for b in range(alphabet_size):
            if self.contains(b):
                yield b

    def is_empty(self, alphabet_size: int) -> bool:
        return not any(True for _ in self.members(alphabet_size))


ANY_CHAR = CharSet(frozenset(), negated=True)


def char_set(text: str) -> CharSet:
    """Character set containing exactly the bytes of ``text`` (latin-1)."""
    return CharSet(frozenset(text.encode("latin-1")))


@dataclass(frozen=True)
class Empty:
    """The empty language."""


@dataclass(frozen=True)
class Epsilon:
    """The language containing only the empty string."""


@dataclass(frozen=True)
class Lit:
    chars: CharSet


@dataclass(frozen=True)
class Alt:
    left: "Pattern"
    right: "Pattern"


@dataclass(frozen=True)
class Cat:
    left: "Pattern"
    right: "Pattern"


@dataclass(frozen=True)
class Star:
    inner: "Pattern"


@dataclass(frozen=True)
class Refine:
    inner: "Pattern"
    query: str


Pattern = Union[Empty, Epsilon, Lit, Alt, Cat, Star, Refine]


def children(p: Pattern) -> Tuple[Pattern, ...]:
    if isinstance(p, (Alt, Cat)):
        return (p.left, p.right)
    if isinstance(p, (Star, Refine)):
        return (p.inner,)
    return ()


def iter_nodes(p: Pattern) -> Iterator[Pattern]:
    """Pre-order traversal over every node occurrence."""
    stack = [p]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(children(node)))


def size(p: Pattern) -> int:
    """Number of AST nodes; the size parameter of the complexity bounds."""
    return sum(1 for _ in iter_nodes(p))


def depth(p: Pattern) -> int:
    """Height of the tree (a single node has depth 1)."""
    best = 0
    stack = [(p, 1)]
    while stack:
        node, d = stack.pop()
        kids = children(node)
        if not kids:
            best = max(best, d)
        for k in kids:
            stack.append((k, d + 1))
    return best


def queries(p: Pattern) -> Tuple[str, ...]:
    """Query names in first-occurrence order, deduplicated."""
    seen = []
    for node in iter_nodes(p):
        if isinstance(node, Refine) and node.query not in seen:
            seen.append(node.query)
    return tuple(seen)


def skeleton(p: Pattern) -> Pattern:
    """Strip every refinement, leaving the classical regular expression.

    Refine(r, q) maps to skeleton(r); all other constructors map
    structurally.  Idempotent.
    """
    # Post-order rebuild keyed by object identity; shared subtrees are
    # rebuilt once.
    done: dict = {}
    stack = [(p, False)]
    while stack:
        node, expanded = stack.pop()
        if id(node) in done:
            continue
        kids = children(node)
        if kids and not expanded:
            stack.append((node, True))
            stack.extend((k, False) for k in kids)
            continue
        if isinstance(node, Alt):
            done[id(node)] = Alt(done[id(node.left)], done[id(node.right)])
        elif isinstance(node, Cat):
            done[id(node)] = Cat(done[id(node.left)], done[id(node.right)])
        elif isinstance(node, Star):
            done[id(node)] = Star(done[id(node.inner)])
        elif isinstance(node, Refine):
            done[id(node)] = done[id(node.inner)]
        else:
            done[id(node)] = node
    return done[id(p)]


def equal(a: Pattern, b: Pattern) -> bool:
    """Structural equality that survives arbitrarily deep trees.

    The generated dataclass ``__eq__`` recurses per level and can blow the
    stack on long concatenation chains, so comparisons go through an
    explicit worklist instead.
    """
    work = [(a, b)]
    while work:
        x, y = work.pop()
        if x is y:
            continue
        if type(x) is not type(y):
            return False
        if isinstance(x, Lit):
            if x.chars != y.chars:
                return False
        elif isinstance(x, Refine):
            if x.query != y.query:
                return False
            work.append((x.inner, y.inner))
        elif isinstance(x, (Alt, Cat)):
            work.append((x.left, y.left))
            work.append((x.right, y.right))
        elif isinstance(x, Star):
            work.append((x.inner, y.inner))
    return True
