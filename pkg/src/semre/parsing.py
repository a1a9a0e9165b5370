r"""Concrete syntax for oracle-refined regular expressions.

Grammar (loosest to tightest binding):

    pattern  :=  concat ('|' concat)*
    concat   :=  postfix*                    -- empty concat is the empty string
    postfix  :=  atom ('*' | '+' | '?' | '{i,j}' | '&<name>')*
    atom     :=  char | escape | '.' | class | '(' pattern ')'
              |  '%empty%' | '<name>' | '<+name>'

`.` matches any alphabet byte.  Classes are `[...]` / `[^...]` with `-`
ranges.  `&<name>` refines the preceding atom or group by the oracle query
`name`; bare `<name>` abbreviates `.*&<name>` and `<+name>` abbreviates
`.+&<name>`.  The empty language is spelled `%empty%`; a lone `%` is
literal.  `r?`, `r+` and `r{i,j}` are sugar and are expanded during
parsing, so parse results only ever use the seven core constructors.

Escapes: `\n \t \\ \. \| \( \) \[ \] \< \> \{ \} \^ \-`.  Anything else
after a backslash is an error.  Literal `* + ? & %` are written as the
one-element classes `[*]` and so on.
"""

from __future__ import annotations

from typing import List, Tuple

from .patterns import (
    ANY_CHAR,
    Alt,
    Cat,
    CharSet,
    Empty,
    Epsilon,
    Lit,
    Pattern,
    Refine,
    Star,
)

_ESCAPES = {
    "n": "\n",
    "t": "\t",
    "\\": "\\",
    ".": ".",
    "|": "|",
    "(": "(",
    ")": ")",
    "[": "[",
    "]": "]",
    "<": "<",
    ">": ">",
    "{": "{",
    "}": "}",
    "^": "^",
    "-": "-",
}
_UNESCAPES = {v: k for k, v in _ESCAPES.items()}

# Characters that always terminate or structure an atom.  `] } > %` are
# ordinary literals outside their constructs, mirroring grep leniency.
_SPECIAL = set("\\|*+?()[<{.&")

# No escape exists for these, so the printer falls back to a class form.
_CLASS_ONLY = set("*+?&%")

_MAX_GROUP_DEPTH = 200


class ParseError(ValueError):
    """Pattern syntax error carrying the offending byte offset."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset
        self.reason = message


def expand_optional(r: Pattern) -> Pattern:
    """r? == r or the empty string."""
    return Alt(r, Epsilon())


def expand_plus(r: Pattern) -> Pattern:
    """r+ == one copy of r followed by any number more."""
    return Cat(r, Star(r))


def expand_repeat(r: Pattern, lo: int, hi: int) -> Pattern:
    """r{lo,hi} == the alternation of the lo-th through hi-th powers of r."""
    if lo > hi:
        raise ValueError("repetition bounds out of order")

    def power(k: int) -> Pattern:
        if k == 0:
            return Epsilon()
        acc = r
        for _ in range(k - 1):
            acc = Cat(acc, r)
        return acc

    out = power(lo)
    for k in range(lo + 1, hi + 1):
        out = Alt(out, power(k))
    return out


def expand_query_shorthand(name: str) -> Pattern:
    """<name> == any string, refined by the query."""
    return Refine(Star(Lit(ANY_CHAR)), name)


def expand_nonempty_query_shorthand(name: str) -> Pattern:
    """<+name> == any nonempty string, refined by the query."""
    return Refine(Cat(Lit(ANY_CHAR), Star(Lit(ANY_CHAR))), name)


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.depth = 0

    def error(self, message: str, offset: int = -1) -> ParseError:
        return ParseError(message, self.pos if offset < 0 else offset)

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self) -> str:
        c = self.peek()
        self.pos += 1
        return c

    def byte_at(self, c: str, offset: int) -> int:
        code = ord(c)
        if code > 0xFF:
            raise self.error("character out of byte range", offset)
        return code

    # pattern := concat ('|' concat)*
    def alternation(self) -> Pattern:
        out = self.concat()
        while self.peek() == "|":
            self.take()
            out = Alt(out, self.concat())
        return out

    def concat(self) -> Pattern:
        items: List[Pattern] = []
        while True:
            c = self.peek()
            if c == "" or c == "|" or c == ")":
                break
            items.append(self.postfix())
        if not items:
            return Epsilon()
        out = items[0]
        for item in items[1:]:
            out = Cat(out, item)
        return out

    def postfix(self) -> Pattern:
        out = self.atom()
        while True:
            c = self.peek()
            if c == "*":
                self.take()
                out = Star(out)
            elif c == "+":
                self.take()
                out = expand_plus(out)
            elif c == "?":
                self.take()
                out = expand_optional(out)
            elif c == "{":
                out = self.repeat(out)
            elif c == "&":
                start = self.pos
                self.take()
                if self.peek() != "<":
                    raise self.error("expected '<' after '&'", start)
                self.take()
                out = Refine(out, self.query_name(start))
            else:
                return out

    def repeat(self, operand: Pattern) -> Pattern:
        start = self.pos
        self.take()  # '{'
        lo = self.number()
        if self.peek() != ",":
            raise self.error("expected ',' in repetition bounds")
        self.take()
        hi = self.number()
        if self.peek() != "}":
            raise self.error("expected '}' closing repetition bounds")
        self.take()
        if lo > hi:
            raise self.error("repetition bounds out of order", start)
        return expand_repeat(operand, lo, hi)

    def number(self) -> int:
        start = self.pos
        while self.peek().isdigit():
            self.take()
        if self.pos == start:
            raise self.error("expected a number")
        return int(self.text[start : self.pos])

    def query_name(self, start: int) -> str:
        # caller has consumed the opening '<'
        name_start = self.pos
        while True:
            c = self.peek()
            if c == "":
                raise self.error("unterminated query name", start)
            if c == ">":
                break
            self.take()
        name = self.text[name_start : self.pos]
        self.take()  # '>'
        if not name:
            raise self.error("empty query name", start)
        return name

    def atom(self) -> Pattern:
        start = self.pos
        c = self.peek()
        if c == "":
            raise self.error("expected a pattern atom")
        if c in "*+?":
            raise self.error("nothing to repeat")
        if c == "|" or c == ")":
            raise self.error("expected a pattern atom")
        if c == "(":
            self.take()
            self.depth += 1
            if self.depth > _MAX_GROUP_DEPTH:
                raise self.error("groups nested too deeply", start)
            inner = self.alternation()
            if self.peek() != ")":
                raise self.error("unbalanced '('", start)
            self.take()
            self.depth -= 1
            return inner
        if c == ".":
            self.take()
            return Lit(ANY_CHAR)
        if c == "[":
            return self.char_class()
        if c == "<":
            self.take()
            name = self.query_name(start)
            if name.startswith("+"):
                if len(name) == 1:
                    raise self.error("empty query name", start)
                return expand_nonempty_query_shorthand(name[1:])
            return expand_query_shorthand(name)
        if c == "%":
            if self.text.startswith("%empty%", self.pos):
                self.pos += len("%empty%")
                return Empty()
            self.take()
            return Lit(CharSet(frozenset([ord("%")])))
        if c == "\\":
            self.take()
            esc = self.peek()
            if esc not in _ESCAPES:
                raise self.error("unknown escape", start)
            self.take()
            return Lit(CharSet(frozenset([ord(_ESCAPES[esc])])))
        if c == "&" or c == "{":
            raise self.error(f"'{c}' must follow an atom", start)
        self.take()
        return Lit(CharSet(frozenset([self.byte_at(c, start)])))

    def class_char(self) -> int:
        start = self.pos
        c = self.take()
        if c == "\\":
            esc = self.peek()
            if esc not in _ESCAPES:
                raise self.error("unknown escape", start)
            self.take()
            return ord(_ESCAPES[esc])
        return self.byte_at(c, start)

    def char_class(self) -> Pattern:
        start = self.pos
        self.take()  # '['
        negated = False
        if self.peek() == "^":
            self.take()
            negated = True
        members = set()
        while True:
            c = self.peek()
            if c == "":
                raise self.error("unterminated character class", start)
            if c == "]":
                self.take()
                break
            lo = self.class_char()
            if (
                self.peek() == "-"
                and self.pos + 1 < len(self.text)
                and self.text[self.pos + 1] != "]"
            ):
                dash_at = self.pos
                self.take()
                hi = self.class_char()
                if lo > hi:
                    raise self.error("bad character range", dash_at)
                members.update(range(lo, hi + 1))
            else:
                members.add(lo)
        return Lit(CharSet(frozenset(members), negated))


def parse_semre(text: str) -> Pattern:
    """Parse pattern text, expanding all sugar into the core constructors."""
    p = _Parser(text)
    out = p.alternation()
    if p.pos != len(text):
        raise p.error("unbalanced ')'" if p.peek() == ")" else "trailing input")
    return out


def _escape_char(b: int) -> str:
    c = chr(b)
    if c in _UNESCAPES:
        return "\\" + _UNESCAPES[c]
    return c


def _class_item(b: int) -> str:
    c = chr(b)
    if c in "]\\^-":
        return "\\" + _UNESCAPES[c]
    if c in "\n\t":
        return "\\" + _UNESCAPES[c]
    return c


def charset_to_text(cs: CharSet) -> str:
    if cs.negated and not cs.chars:
        return "."
    if not cs.negated and len(cs.chars) == 1:
        (b,) = cs.chars
        if chr(b) in _CLASS_ONLY:
            return "[" + chr(b) + "]"
        return _escape_char(b)
    # general class form, with runs of three or more collapsed to ranges
    items: List[str] = []
    ordered = sorted(cs.chars)
    i = 0
    while i < len(ordered):
        j = i
        while j + 1 < len(ordered) and ordered[j + 1] == ordered[j] + 1:
            j += 1
        if j - i >= 2:
            items.append(_class_item(ordered[i]) + "-" + _class_item(ordered[j]))
        else:
            items.extend(_class_item(b) for b in ordered[i : j + 1])
        i = j + 1
    return "[" + ("^" if cs.negated else "") + "".join(items) + "]"


# precedence levels used by the printer
_ALT, _CAT, _POSTFIX, _ATOM = 0, 1, 2, 3


def _node_level(p: Pattern) -> int:
    if isinstance(p, Alt):
        return _ALT
    if isinstance(p, Cat):
        return _CAT
    if isinstance(p, (Star, Refine)):
        return _POSTFIX
    return _ATOM


def to_text(p: Pattern) -> str:
    """Pretty-print a core AST in the concrete syntax.

    Inverse of parse_semre up to structural equality.  Iterative so that
    deep concatenation chains do not overflow the stack.
    """
    parts: List[str] = []
    stack: List[object] = [(p, _ALT)]
    while stack:
        item = stack.pop()
        if isinstance(item, str):
            parts.append(item)
            continue
        node, required = item
        wrap = _node_level(node) < required
        if wrap:
            parts.append("(")
            stack.append(")")
        if isinstance(node, Empty):
            parts.append("%empty%")
        elif isinstance(node, Epsilon):
            parts.append("()")
        elif isinstance(node, Lit):
            parts.append(charset_to_text(node.chars))
        elif isinstance(node, Alt):
            stack.append((node.right, _CAT))
            stack.append("|")
            stack.append((node.left, _ALT))
        elif isinstance(node, Cat):
            stack.append((node.right, _POSTFIX))
            stack.append((node.left, _CAT))
        elif isinstance(node, Star):
            stack.append("*")
            stack.append((node.inner, _POSTFIX))
        else:
            if ">" in node.query:
                raise ValueError("query name cannot contain '>'")
            stack.append(f"&<{node.query}>")
            stack.append((node.inner, _POSTFIX))
    return "".join(parts)
