"""Monotone AND/OR access policies over attribute names.

Grammar (``and`` binds tighter than ``or``; keywords are case-insensitive)::

    expr   := term ("or" term)*
    term   := factor ("and" factor)*
    factor := ATTR | "(" expr ")"

Trees are kept in canonical form: a gate never has a child gate of the same
kind (``(A and B) and C`` is stored as one three-way AND), so parsing the
serialization of any policy gives back an equal tree.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Union

from .errors import EmptyPolicy, InvalidAttributeName, PolicySyntaxError

AND = "and"
OR = "or"

_ATTR_RE = re.compile(r"[A-Za-z0-9_:.\-]+")
_KEYWORDS = {AND, OR}


def check_attribute(name: str) -> str:
    if not isinstance(name, str) or not _ATTR_RE.fullmatch(name):
        raise InvalidAttributeName(f"invalid attribute name {name!r}")
    if name.lower() in _KEYWORDS:
        raise InvalidAttributeName(f"{name!r} is a reserved word")
    return name


def attribute_set(names: Iterable[str]) -> frozenset[str]:
    """Validate names and return them as an ``AttributeSet`` (a frozenset)."""
    if isinstance(names, str):
        raise TypeError("attribute_set expects an iterable of names, not a string")
    return frozenset(check_attribute(n) for n in names)


@dataclass(frozen=True)
class Leaf:
    attr: str

    def __post_init__(self):
        check_attribute(self.attr)


@dataclass(frozen=True)
class Gate:
    kind: str
    children: tuple

    def __post_init__(self):
        if self.kind not in _KEYWORDS:
            raise ValueError(f"gate kind must be 'and' or 'or', not {self.kind!r}")
        flat = []
        for child in self.children:
            if not isinstance(child, (Leaf, Gate)):
                raise TypeError(f"policy child must be Leaf or Gate, got {type(child).__name__}")
            if isinstance(child, Gate) and child.kind == self.kind:
                flat.extend(child.children)
            else:
                flat.append(child)
        if len(flat) < 2:
            raise ValueError("a gate needs at least two children")
        object.__setattr__(self, "children", tuple(flat))


Policy = Union[Leaf, Gate]


def And(*children: Policy) -> Gate:
    return Gate(AND, tuple(children))


def Or(*children: Policy) -> Gate:
    return Gate(OR, tuple(children))


# --- parsing -----------------------------------------------------------------

_TOKEN_RE = re.compile(r"\s*(?:(?P<lp>\()|(?P<rp>\))|(?P<word>[A-Za-z0-9_:.\-]+)|(?P<bad>\S))")


def _tokenize(text: str):
    tokens = []
    pos = 0
    while True:
        m = _TOKEN_RE.match(text, pos)
        if not m:
            break
        start = m.start(m.lastgroup)
        value = m.group(m.lastgroup)
        if m.lastgroup == "bad":
            raise PolicySyntaxError(start, "attribute, '(' or ')'", text)
        if m.lastgroup == "word" and value.lower() in _KEYWORDS:
            tokens.append((value.lower(), value, start))
        else:
            tokens.append((m.lastgroup, value, start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expr(self) -> Policy:
        terms = [self.term()]
        while self.peek()[0] == OR:
            self.take()
            terms.append(self.term())
        return terms[0] if len(terms) == 1 else Gate(OR, tuple(terms))

    def term(self) -> Policy:
        factors = [self.factor()]
        while self.peek()[0] == AND:
            self.take()
            factors.append(self.factor())
        return factors[0] if len(factors) == 1 else Gate(AND, tuple(factors))

    def factor(self) -> Policy:
        kind, value, pos = self.take()
        if kind == "word":
            return Leaf(value)
        if kind == "lp":
            inner = self.expr()
            kind, _, pos = self.take()
            if kind != "rp":
                raise PolicySyntaxError(pos, "')'", self.text)
            return inner
        raise PolicySyntaxError(pos, "attribute or '('", self.text)


def parse_policy(text: str) -> Policy:
    """Parse policy text into a canonical tree.

    >>> parse_policy("A and B")
    Gate(kind='and', children=(Leaf(attr='A'), Leaf(attr='B')))
    """
    if not isinstance(text, str):
        raise TypeError("policy text must be str")
    if not text.strip():
        raise EmptyPolicy("policy text is blank")
    parser = _Parser(text)
    tree = parser.expr()
    kind, _, pos = parser.peek()
    if kind != "end":
        raise PolicySyntaxError(pos, "'and', 'or' or end of input", text)
    return tree


# --- serialization and evaluation --------------------------------------------

def serialize_policy(policy: Policy) -> str:
    if isinstance(policy, Leaf):
        return policy.attr
    parts = []
    for child in policy.children:
        s = serialize_policy(child)
        if isinstance(child, Gate) and child.kind != policy.kind:
            s = f"({s})"
        parts.append(s)
    return f" {policy.kind} ".join(parts)


def satisfies(policy: Policy, attrs: Iterable[str]) -> bool:
    if not isinstance(attrs, (set, frozenset)):
        attrs = frozenset(attrs)
    return _eval(policy, attrs)


def _eval(node: Policy, attrs) -> bool:
    if isinstance(node, Leaf):
        return node.attr in attrs
    if node.kind == AND:
        return all(_eval(c, attrs) for c in node.children)
    return any(_eval(c, attrs) for c in node.children)


def leaves(policy: Policy) -> list[str]:
    """Attribute names of all leaves, left to right (duplicates kept)."""
    if isinstance(policy, Leaf):
        return [policy.attr]
    out = []
    for child in policy.children:
        out.extend(leaves(child))
    return out


def depth(policy: Policy) -> int:
    if isinstance(policy, Leaf):
        return 1
    return 1 + max(depth(c) for c in policy.children)


def as_policy(policy: Policy | str) -> Policy:
    return parse_policy(policy) if isinstance(policy, str) else policy
