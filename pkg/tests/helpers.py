"""Shared strategies and independent oracles for the test-suite."""

import base64
import hashlib
import itertools
import json
import re

from hypothesis import strategies as st

from abesd.policy import And, Leaf, Or

ATTR_POOL = ("A", "B", "C", "D", "E", "F")


def policy_trees(pool=ATTR_POOL, max_gate_levels=3):
    """Random monotone trees with at most ``max_gate_levels`` nested gates."""

    def build(level):
        leaf = st.sampled_from(pool).map(Leaf)
        if level == 0:
            return leaf
        sub = build(level - 1)
        gate = st.tuples(st.sampled_from((And, Or)), st.lists(sub, min_size=2, max_size=3)).map(
            lambda kc: kc[0](*kc[1])
        )
        return st.one_of(leaf, gate)

    return build(max_gate_levels)


attr_subsets = st.frozensets(st.sampled_from(ATTR_POOL), max_size=len(ATTR_POOL))

_WORD = re.compile(r"[A-Za-z0-9_:.\-]+")


def oracle_satisfies(policy_text: str, attrs) -> bool:
    """Evaluate policy *text* with Python's own boolean operators.

    Python's ``and`` also binds tighter than ``or``, so substituting each
    attribute with True/False gives an evaluation that shares no code with
    the library's parser or tree walker.
    """

    def sub(m):
        word = m.group(0)
        if word.lower() in ("and", "or"):
            return word.lower()
        return "True" if word in attrs else "False"

    expr = _WORD.sub(sub, policy_text)
    return bool(eval(expr, {"__builtins__": {}}, {}))  # noqa: S307 - expr is only True/False/and/or/()


def brute_force_minimal_sets(policy_text: str, pool=ATTR_POOL):
    """All attribute subsets of ``pool`` that satisfy the policy text."""
    out = []
    for r in range(len(pool) + 1):
        for combo in itertools.combinations(pool, r):
            if oracle_satisfies(policy_text, set(combo)):
                out.append(frozenset(combo))
    return out


def oracle_b64url(data: bytes) -> str:
    return base64.urlsafe_b64encode(data).decode("ascii").rstrip("=")


def oracle_digest(disclosure_text: str) -> str:
    return oracle_b64url(hashlib.sha256(disclosure_text.encode("ascii")).digest())


def oracle_disclosure(salt: bytes, name: str, value) -> str:
    body = json.dumps([oracle_b64url(salt), name, value], separators=(",", ":"), ensure_ascii=False)
    return oracle_b64url(body.encode("utf-8"))


# criterion number -> (passed, detail), filled in by test_acceptance
ACCEPTANCE = {}


class criterion:
    """Record a pass/fail line for an acceptance criterion, re-raising failures."""

    def __init__(self, number: int, title: str):
        self.number, self.title, self.detail = number, title, ""

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        ok = exc_type is None
        detail = self.detail if ok else f"{exc_type.__name__}: {str(exc).splitlines()[0] if str(exc) else ''}"
        ACCEPTANCE[self.number] = (ok, f"{self.title} ({detail})" if detail else self.title)
        return False
