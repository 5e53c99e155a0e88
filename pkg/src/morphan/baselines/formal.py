"""Exact formal analogy test: a:b::c:d iff the shuffles of (a, d) and (b, c) intersect."""
from __future__ import annotations

from collections import Counter

from .. import kernels
from ..classifier import INVALID, VALID


def counts_balance(a: str, b: str, c: str, d: str) -> bool:
    """Necessary condition: every character occurs as often in a+d as in b+c."""
    return Counter(a) + Counter(d) == Counter(b) + Counter(c)


def is_formal_analogy(a: str, b: str, c: str, d: str) -> bool:
    if not counts_balance(a, b, c, d):
        return False
    return kernels.shuffle_intersect(a, b, c, d)


def formal_classify(a: str, b: str, c: str, d: str) -> str:
    return VALID if is_formal_analogy(a, b, c, d) else INVALID
