"""Description-length solver over infix-preserving rewrite rules.

A rule is read off a factorization ``a = pa + I + sa``, ``b = pb + I + sb``
where ``I`` is a common substring (possibly empty). Applied to
``c = pa + M + sa`` it yields ``x = pb + M + sb``. Its cost in bits is

* 2 bits for each edit slot (prefix, suffix) whose two sides differ;
* ``ceil(log2 |S|)`` bits per literal character, S being the alphabet of
  a, b and c: both sides of an active slot, one side of an unchanged but
  non-empty slot (the context the rule requires).

A candidate scores the cheapest rule producing it.
"""
from __future__ import annotations

import math

from .. import kernels
from .ranked import RankedSolutions, decide_top_k

SLOT_BITS = 2


def bits_per_literal(a: str, b: str, c: str) -> int:
    return max(1, math.ceil(math.log2(max(len(set(a + b + c)), 1))))


def rule_cost(pa: str, pb: str, sa: str, sb: str, literal_bits: int) -> int:
    cost = 0
    for x, y in ((pa, pb), (sa, sb)):
        if x != y:
            cost += SLOT_BITS + literal_bits * (len(x) + len(y))
        else:
            cost += literal_bits * len(x)
    return cost


def apply_rule(pa: str, pb: str, sa: str, sb: str, c: str):
    """``pb + M + sb`` when ``c == pa + M + sa``, else None."""
    if len(pa) + len(sa) > len(c) or not c.startswith(pa) or not c.endswith(sa):
        return None
    return pb + c[len(pa):len(c) - len(sa)] + sb


def factorizations(a: str, b: str):
    """Yield every ``(pa, pb, sa, sb)`` with a common (possibly empty) infix."""
    ext = kernels.common_extension(a, b)
    for i in range(len(a) + 1):
        for j in range(len(b) + 1):
            for length in range(int(ext[i, j]) + 1):
                yield a[:i], b[:j], a[i + length:], b[j + length:]


def mdl_solve(a: str, b: str, c: str) -> RankedSolutions:
    literal_bits = bits_per_literal(a, b, c)
    best: dict[str, int] = {}
    for pa, pb, sa, sb in factorizations(a, b):
        x = apply_rule(pa, pb, sa, sb, c)
        if x is None:
            continue
        cost = rule_cost(pa, pb, sa, sb, literal_bits)
        if cost < best.get(x, cost + 1):
            best[x] = cost
    return RankedSolutions.from_scores(best, ascending=True)


def kolmo_classify(a: str, b: str, c: str, d: str, k: int = 1) -> str:
    return decide_top_k(mdl_solve(a, b, c), d, k)
