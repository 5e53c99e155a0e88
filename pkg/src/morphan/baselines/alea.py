"""Monte-Carlo solver: interleave b and c at random, then delete a as a subsequence.

Each trial consumes ``2 * (len(b) + len(c))`` uniforms drawn up front with
numpy, so the compiled and pure-Python kernels see identical randomness and
return identical candidates. The subsequence to delete is chosen uniformly
among all embeddings of ``a`` by sampling left to right with embedding counts.
"""
from __future__ import annotations

from collections import Counter

import numpy as np

from .. import kernels
from .ranked import RankedSolutions, decide_top_k

DEFAULT_RHO = 1000


def alea_solve(a: str, b: str, c: str, rho: int = DEFAULT_RHO, seed: int = 0) -> RankedSolutions:
    """Candidates ranked by how many of the ``rho`` trials produced them."""
    if rho < 1:
        raise ValueError("rho must be >= 1")
    n = len(b) + len(c)
    if n < len(a):
        return RankedSolutions((), ascending=False)
    u = np.random.default_rng(seed).random((rho, 2 * n))
    counts = Counter(x for x in kernels.alea_trials(a, b, c, u) if x is not None)
    return RankedSolutions.from_scores(dict(counts), ascending=False)


def alea_classify(a: str, b: str, c: str, d: str, k: int = 1, rho: int = DEFAULT_RHO, seed: int = 0) -> str:
    return decide_top_k(alea_solve(a, b, c, rho, seed), d, k)
