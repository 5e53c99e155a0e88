"""Symbolic baselines usable as deciders in the evaluation protocol."""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

from .alea import DEFAULT_RHO, alea_classify, alea_solve
from .formal import counts_balance, formal_classify, is_formal_analogy
from .mdl import kolmo_classify, mdl_solve
from .ranked import RankedSolutions, check_k

METHODS = ("alea", "kolmo", "formal")
RESULTS_HEADER = ["quadruple", "method", "k", "decision", "score"]

__all__ = [
    "DEFAULT_RHO", "METHODS", "RESULTS_HEADER", "BaselineDecider", "RankedSolutions", "alea_classify",
    "alea_solve", "counts_balance", "formal_classify", "is_formal_analogy", "kolmo_classify", "mdl_solve",
    "run_baseline", "write_results",
]


@dataclass
class BaselineDecider:
    """Wraps one baseline as a decider; ``last_score`` is the score given to ``d`` (None if absent)."""

    method: str
    k: int = 1
    rho: int = DEFAULT_RHO
    seed: int = 0

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown baseline {self.method!r}; choose from {METHODS}")
        if self.method != "formal":
            check_k(self.k)

    def decide(self, q) -> tuple[str, object]:
        a, b, c, d = q.words if hasattr(q, "words") else q
        if self.method == "formal":
            ok = is_formal_analogy(a, b, c, d)
            return ("valid" if ok else "invalid"), None
        sols = alea_solve(a, b, c, self.rho, self.seed) if self.method == "alea" else mdl_solve(a, b, c)
        decision = "valid" if d in sols.top(self.k) else "invalid"
        return decision, sols.score_of(d)

    def __call__(self, q) -> str:
        return self.decide(q)[0]


def run_baseline(quads, method: str, k: int = 1, rho: int = DEFAULT_RHO, seed: int = 0) -> list[list[str]]:
    """Rows of the results CSV for every quadruple."""
    decider = BaselineDecider(method, k, rho, seed)
    rows = []
    for q in quads:
        decision, score = decider.decide(q)
        words = q.words if hasattr(q, "words") else tuple(q)
        rows.append([":".join(words[:2]) + "::" + ":".join(words[2:]), method,
                     "" if method == "formal" else str(k), decision, "" if score is None else str(score)])
    return rows


def write_results(rows, path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RESULTS_HEADER)
        w.writerows(rows)
