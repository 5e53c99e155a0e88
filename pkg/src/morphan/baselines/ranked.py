"""Ranked candidate lists shared by the generative solvers."""
from __future__ import annotations

from dataclasses import dataclass

from ..classifier import INVALID, VALID


@dataclass(frozen=True)
class RankedSolutions:
    """Candidates best-first. ``ascending`` is True when a lower score is better."""

    items: tuple = ()
    ascending: bool = False

    def __post_init__(self):
        object.__setattr__(self, "items", tuple((str(w), s) for w, s in self.items))

    @classmethod
    def from_scores(cls, scores: dict, ascending: bool) -> "RankedSolutions":
        sign = 1 if ascending else -1
        return cls(tuple(sorted(scores.items(), key=lambda kv: (sign * kv[1], kv[0]))), ascending)

    def __len__(self):
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def __getitem__(self, i):
        return self.items[i]

    @property
    def words(self) -> list[str]:
        return [w for w, _ in self.items]

    def top(self, k: int) -> list[str]:
        return self.words[:k]

    def score_of(self, word: str):
        for w, s in self.items:
            if w == word:
                return s
        return None

    def rank_of(self, word: str):
        """1-based rank of ``word`` or None."""
        for i, (w, _) in enumerate(self.items):
            if w == word:
                return i + 1
        return None


def check_k(k: int):
    if not 1 <= k <= 10:
        raise ValueError(f"k must lie in 1..10, got {k}")


def decide_top_k(solutions: RankedSolutions, d: str, k: int) -> str:
    check_k(k)
    return VALID if d in solutions.top(k) else INVALID
