"""Equivalent and invalid forms of an analogy, and training/evaluation example sets.

Order of the equivalent forms (fixed, so that runs are reproducible)::

    A:B::C:D  C:D::A:B  A:C::B:D  B:A::D:C
    D:B::C:A  D:C::B:A  C:A::D:B  B:D::A:C

Base invalid forms: ``B:A::C:D``, ``C:B::A:D``, ``A:A::C:D``.
"""
from __future__ import annotations

from dataclasses import dataclass

from .corpus import INVALID, VALID, AnalogyQuadruple

# index permutations applied to (a, b, c, d)
EQUIVALENT_PERMUTATIONS = (
    (0, 1, 2, 3),
    (2, 3, 0, 1),
    (0, 2, 1, 3),
    (1, 0, 3, 2),
    (3, 1, 2, 0),
    (3, 2, 1, 0),
    (2, 0, 3, 1),
    (1, 3, 0, 2),
)
NEGATIVE_PERMUTATIONS = (
    (1, 0, 2, 3),
    (2, 1, 0, 3),
    (0, 0, 2, 3),
)


def _permute(q: AnalogyQuadruple, perm, label: int) -> AnalogyQuadruple:
    w = q.words
    return AnalogyQuadruple(w[perm[0]], w[perm[1]], w[perm[2]], w[perm[3]], label)


def symmetry(q: AnalogyQuadruple) -> AnalogyQuadruple:
    return _permute(q, (2, 3, 0, 1), q.label)


def central_permutation(q: AnalogyQuadruple) -> AnalogyQuadruple:
    return _permute(q, (0, 2, 1, 3), q.label)


def equivalent_forms(q: AnalogyQuadruple) -> list[AnalogyQuadruple]:
    return [_permute(q, p, VALID) for p in EQUIVALENT_PERMUTATIONS]


def negative_forms(q: AnalogyQuadruple) -> list[AnalogyQuadruple]:
    return [_permute(q, p, INVALID) for p in NEGATIVE_PERMUTATIONS]


def eval_negative_forms(q: AnalogyQuadruple) -> list[AnalogyQuadruple]:
    """The 24 invalid forms: the 8 equivalent forms of each base invalid form."""
    return [f.relabel(INVALID) for n in negative_forms(q) for f in equivalent_forms(n)]


def round_robin_negatives(q: AnalogyQuadruple, count: int = 8) -> list[AnalogyQuadruple]:
    """``count`` invalid forms taken round-robin over the three base invalid forms' equivalents.

    With ``count=8`` this is the three base forms followed by the symmetric form
    of each, then the central permutation of the first two.
    """
    groups = [[f.relabel(INVALID) for f in equivalent_forms(n)] for n in negative_forms(q)]
    order = [groups[g][i] for i in range(8) for g in range(3)]
    return order[:count]


@dataclass
class AugmentedSet:
    origin: AnalogyQuadruple
    positives: list
    negatives: list

    @property
    def examples(self) -> list[AnalogyQuadruple]:
        return self.positives + self.negatives


def _drop_conflicts(positives, negatives):
    seen = {p.words for p in positives}
    return [n for n in negatives if n.words not in seen]


def augment_for_training(q: AnalogyQuadruple, neg_forms_per_base: int = 3,
                         dedup_conflicts: bool = False) -> AugmentedSet:
    positives = equivalent_forms(q)
    if neg_forms_per_base == 3:
        negatives = negative_forms(q)
    elif neg_forms_per_base == 8:
        negatives = round_robin_negatives(q, 8)
    else:
        raise ValueError(f"neg_forms_per_base must be 3 or 8, got {neg_forms_per_base}")
    if dedup_conflicts:
        negatives = _drop_conflicts(positives, negatives)
    return AugmentedSet(q, positives, negatives)


def augment_for_eval(q: AnalogyQuadruple, dedup_conflicts: bool = False) -> AugmentedSet:
    positives = equivalent_forms(q)
    negatives = eval_negative_forms(q)
    if dedup_conflicts:
        negatives = _drop_conflicts(positives, negatives)
    return AugmentedSet(q, positives, negatives)
