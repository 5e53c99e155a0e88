"""Seeded toy suffixing languages for end-to-end and transfer tests.

Lemmas are random consonant-vowel strings; each suffix rule yields one
inflected form per lemma, tagged with the rule's feature string. Lemmas are
split train/test so that test analogies only contain unseen words.
"""
from __future__ import annotations

import random
from pathlib import Path

from .corpus import MorphTriple, write_sigmorphon

SCRIPTS = {
    "latin": ("bcdfghklmnprtvz", "aeiou"),
    "cyrillic": ("бвгдзклмнпрстфх", "аеиоу"),
}
DEFAULT_RULES = {
    "latin": (("num=PL", "s"), ("tense=PST", "ed")),
    "cyrillic": (("num=PL", "ы"), ("tense=PST", "ла")),
}


def make_lemmas(n: int, script: str = "latin", seed: int = 0, min_syllables: int = 2,
                max_syllables: int = 4) -> list[str]:
    consonants, vowels = SCRIPTS[script]
    rng = random.Random(f"{script}:{seed}")
    seen, out = set(), []
    while len(out) < n:
        k = rng.randint(min_syllables, max_syllables)
        word = "".join(rng.choice(consonants) + rng.choice(vowels) for _ in range(k))
        if rng.random() < 0.5:
            word += rng.choice(consonants)
        if word not in seen:
            seen.add(word)
            out.append(word)
    return out


def synth_language(n_lemmas: int = 500, script: str = "latin", seed: int = 0, rules=None) -> list[MorphTriple]:
    rules = DEFAULT_RULES[script] if rules is None else rules
    lemmas = make_lemmas(n_lemmas, script, seed)
    return [MorphTriple(lemma, feat, lemma + suffix) for feat, suffix in rules for lemma in lemmas]


def split_by_lemma(triples, test_fraction: float = 0.3, seed: int = 0):
    lemmas = sorted({t.lemma for t in triples})
    random.Random(seed).shuffle(lemmas)
    n_test = int(round(test_fraction * len(lemmas)))
    test_lemmas = set(lemmas[:n_test])
    train = [t for t in triples if t.lemma not in test_lemmas]
    test = [t for t in triples if t.lemma in test_lemmas]
    return train, test


def write_synth(out_dir, name: str, n_lemmas: int = 500, script: str = "latin", seed: int = 0,
                test_fraction: float = 0.3, rules=None) -> tuple[Path, Path]:
    """Write ``<name>-train`` and ``<name>-test`` task-1 files; returns their paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    train, test = split_by_lemma(synth_language(n_lemmas, script, seed, rules), test_fraction, seed)
    train_path, test_path = out_dir / f"{name}-train", out_dir / f"{name}-test"
    write_sigmorphon(train, train_path)
    write_sigmorphon(test, test_path)
    return train_path, test_path
