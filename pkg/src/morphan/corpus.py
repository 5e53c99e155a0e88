"""Corpus ingestion and analogy extraction.

Reads Sigmorphon2016 task-1 files (``lemma<TAB>features<TAB>form``) and
relation-pair files (``left<TAB>right``, one relation per file), turns them
into analogy quadruples, and computes dataset coverage and word statistics.
"""
from __future__ import annotations

import random
import unicodedata
from collections import OrderedDict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

VALID = 1
INVALID = 0


class CorpusParseError(ValueError):
    """A malformed line in an input file."""

    def __init__(self, path, lineno: int, message: str):
        self.path = str(path)
        self.lineno = lineno
        super().__init__(f"{path}:{lineno}: {message}")


@dataclass(frozen=True)
class MorphTriple:
    lemma: str
    features: str
    form: str

    def __post_init__(self):
        if not self.lemma or not self.form or not self.features:
            raise ValueError(f"empty field in {self!r}")


@dataclass(frozen=True)
class RelationPair:
    relation_id: str
    left: str
    right: str

    def __post_init__(self):
        if not self.left or not self.right:
            raise ValueError(f"empty word in {self!r}")


@dataclass(frozen=True)
class AnalogyQuadruple:
    a: str
    b: str
    c: str
    d: str
    label: int = VALID

    def __post_init__(self):
        if not (self.a and self.b and self.c and self.d):
            raise ValueError(f"empty word in {self!r}")
        if self.label not in (VALID, INVALID):
            raise ValueError(f"label must be 0 or 1, got {self.label!r}")

    @property
    def words(self) -> tuple[str, str, str, str]:
        return (self.a, self.b, self.c, self.d)

    def relabel(self, label: int) -> "AnalogyQuadruple":
        return AnalogyQuadruple(self.a, self.b, self.c, self.d, label)


@dataclass
class AnalogyDataset:
    quadruples: list = field(default_factory=list)
    language: str = ""
    split: str = "train"

    def __post_init__(self):
        if self.split not in ("train", "dev", "test"):
            raise ValueError(f"unknown split {self.split!r}")

    def __len__(self):
        return len(self.quadruples)

    def __iter__(self):
        return iter(self.quadruples)


def _read_lines(path) -> Iterator[tuple[int, str]]:
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\r\n")
            if line.strip():
                yield lineno, line


def _norm(word: str, nfc: bool) -> str:
    word = word.strip()
    return unicodedata.normalize("NFC", word) if nfc else word


def parse_sigmorphon(path, nfc: bool = False) -> list[MorphTriple]:
    """Parse a task-1 file into triples, in file order."""
    triples = []
    for lineno, line in _read_lines(path):
        cols = line.split("\t")
        if len(cols) < 3:
            raise CorpusParseError(path, lineno, f"expected 3 tab-separated columns, got {len(cols)}")
        lemma, features, form = _norm(cols[0], nfc), cols[1].strip(), _norm(cols[2], nfc)
        try:
            triples.append(MorphTriple(lemma, features, form))
        except ValueError as exc:
            raise CorpusParseError(path, lineno, str(exc)) from None
    return triples


def _pairs_with_self(items: Sequence) -> Iterator[tuple]:
    for i, x in enumerate(items):
        for y in items[i:]:
            yield x, y


def extract_sigmorphon_analogies(triples: Iterable[MorphTriple]) -> list[AnalogyQuadruple]:
    """One analogy per unordered pair of triples sharing a feature string, self-pairs included.

    Feature classes are visited in order of first appearance, and pairs within a
    class follow file order, so the output order is a pure function of the input.
    """
    groups: OrderedDict[str, list[MorphTriple]] = OrderedDict()
    for t in triples:
        groups.setdefault(t.features, []).append(t)
    out = []
    for members in groups.values():
        for t, u in _pairs_with_self(members):
            out.append(AnalogyQuadruple(t.lemma, t.form, u.lemma, u.form))
    return out


def parse_relation_pairs(path, relation_id: str | None = None, first_alternative: bool = True,
                         nfc: bool = False) -> list[RelationPair]:
    """Parse one relation file. The relation id defaults to the file stem.

    BATS-style right-hand sides may list alternatives separated by ``/``
    (e.g. ``会わ/あわ``); by default only the first is kept.
    """
    path = Path(path)
    rid = relation_id if relation_id is not None else path.stem
    pairs = []
    for lineno, line in _read_lines(path):
        cols = line.split("\t") if "\t" in line else line.split()
        if len(cols) != 2:
            raise CorpusParseError(path, lineno, f"expected a word pair, got {len(cols)} fields")
        left, right = _norm(cols[0], nfc), _norm(cols[1], nfc)
        if first_alternative:
            right = right.split("/")[0]
        try:
            pairs.append(RelationPair(rid, left, right))
        except ValueError as exc:
            raise CorpusParseError(path, lineno, str(exc)) from None
    return pairs


def parse_relation_dir(directory, pattern: str = "*.txt", **kwargs) -> list[RelationPair]:
    pairs = []
    for path in sorted(Path(directory).glob(pattern)):
        pairs.extend(parse_relation_pairs(path, **kwargs))
    return pairs


def extract_pair_analogies(pairs: Iterable[RelationPair]) -> list[AnalogyQuadruple]:
    groups: OrderedDict[str, list[RelationPair]] = OrderedDict()
    for p in pairs:
        groups.setdefault(p.relation_id, []).append(p)
    out = []
    for members in groups.values():
        for p, q in _pairs_with_self(members):
            out.append(AnalogyQuadruple(p.left, p.right, q.left, q.right))
    return out


def sample_quadruples(quads: Sequence[AnalogyQuadruple], n: int | None, seed: int) -> list[AnalogyQuadruple]:
    """Seeded uniform draw without replacement; ``None`` or ``n >= len`` keeps everything in order."""
    if n is None or n >= len(quads):
        return list(quads)
    rng = np.random.default_rng(seed)
    idx = rng.choice(len(quads), size=n, replace=False)
    return [quads[i] for i in idx]


def split_quadruples(quads: Sequence[AnalogyQuadruple], train_fraction: float, seed: int):
    """Seeded shuffle then cut, as used for the 70/30 Japanese split."""
    order = list(range(len(quads)))
    random.Random(seed).shuffle(order)
    cut = int(round(train_fraction * len(quads)))
    return [quads[i] for i in order[:cut]], [quads[i] for i in order[cut:]]


def coverage(target: Iterable[AnalogyQuadruple], reference: Iterable[AnalogyQuadruple]) -> float:
    """Percentage of ``target`` quadruples having some equivalent form in ``reference``.

    Membership compares the four words exactly; labels are ignored. An empty
    target is vacuously fully covered.
    """
    from .augment import equivalent_forms

    ref = {q.words for q in reference}
    target = list(target)
    if not target:
        return 100.0
    hit = sum(1 for q in target if any(f.words in ref for f in equivalent_forms(q)))
    return 100.0 * hit / len(target)


@dataclass(frozen=True)
class WordStats:
    repeats_mean: float
    repeats_std: float
    repeats_max: int
    length_mean: float
    length_std: float
    length_max: int
    count: int

    def format(self) -> str:
        return (f"{self.repeats_mean:.3f} ± {self.repeats_std:.3f} ({self.repeats_max})\t"
                f"{self.length_mean:.2f} ± {self.length_std:.2f} ({self.length_max})")


def adjacent_repeats(word: str) -> int:
    return sum(1 for x, y in zip(word, word[1:]) if x == y)


def word_stats(words: Iterable[str]) -> WordStats:
    """Mean/std/max of adjacent repeated letters and of word length (population std)."""
    words = list(words)
    if not words:
        raise ValueError("word_stats needs at least one word")
    reps = np.array([adjacent_repeats(w) for w in words], dtype=np.float64)
    lens = np.array([len(w) for w in words], dtype=np.float64)
    return WordStats(float(reps.mean()), float(reps.std()), int(reps.max()),
                     float(lens.mean()), float(lens.std()), int(lens.max()), len(words))


def analogy_words(quads: Iterable[AnalogyQuadruple]) -> Iterator[str]:
    for q in quads:
        yield from q.words


def read_quadruples(path) -> list[AnalogyQuadruple]:
    """Read ``a<TAB>b<TAB>c<TAB>d[<TAB>label]`` lines."""
    quads = []
    for lineno, line in _read_lines(path):
        cols = line.split("\t")
        if len(cols) not in (4, 5):
            raise CorpusParseError(path, lineno, f"expected 4 or 5 tab-separated fields, got {len(cols)}")
        label = VALID
        if len(cols) == 5:
            if cols[4] not in ("0", "1"):
                raise CorpusParseError(path, lineno, f"label must be 0 or 1, got {cols[4]!r}")
            label = int(cols[4])
        try:
            quads.append(AnalogyQuadruple(*cols[:4], label=label))
        except ValueError as exc:
            raise CorpusParseError(path, lineno, str(exc)) from None
    return quads


def write_quadruples(quads: Iterable[AnalogyQuadruple], path, with_label: bool = False) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for q in quads:
            fields = list(q.words) + ([str(q.label)] if with_label else [])
            fh.write("\t".join(fields) + "\n")


def write_sigmorphon(triples: Iterable[MorphTriple], path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for t in triples:
            fh.write(f"{t.lemma}\t{t.features}\t{t.form}\n")
