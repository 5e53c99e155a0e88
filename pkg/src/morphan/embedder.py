"""Character-level CNN word embedder.

A word becomes ``BOW + chars + EOW`` rows of learned character vectors
(characters outside the vocabulary contribute zero rows), goes through
16 filters of each width 2..6, and is max-pooled over positions into an
80-dimensional vector.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .nn.layers import CharConvBank, MaxPoolPositions

DEFAULT_WIDTHS = (2, 3, 4, 5, 6)
DEFAULT_FILTERS = 16
DEFAULT_M = 64


@dataclass(frozen=True)
class CharVocab:
    """Characters sorted by code point, then the BOW and EOW markers."""

    chars: tuple

    def __post_init__(self):
        object.__setattr__(self, "_index", {ch: i for i, ch in enumerate(self.chars)})

    @property
    def bow(self) -> int:
        return len(self.chars)

    @property
    def eow(self) -> int:
        return len(self.chars) + 1

    def __len__(self) -> int:
        return len(self.chars) + 2

    def __contains__(self, ch) -> bool:
        return ch in self._index

    def index(self, ch: str) -> int:
        """Row of ``ch`` in the embedding table, or -1 for an unknown character."""
        return self._index.get(ch, -1)

    def encode(self, word: str) -> list[int]:
        return [self.bow] + [self._index.get(ch, -1) for ch in word] + [self.eow]


def build_vocab(words: Iterable[str]) -> CharVocab:
    chars = set()
    any_word = False
    for w in words:
        any_word = True
        chars.update(w)
    if not any_word or not chars:
        raise ValueError("cannot build a vocabulary from an empty corpus")
    return CharVocab(tuple(sorted(chars)))


class Embedder:
    def __init__(self, vocab: CharVocab, m: int = DEFAULT_M, widths=DEFAULT_WIDTHS,
                 filters: int = DEFAULT_FILTERS, rng=None, dtype=np.float32, bias: bool = True):
        self.vocab = vocab
        self.bank = CharConvBank(len(vocab), m, widths, filters, rng=rng, dtype=dtype, bias=bias)
        self.pool = MaxPoolPositions()

    @property
    def params(self) -> dict:
        return self.bank.params

    @property
    def out_dim(self) -> int:
        return self.bank.out_dim

    @property
    def m(self) -> int:
        return self.bank.m

    def astype(self, dtype):
        self.bank.astype(dtype)
        return self

    def encode(self, words: Sequence[str]):
        if not words:
            raise ValueError("no words to embed")
        rows = []
        for w in words:
            if not w:
                raise ValueError("cannot embed an empty word")
            rows.append(self.vocab.encode(w))
        lengths = np.array([len(r) for r in rows], dtype=np.int64)
        idx = np.full((len(rows), int(lengths.max())), -1, dtype=np.int64)
        for i, r in enumerate(rows):
            idx[i, :len(r)] = r
        return idx, lengths

    def forward(self, words: Sequence[str]):
        idx, lengths = self.encode(words)
        conv, bank_cache = self.bank.forward(idx)
        emb, pool_cache = self.pool.forward(conv, lengths)
        return emb, (bank_cache, pool_cache)

    def backward(self, cache, grad) -> dict:
        bank_cache, pool_cache = cache
        dconv, _ = self.pool.backward(pool_cache, grad)
        _, grads = self.bank.backward(bank_cache, dconv)
        return grads

    def embed(self, words: Sequence[str]) -> np.ndarray:
        return self.forward(words)[0]


def embed_word(word: str, embedder: Embedder) -> np.ndarray:
    return embedder.embed([word])[0]
