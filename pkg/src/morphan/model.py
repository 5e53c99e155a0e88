"""Embedder and classifier trained jointly."""
from __future__ import annotations

from typing import Sequence

import numpy as np

from .classifier import Classifier
from .embedder import CharVocab, Embedder
from .nn.loss import bce_mean


class AnalogyModel:
    def __init__(self, vocab: CharVocab, m: int = 64, seed: int = 0, dtype=np.float32,
                 widths=(2, 3, 4, 5, 6), filters: int = 16, conv1_filters: int = 128,
                 conv2_filters: int = 64, bias: bool = True):
        rng = np.random.default_rng(seed)
        self.embedder = Embedder(vocab, m, widths, filters, rng=rng, dtype=dtype, bias=bias)
        self.classifier = Classifier(self.embedder.out_dim, conv1_filters, conv2_filters, rng=rng, dtype=dtype)

    @classmethod
    def from_parts(cls, embedder: Embedder, classifier: Classifier) -> "AnalogyModel":
        if embedder.out_dim != classifier.n:
            raise ValueError(f"embedding size {embedder.out_dim} does not match classifier input {classifier.n}")
        model = cls.__new__(cls)
        model.embedder, model.classifier = embedder, classifier
        return model

    @property
    def vocab(self) -> CharVocab:
        return self.embedder.vocab

    @property
    def params(self) -> dict:
        out = {f"embedder.{k}": v for k, v in self.embedder.params.items()}
        out.update({f"classifier.{k}": v for k, v in self.classifier.params.items()})
        return out

    def set_param(self, name: str, value: np.ndarray):
        part, rest = name.split(".", 1)
        if part == "embedder":
            if self.embedder.params[rest].shape != value.shape:
                raise ValueError(f"{name}: expected {self.embedder.params[rest].shape}, got {value.shape}")
            self.embedder.params[rest] = value
        elif part == "classifier":
            self.classifier.set_param(rest, value)
        else:
            raise KeyError(name)

    def astype(self, dtype):
        self.embedder.astype(dtype)
        self.classifier.astype(dtype)
        return self

    @staticmethod
    def index_examples(examples: Sequence) -> tuple[list[str], np.ndarray]:
        """Unique words (first-seen order) and a (N, 4) index array into them."""
        words, index = [], {}
        rows = np.empty((len(examples), 4), dtype=np.int64)
        for r, q in enumerate(examples):
            for col, w in enumerate(q.words):
                i = index.get(w)
                if i is None:
                    i = index[w] = len(words)
                    words.append(w)
                rows[r, col] = i
        return words, rows

    def loss_and_grads(self, examples: Sequence) -> tuple[float, dict]:
        """Mean BCE over labelled quadruples, with gradients for every parameter."""
        words, rows = self.index_examples(examples)
        labels = np.array([q.label for q in examples], dtype=self.classifier.fc.params["weight"].dtype)
        emb, emb_cache = self.embedder.forward(words)
        stacked = emb[rows].transpose(0, 2, 1)  # (N, n, 4)
        p, clf_cache = self.classifier.forward(stacked)
        loss, dp = bce_mean(p, labels)
        dstacked, clf_grads = self.classifier.backward(clf_cache, dp.astype(p.dtype, copy=False))
        demb = np.zeros_like(emb)
        np.add.at(demb, rows, dstacked.transpose(0, 2, 1))
        emb_grads = self.embedder.backward(emb_cache, demb)
        grads = {f"embedder.{k}": v for k, v in emb_grads.items()}
        grads.update({f"classifier.{k}": v for k, v in clf_grads.items()})
        return loss, grads

    def loss(self, examples: Sequence) -> float:
        words, rows = self.index_examples(examples)
        labels = np.array([q.label for q in examples], dtype=np.float64)
        emb = self.embedder.embed(words)
        p = self.classifier.predict(emb[rows].transpose(0, 2, 1))
        return bce_mean(p, labels)[0]

    def embed_words(self, words: Sequence[str], chunk: int = 512) -> dict[str, np.ndarray]:
        words = list(dict.fromkeys(words))
        out = {}
        for s in range(0, len(words), chunk):
            part = words[s:s + chunk]
            for w, e in zip(part, self.embedder.embed(part)):
                out[w] = e
        return out

    def predict(self, quads: Sequence, chunk: int = 256, embeddings: dict | None = None) -> np.ndarray:
        """Validity probabilities for quadruples (anything with ``.words``)."""
        quads = list(quads)
        if not quads:
            return np.zeros(0)
        if embeddings is None:
            embeddings = self.embed_words([w for q in quads for w in q.words])
        out = []
        for s in range(0, len(quads), chunk):
            part = quads[s:s + chunk]
            stacked = np.stack([np.stack([embeddings[w] for w in q.words], axis=1) for q in part])
            out.append(self.classifier.predict(stacked))
        return np.concatenate(out)
