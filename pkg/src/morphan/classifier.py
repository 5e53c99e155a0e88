"""CNN analogy classifier over four stacked word embeddings.

Shapes for embedding size n: (n, 4) -> conv1 + ReLU -> (128, n, 2)
-> conv2 + ReLU -> (64, n-1, 1) -> flatten -> dense -> sigmoid.
"""
from __future__ import annotations

import numpy as np

from .nn.layers import Conv1x2Stride2, Conv2x2Valid, Dense, ReLU, ShapeError, Sigmoid

VALID = "valid"
INVALID = "invalid"


class Classifier:
    def __init__(self, n: int = 80, conv1_filters: int = 128, conv2_filters: int = 64, rng=None,
                 dtype=np.float32):
        if n < 2:
            raise ValueError("embedding size must be at least 2")
        rng = rng if rng is not None else np.random.default_rng(0)
        self.n = n
        self.conv1 = Conv1x2Stride2(conv1_filters, rng=rng, dtype=dtype)
        self.relu1 = ReLU()
        self.conv2 = Conv2x2Valid(conv1_filters, conv2_filters, rng=rng, dtype=dtype)
        self.relu2 = ReLU()
        self.fc = Dense(conv2_filters * (n - 1), 1, rng=rng, dtype=dtype)
        self.sigmoid = Sigmoid()

    @property
    def layers(self):
        return [self.conv1, self.relu1, self.conv2, self.relu2, self.fc, self.sigmoid]

    @property
    def params(self) -> dict:
        out = {}
        for prefix, layer in (("conv1", self.conv1), ("conv2", self.conv2), ("fc", self.fc)):
            for name, p in layer.params.items():
                out[f"{prefix}.{name}"] = p
        return out

    def set_param(self, name: str, value: np.ndarray):
        prefix, pname = name.split(".", 1)
        layer = getattr(self, prefix)
        if layer.params[pname].shape != value.shape:
            raise ShapeError(f"{name}: expected {layer.params[pname].shape}, got {value.shape}")
        layer.params[pname] = value

    def astype(self, dtype):
        for layer in (self.conv1, self.conv2, self.fc):
            layer.astype(dtype)
        return self

    def forward(self, stacked):
        """``stacked``: (B, n, 4) with columns A, B, C, D. Returns probabilities (B,)."""
        stacked = np.asarray(stacked)
        if stacked.ndim != 3 or stacked.shape[1:] != (self.n, 4):
            raise ShapeError(f"classifier expects (B, {self.n}, 4), got {stacked.shape}")
        caches = []
        h1, c = self.conv1.forward(stacked)
        caches.append(c)
        h1, c = self.relu1.forward(h1)
        caches.append(c)
        h2, c = self.conv2.forward(h1)
        caches.append(c)
        h2, c = self.relu2.forward(h2)
        caches.append(c)
        shape2 = h2.shape
        z, c = self.fc.forward(h2.reshape(h2.shape[0], -1))
        caches.append(c)
        p, c = self.sigmoid.forward(z)
        caches.append(c)
        return p[:, 0], (caches, shape2)

    def intermediate_shapes(self, stacked) -> list[tuple]:
        h1 = self.relu1.forward(self.conv1.forward(stacked)[0])[0]
        h2 = self.relu2.forward(self.conv2.forward(h1)[0])[0]
        p = self.forward(stacked)[0]
        return [h1.shape[1:], h2.shape[1:], p.shape[1:]]

    def backward(self, cache, dp):
        caches, shape2 = cache
        g, _ = self.sigmoid.backward(caches[5], np.asarray(dp).reshape(-1, 1))
        g, g_fc = self.fc.backward(caches[4], g)
        g, _ = self.relu2.backward(caches[3], g.reshape(shape2))
        g, g_c2 = self.conv2.backward(caches[2], g)
        g, _ = self.relu1.backward(caches[1], g)
        g, g_c1 = self.conv1.backward(caches[0], g)
        grads = {}
        for prefix, gd in (("conv1", g_c1), ("conv2", g_c2), ("fc", g_fc)):
            for name, v in gd.items():
                grads[f"{prefix}.{name}"] = v
        return g, grads

    def predict(self, stacked) -> np.ndarray:
        return self.forward(stacked)[0]


def stack_embeddings(a, b, c, d) -> np.ndarray:
    """(n,) x 4 or (B, n) x 4 -> (B, n, 4)."""
    arrs = [np.atleast_2d(np.asarray(x)) for x in (a, b, c, d)]
    dims = {x.shape[1] for x in arrs}
    if len(dims) != 1:
        raise ShapeError(f"embedding dimensions differ: {sorted(dims)}")
    return np.stack(arrs, axis=2)


def score_quadruple(a_emb, b_emb, c_emb, d_emb, classifier: Classifier) -> float:
    return float(classifier.predict(stack_embeddings(a_emb, b_emb, c_emb, d_emb))[0])


def classify(p: float, threshold: float = 0.5) -> str:
    if not 0.0 < threshold < 1.0:
        raise ValueError("threshold must lie in (0, 1)")
    return VALID if p >= threshold else INVALID
