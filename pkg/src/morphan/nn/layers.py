"""The seven layer kinds used by the embedder and the classifier.

Every layer exposes ``forward(x) -> (out, cache)`` and
``backward(cache, grad_out) -> (grad_in, param_grads)``; parameters live in
``layer.params`` (a dict of numpy arrays) and are updated in place by the
optimizer. A leading batch axis is always present.

Convolution outputs are returned as transposed *views* of channel-last
buffers so that the public shapes match the usual (batch, channel, rows,
cols) convention while the matrix products stay contiguous.
"""
from __future__ import annotations

import numpy as np


class ShapeError(ValueError):
    pass


class NonFiniteError(FloatingPointError):
    pass


def ensure_finite(where: str, arr) -> None:
    # a sum is NaN/Inf iff some element is (or the total overflows)
    if arr is not None and not np.isfinite(np.sum(arr, dtype=np.float64)):
        raise NonFiniteError(f"non-finite values in {where}")


def glorot_uniform(rng: np.random.Generator, shape, fan_in: int, fan_out: int, dtype) -> np.ndarray:
    bound = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-bound, bound, size=shape).astype(dtype)


class Layer:
    kind = ""

    def __init__(self):
        self.params: dict[str, np.ndarray] = {}

    def astype(self, dtype):
        for name, p in self.params.items():
            self.params[name] = p.astype(dtype)
        return self

    def _expect(self, cond: bool, x_shape, expected: str):
        if not cond:
            raise ShapeError(f"{self.kind}: got input shape {tuple(x_shape)}, expected {expected}")


class ReLU(Layer):
    kind = "relu"

    def forward(self, x):
        out = np.maximum(x, 0)
        return out, x > 0

    def backward(self, cache, grad):
        if grad.shape != cache.shape:
            raise ShapeError(f"relu: upstream grad {grad.shape} != output {cache.shape}")
        dx = grad * cache
        ensure_finite("relu backward", dx)
        return dx, {}


class Sigmoid(Layer):
    kind = "sigmoid"

    def forward(self, x):
        out = np.exp(-np.logaddexp(0, -x)).astype(x.dtype, copy=False)
        return out, out

    def backward(self, cache, grad):
        if grad.shape != cache.shape:
            raise ShapeError(f"sigmoid: upstream grad {grad.shape} != output {cache.shape}")
        dx = grad * cache * (1 - cache)
        ensure_finite("sigmoid backward", dx)
        return dx, {}


class Dense(Layer):
    """y = x W^T + b for x of shape (batch, in_dim)."""

    kind = "dense"

    def __init__(self, in_dim: int, out_dim: int, rng=None, dtype=np.float32):
        super().__init__()
        self.in_dim, self.out_dim = in_dim, out_dim
        rng = rng if rng is not None else np.random.default_rng(0)
        self.params["weight"] = glorot_uniform(rng, (out_dim, in_dim), in_dim, out_dim, dtype)
        self.params["bias"] = np.zeros(out_dim, dtype=dtype)

    def forward(self, x):
        self._expect(x.ndim == 2 and x.shape[1] == self.in_dim, x.shape, f"(B, {self.in_dim})")
        out = x @ self.params["weight"].T + self.params["bias"]
        ensure_finite("dense forward", out)
        return out, x

    def backward(self, x, grad):
        if grad.shape != (x.shape[0], self.out_dim):
            raise ShapeError(f"dense: upstream grad {grad.shape} != {(x.shape[0], self.out_dim)}")
        grads = {"weight": grad.T @ x, "bias": grad.sum(axis=0)}
        dx = grad @ self.params["weight"]
        ensure_finite("dense backward", dx)
        return dx, grads


class Conv1x2Stride2(Layer):
    """(B, n, 4) -> (B, F, n, 2): one shared (w0, w1, bias) filter per output channel,
    applied to columns (0, 1) and (2, 3) of every row without overlap."""

    kind = "conv_1x2_stride2"

    def __init__(self, filters: int = 128, rng=None, dtype=np.float32):
        super().__init__()
        self.filters = filters
        rng = rng if rng is not None else np.random.default_rng(0)
        self.params["weight"] = glorot_uniform(rng, (filters, 2), 2, 2 * filters, dtype)
        self.params["bias"] = np.zeros(filters, dtype=dtype)

    def forward(self, x):
        self._expect(x.ndim == 3 and x.shape[2] == 4, x.shape, "(B, n, 4)")
        bsz, n, _ = x.shape
        xp = np.ascontiguousarray(x).reshape(bsz, n, 2, 2)
        z = xp @ self.params["weight"].T + self.params["bias"]  # (B, n, 2, F)
        ensure_finite("conv_1x2_stride2 forward", z)
        return z.transpose(0, 3, 1, 2), xp

    def backward(self, xp, grad):
        bsz, n = xp.shape[:2]
        if grad.shape != (bsz, self.filters, n, 2):
            raise ShapeError(f"conv_1x2_stride2: upstream grad {grad.shape} != {(bsz, self.filters, n, 2)}")
        gz = np.ascontiguousarray(grad.transpose(0, 2, 3, 1))  # (B, n, 2, F)
        g2 = gz.reshape(-1, self.filters)
        grads = {"weight": g2.T @ xp.reshape(-1, 2), "bias": g2.sum(axis=0)}
        dx = (gz @ self.params["weight"]).reshape(bsz, n, 4)
        ensure_finite("conv_1x2_stride2 backward", dx)
        return dx, grads


class Conv2x2Valid(Layer):
    """(B, C, n, 2) -> (B, O, n-1, 1): valid 2x2 cross-correlation."""

    kind = "conv_2x2_valid"

    def __init__(self, in_channels: int = 128, out_channels: int = 64, rng=None, dtype=np.float32):
        super().__init__()
        self.in_channels, self.out_channels = in_channels, out_channels
        rng = rng if rng is not None else np.random.default_rng(0)
        self.params["weight"] = glorot_uniform(
            rng, (out_channels, in_channels, 2, 2), 4 * in_channels, 4 * out_channels, dtype)
        self.params["bias"] = np.zeros(out_channels, dtype=dtype)

    def _stacked_weight(self):
        # rows indexed by (column j, channel c) -> j*C + c; first O columns for
        # the upper kernel row, last O for the lower one
        w = self.params["weight"]
        c, o = self.in_channels, self.out_channels
        top = w[:, :, 0, :].transpose(2, 1, 0).reshape(2 * c, o)
        bottom = w[:, :, 1, :].transpose(2, 1, 0).reshape(2 * c, o)
        return np.concatenate([top, bottom], axis=1)

    def forward(self, x):
        c, o = self.in_channels, self.out_channels
        self._expect(x.ndim == 4 and x.shape[1] == c and x.shape[3] == 2 and x.shape[2] >= 2,
                     x.shape, f"(B, {c}, n>=2, 2)")
        bsz, _, n, _ = x.shape
        h = np.ascontiguousarray(x.transpose(0, 2, 3, 1)).reshape(bsz * n, 2 * c)
        y = (h @ self._stacked_weight()).reshape(bsz, n, 2 * o)
        out = y[:, :-1, :o] + y[:, 1:, o:] + self.params["bias"]  # (B, n-1, O)
        ensure_finite("conv_2x2_valid forward", out)
        return out.transpose(0, 2, 1)[..., None], (h, bsz, n)

    def backward(self, cache, grad):
        h, bsz, n = cache
        c, o = self.in_channels, self.out_channels
        if grad.shape != (bsz, o, n - 1, 1):
            raise ShapeError(f"conv_2x2_valid: upstream grad {grad.shape} != {(bsz, o, n - 1, 1)}")
        go = np.ascontiguousarray(grad[..., 0].transpose(0, 2, 1))  # (B, n-1, O)
        dy = np.zeros((bsz, n, 2 * o), dtype=go.dtype)
        dy[:, :-1, :o] = go
        dy[:, 1:, o:] = go
        dy2 = dy.reshape(bsz * n, 2 * o)
        dh = dy2 @ self._stacked_weight().T
        dwcat = h.T @ dy2  # (2C, 2O)
        dw = np.empty_like(self.params["weight"])
        dw[:, :, 0, :] = dwcat[:, :o].reshape(2, c, o).transpose(2, 1, 0)
        dw[:, :, 1, :] = dwcat[:, o:].reshape(2, c, o).transpose(2, 1, 0)
        grads = {"weight": dw, "bias": go.sum(axis=(0, 1))}
        dx = dh.reshape(bsz, n, 2, c).transpose(0, 3, 1, 2)
        ensure_finite("conv_2x2_valid backward", dx)
        return dx, grads


class CharConvBank(Layer):
    """Character embedding lookup followed by one filter bank per width.

    Input: integer array (B, L) of character rows; ``-1`` marks a zero row
    (unknown character or batch padding). Each width-w bank zero-pads w//2
    rows on both sides and keeps the first L positions, so output position t
    is centred near input row t. Output: (B, filters*len(widths), L), banks
    ordered by increasing width.
    """

    kind = "char_conv_bank"

    def __init__(self, vocab_size: int, m: int = 64, widths=(2, 3, 4, 5, 6), filters: int = 16,
                 rng=None, dtype=np.float32, bias: bool = True):
        super().__init__()
        self.vocab_size, self.m, self.widths, self.filters = vocab_size, m, tuple(widths), filters
        self.use_bias = bias
        rng = rng if rng is not None else np.random.default_rng(0)
        self.params["char_embeddings"] = rng.uniform(-0.1, 0.1, size=(vocab_size, m)).astype(dtype)
        for w in self.widths:
            self.params[f"conv{w}.weight"] = glorot_uniform(rng, (filters, w, m), w * m, w * filters, dtype)
            if bias:
                self.params[f"conv{w}.bias"] = np.zeros(filters, dtype=dtype)

    @property
    def out_dim(self) -> int:
        return self.filters * len(self.widths)

    def _window(self):
        """Offsets (relative to the output position) spanned by all banks together."""
        lo = -max(w // 2 for w in self.widths)
        hi = max(w - 1 - w // 2 for w in self.widths)
        return lo, hi - lo + 1

    def _combined_weight(self, lo, span):
        # every bank as rows of one (F_total, span, m) filter, zero outside its own offsets
        first = self.params["char_embeddings"]
        full = np.zeros((self.out_dim, span, self.m), dtype=first.dtype)
        for bank, w in enumerate(self.widths):
            start = -(w // 2) - lo
            full[bank * self.filters:(bank + 1) * self.filters, start:start + w] = self.params[f"conv{w}.weight"]
        return full.reshape(self.out_dim, span * self.m)

    def forward(self, idx):
        idx = np.asarray(idx)
        self._expect(idx.ndim == 2 and np.issubdtype(idx.dtype, np.integer), idx.shape, "integer (B, L)")
        if idx.size and (idx.max() >= self.vocab_size or idx.min() < -1):
            raise ShapeError(f"{self.kind}: character index out of range [-1, {self.vocab_size})")
        emb = self.params["char_embeddings"]
        table = np.vstack([emb, np.zeros((1, self.m), dtype=emb.dtype)])
        rows = np.where(idx < 0, self.vocab_size, idx)
        bsz, length = rows.shape
        lo, span = self._window()
        # zero rows around the word, then one im2col over the shared window
        xpad = np.zeros((bsz, length + span - 1, self.m), dtype=emb.dtype)
        xpad[:, -lo:-lo + length] = table[rows]
        cols = np.lib.stride_tricks.sliding_window_view(xpad, span, axis=1)  # (B, L, m, span)
        cols = np.ascontiguousarray(cols.transpose(0, 1, 3, 2)).reshape(bsz * length, span * self.m)
        out = cols @ self._combined_weight(lo, span).T
        if self.use_bias:
            out += np.concatenate([self.params[f"conv{w}.bias"] for w in self.widths])
        ensure_finite("char_conv_bank forward", out)
        return out.reshape(bsz, length, self.out_dim).transpose(0, 2, 1), (rows, cols, bsz, length)

    def backward(self, cache, grad):
        rows, cols, bsz, length = cache
        if grad.shape != (bsz, self.out_dim, length):
            raise ShapeError(f"{self.kind}: upstream grad {grad.shape} != {(bsz, self.out_dim, length)}")
        lo, span = self._window()
        g2 = np.ascontiguousarray(grad.transpose(0, 2, 1)).reshape(bsz * length, self.out_dim)
        dfull = (g2.T @ cols).reshape(self.out_dim, span, self.m)
        grads = {}
        for bank, w in enumerate(self.widths):
            start = -(w // 2) - lo
            grads[f"conv{w}.weight"] = np.ascontiguousarray(
                dfull[bank * self.filters:(bank + 1) * self.filters, start:start + w])
        if self.use_bias:
            gb = g2.sum(axis=0)
            for bank, w in enumerate(self.widths):
                grads[f"conv{w}.bias"] = gb[bank * self.filters:(bank + 1) * self.filters]
        dcols = (g2 @ self._combined_weight(lo, span)).reshape(bsz, length, span, self.m)
        dxpad = np.zeros((bsz, length + span - 1, self.m), dtype=g2.dtype)
        for k in range(span):
            dxpad[:, k:k + length] += dcols[:, :, k]
        dx = dxpad[:, -lo:-lo + length]
        # scatter-add into the table as a (vocab x positions) one-hot product
        flat = rows.ravel()
        onehot = np.zeros((self.vocab_size + 1, flat.size), dtype=g2.dtype)
        onehot[flat, np.arange(flat.size)] = 1
        grads["char_embeddings"] = (onehot @ dx.reshape(-1, self.m))[:-1]
        ensure_finite("char_conv_bank backward", grads["char_embeddings"])
        return None, grads


class MaxPoolPositions(Layer):
    """(B, F, L) -> (B, F): max over the first ``lengths[b]`` positions; ties go to the lowest index."""

    kind = "max_pool_positions"

    def forward(self, x, lengths=None):
        self._expect(x.ndim == 3 and x.shape[2] >= 1, x.shape, "(B, F, L>=1)")
        bsz, f, length = x.shape
        if lengths is None:
            masked = x
        else:
            lengths = np.asarray(lengths)
            if lengths.shape != (bsz,) or lengths.min() < 1 or lengths.max() > length:
                raise ShapeError(f"{self.kind}: lengths must be (B,) within [1, {length}]")
            valid = np.arange(length)[None, None, :] < lengths[:, None, None]
            masked = np.where(valid, x, -np.inf)
        arg = masked.argmax(axis=2)  # first maximum on ties
        out = np.take_along_axis(x, arg[..., None], axis=2)[..., 0]
        return out, (arg, x.shape)

    def backward(self, cache, grad):
        arg, shape = cache
        if grad.shape != shape[:2]:
            raise ShapeError(f"{self.kind}: upstream grad {grad.shape} != {shape[:2]}")
        dx = np.zeros(shape, dtype=grad.dtype)
        np.put_along_axis(dx, arg[..., None], grad[..., None], axis=2)
        return dx, {}


LAYER_KINDS = {cls.kind: cls for cls in
               (CharConvBank, MaxPoolPositions, Conv1x2Stride2, Conv2x2Valid, ReLU, Dense, Sigmoid)}
