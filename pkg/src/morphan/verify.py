"""Seeded finite-difference checks for each layer kind and for the full model.

Central differences are only meaningful where the loss is smooth across the
stencil, so configurations whose ReLU pre-activations or max-pool margins lie
within ``MIN_MARGIN`` of a kink are redrawn (deterministically, from the same
seed) before checking. Saturated predictions are redrawn too: the loss is
flat past the BCE clamp, and near it ``1 - p`` loses most of its digits.
"""
from __future__ import annotations

import numpy as np

from .augment import augment_for_training
from .corpus import AnalogyQuadruple
from .embedder import build_vocab
from .model import AnalogyModel
from .nn import layers as L
from .nn.gradcheck import DEFAULT_STEP, check_parameter_gradients, grad_check, numeric_gradient, relative_error
from .nn.loss import bce_mean

MIN_MARGIN = 1e-3
MIN_PROB_MARGIN = 1e-3
TOLERANCE = 1e-4
LAYER_CHECK_KINDS = tuple(L.LAYER_KINDS)


def _randomize(params: dict, rng, scale: float = 0.5):
    for p in params.values():
        p[...] = rng.normal(0.0, scale, size=p.shape)


def _pool_margin(conv: np.ndarray, lengths=None) -> float:
    """Smallest positive gap between the best and runner-up value of any pooled row.

    Exactly equal values come from identical windows, which move together
    under any perturbation, so they do not count as kinks.
    """
    bsz, f, length = conv.shape
    worst = np.inf
    for b in range(bsz):
        n = length if lengths is None else lengths[b]
        vals = np.sort(conv[b, :, :n], axis=1)
        for row in vals:
            top = row[-1]
            below = row[row < top]
            if below.size:
                worst = min(worst, top - below[-1])
    return float(worst)


def _relu_margin(pre: np.ndarray) -> float:
    return float(np.abs(pre).min()) if pre.size else np.inf


def model_margin(model: AnalogyModel, examples) -> float:
    words, rows = model.index_examples(examples)
    idx, lengths = model.embedder.encode(words)
    conv, _ = model.embedder.bank.forward(idx)
    margin = _pool_margin(conv, lengths)
    emb = model.embedder.embed(words)
    stacked = emb[rows].transpose(0, 2, 1)
    clf = model.classifier
    z1, _ = clf.conv1.forward(stacked)
    z2, _ = clf.conv2.forward(np.maximum(z1, 0))
    return min(margin, _relu_margin(z1), _relu_margin(z2))


def prob_margin(model: AnalogyModel, examples) -> float:
    p = model.predict(examples)
    return float(np.minimum(p, 1 - p).min())


def _random_word(rng, alphabet, lo=1, hi=6):
    return "".join(rng.choice(list(alphabet), size=int(rng.integers(lo, hi + 1))))


def full_stack_case(seed: int, m: int = 3, filters: int = 2, conv1_filters: int = 4, conv2_filters: int = 3):
    """A tiny float64 embedder+classifier (n = 5 * filters) with randomized parameters.

    The examples include the 11 training forms of a random quadruple plus one
    quadruple containing characters outside the vocabulary.
    """
    for attempt in range(1000):
        rng = np.random.default_rng([seed, attempt])
        words = [_random_word(rng, "abcde") for _ in range(4)] + [_random_word(rng, "abcdefg") for _ in range(2)]
        vocab = build_vocab(words[:4])
        model = AnalogyModel(vocab, m=m, seed=int(rng.integers(2**31)), dtype=np.float64, filters=filters,
                             conv1_filters=conv1_filters, conv2_filters=conv2_filters)
        _randomize(model.params, rng)
        examples = augment_for_training(AnalogyQuadruple(*words[:4])).examples
        examples.append(AnalogyQuadruple(*words[2:6]))
        if model_margin(model, examples) > MIN_MARGIN and prob_margin(model, examples) > MIN_PROB_MARGIN:
            return model, examples
    raise RuntimeError(f"no smooth configuration found for seed {seed}")


def check_full_stack(seed: int, step: float = DEFAULT_STEP) -> float:
    model, examples = full_stack_case(seed)
    _, grads = model.loss_and_grads(examples)
    return check_parameter_gradients(model.params, lambda: model.loss(examples), grads, step)


def _layer_case(kind: str, rng):
    """A small float64 layer, a differentiable input for it, and forward kwargs."""
    f64 = np.float64
    if kind == "relu":
        x = rng.normal(size=(3, 7))
        return L.ReLU(), x, {}
    if kind == "sigmoid":
        return L.Sigmoid(), rng.normal(scale=3.0, size=(3, 5)), {}
    if kind == "dense":
        layer = L.Dense(int(rng.integers(1, 8)), int(rng.integers(1, 5)), rng=rng, dtype=f64)
        return layer, rng.normal(size=(3, layer.in_dim)), {}
    if kind == "conv_1x2_stride2":
        layer = L.Conv1x2Stride2(int(rng.integers(1, 6)), rng=rng, dtype=f64)
        return layer, rng.normal(size=(2, int(rng.integers(2, 7)), 4)), {}
    if kind == "conv_2x2_valid":
        c, o = int(rng.integers(1, 5)), int(rng.integers(1, 5))
        layer = L.Conv2x2Valid(c, o, rng=rng, dtype=f64)
        return layer, rng.normal(size=(2, c, int(rng.integers(2, 7)), 2)), {}
    if kind == "char_conv_bank":
        vocab_size, m = int(rng.integers(2, 6)), int(rng.integers(1, 4))
        layer = L.CharConvBank(vocab_size, m, (2, 3, 4, 5, 6), int(rng.integers(1, 3)), rng=rng, dtype=f64)
        idx = rng.integers(-1, vocab_size, size=(2, int(rng.integers(1, 8))))
        return layer, idx, {}
    if kind == "max_pool_positions":
        bsz, f, length = 2, int(rng.integers(1, 4)), int(rng.integers(1, 7))
        x = rng.normal(size=(bsz, f, length))
        lengths = rng.integers(1, length + 1, size=bsz)
        return L.MaxPoolPositions(), x, {"lengths": lengths}
    raise KeyError(kind)


def _layer_margin(kind, layer, x, kwargs) -> float:
    if kind == "relu":
        return _relu_margin(x)
    if kind == "max_pool_positions":
        return _pool_margin(x, kwargs.get("lengths"))
    return np.inf


def check_layer(kind: str, seed: int, step: float = DEFAULT_STEP) -> float:
    """Worst relative error over parameter and input gradients of one layer under a random linear loss."""
    for attempt in range(1000):
        rng = np.random.default_rng([seed, attempt, 7])
        layer, x, kwargs = _layer_case(kind, rng)
        _randomize(layer.params, rng)
        if _layer_margin(kind, layer, x, kwargs) > MIN_MARGIN:
            break
    else:
        raise RuntimeError(f"no smooth configuration for {kind}, seed {seed}")
    out, cache = layer.forward(x, **kwargs)
    weights = rng.normal(size=out.shape)

    def loss():
        return float(np.sum(layer.forward(x, **kwargs)[0] * weights))

    dx, grads = layer.backward(cache, weights.copy())
    worst = check_parameter_gradients(layer.params, loss, grads, step) if layer.params else 0.0
    if dx is not None:
        num = numeric_gradient(loss, x, step)
        worst = max(worst, float(relative_error(dx, num).max()))
    return worst


def check_sequential_bce(seed: int, step: float = DEFAULT_STEP) -> float:
    """A linear model (dense + sigmoid) under mean BCE; smooth everywhere."""
    rng = np.random.default_rng(seed)
    model = [L.Dense(5, 1, rng=rng, dtype=np.float64), L.Sigmoid()]
    x = rng.normal(size=(8, 5))
    y = rng.integers(0, 2, size=(8, 1)).astype(np.float64)
    return grad_check(model, bce_mean, x, y, step)


def run_all(seeds=range(100), step: float = DEFAULT_STEP) -> dict:
    """Worst error per layer kind and for the full stack over ``seeds``."""
    seeds = list(seeds)
    results = {kind: max(check_layer(kind, s, step) for s in seeds) for kind in LAYER_CHECK_KINDS}
    results["full_stack"] = max(check_full_stack(s, step) for s in seeds)
    return results
