"""Central finite-difference gradient checks (use float64 parameters)."""
from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

DEFAULT_STEP = 1e-5
# below this magnitude both gradients count as zero for the relative error
DEFAULT_FLOOR = 1e-6


def relative_error(analytic, numeric, floor: float = DEFAULT_FLOOR) -> np.ndarray:
    analytic, numeric = np.asarray(analytic, dtype=np.float64), np.asarray(numeric, dtype=np.float64)
    denom = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), floor)
    return np.abs(analytic - numeric) / denom


def numeric_gradient(f: Callable[[], float], arr: np.ndarray, step: float = DEFAULT_STEP,
                     indices=None) -> np.ndarray:
    """Central differences of ``f`` with respect to entries of ``arr`` (mutated and restored)."""
    grad = np.zeros(arr.shape, dtype=np.float64)
    flat = arr.reshape(-1)
    for i in (range(flat.size) if indices is None else indices):
        orig = flat[i]
        flat[i] = orig + step
        up = f()
        flat[i] = orig - step
        down = f()
        flat[i] = orig
        grad.reshape(-1)[i] = (up - down) / (2 * step)
    return grad


def check_parameter_gradients(params: dict, loss_fn: Callable[[], float], analytic: dict,
                              step: float = DEFAULT_STEP, max_entries: int | None = None,
                              rng: np.random.Generator | None = None,
                              floor: float = DEFAULT_FLOOR) -> float:
    """Worst relative error between ``analytic`` and finite-difference gradients.

    ``loss_fn`` must read the arrays in ``params`` afresh on every call. With
    ``max_entries`` only that many randomly chosen entries per tensor are probed.
    """
    worst = 0.0
    for name, p in params.items():
        if p.dtype != np.float64:
            raise TypeError(f"gradient checks need float64 parameters, {name} is {p.dtype}")
        idx = None
        if max_entries is not None and p.size > max_entries:
            rng = rng if rng is not None else np.random.default_rng(0)
            idx = rng.choice(p.size, size=max_entries, replace=False)
        num = numeric_gradient(loss_fn, p, step, idx)
        ana = np.asarray(analytic[name], dtype=np.float64)
        if idx is not None:
            err = relative_error(ana.reshape(-1)[idx], num.reshape(-1)[idx], floor)
        else:
            err = relative_error(ana, num, floor)
        if err.size:
            worst = max(worst, float(err.max()))
    return worst


def sequential_forward(layers: Sequence, x):
    caches = []
    for layer in layers:
        x, cache = layer.forward(x)
        caches.append(cache)
    return x, caches


def sequential_backward(layers: Sequence, caches, grad):
    all_grads = []
    for layer, cache in zip(reversed(layers), reversed(caches)):
        grad, g = layer.backward(cache, grad)
        all_grads.append(g)
    return grad, list(reversed(all_grads))


def grad_check(model: Sequence, loss: Callable, x, labels, step: float = DEFAULT_STEP,
               max_entries: int | None = None, rng=None, floor: float = DEFAULT_FLOOR) -> float:
    """Check every parameter of a sequential ``model`` under ``loss(pred, labels) -> (value, dpred)``."""
    layers = list(model)
    if not any(layer.params for layer in layers):
        return 0.0
    pred, caches = sequential_forward(layers, x)
    _, dpred = loss(pred, labels)
    _, grads = sequential_backward(layers, caches, dpred)

    params, analytic = {}, {}
    for i, (layer, g) in enumerate(zip(layers, grads)):
        for name, p in layer.params.items():
            params[f"{i}.{name}"] = p
            analytic[f"{i}.{name}"] = g[name]

    def f():
        return loss(sequential_forward(layers, x)[0], labels)[0]

    return check_parameter_gradients(params, f, analytic, step, max_entries, rng, floor)
