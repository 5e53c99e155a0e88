from __future__ import annotations

import numpy as np

BCE_EPS = 1e-7


def bce_loss(p, y, eps: float = BCE_EPS):
    """Binary cross entropy on probabilities clamped to [eps, 1-eps].

    Returns ``(loss, dloss/dp)`` elementwise; the clamp is treated as the
    identity when differentiating.
    """
    p = np.asarray(p)
    y = np.asarray(y, dtype=p.dtype if p.dtype.kind == "f" else np.float64)
    pc = np.clip(p, eps, 1.0 - eps)
    loss = -(y * np.log(pc) + (1 - y) * np.log1p(-pc))
    grad = (pc - y) / (pc * (1 - pc))
    if loss.ndim == 0:
        return float(loss), float(grad)
    return loss, grad


def bce_mean(p, y):
    """Mean BCE over a batch and its gradient with respect to ``p``."""
    loss, grad = bce_loss(p, y)
    n = np.size(loss)
    return float(np.mean(loss)), grad / n
