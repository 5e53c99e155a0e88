"""Minimal dense-tensor kernel: the layers, loss, optimizer and gradient checker used by the models."""
from .gradcheck import check_parameter_gradients, grad_check, numeric_gradient, relative_error
from .layers import (
    LAYER_KINDS,
    CharConvBank,
    Conv1x2Stride2,
    Conv2x2Valid,
    Dense,
    Layer,
    MaxPoolPositions,
    NonFiniteError,
    ReLU,
    ShapeError,
    Sigmoid,
    ensure_finite,
)
from .loss import bce_loss, bce_mean
from .optim import AdamState, adam_step
