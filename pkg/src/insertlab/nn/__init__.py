from .tensor import Tensor, concat, conv2d, minimum, no_grad
from .layers import (
    ParameterSet,
    conv2d_forward,
    init_conv_params,
    init_mlp_params,
    mlp_forward,
)
from .optim import AdamState, adam_step
from .checkpoint import load_params, save_params

__all__ = [
    "Tensor",
    "concat",
    "conv2d",
    "minimum",
    "no_grad",
    "ParameterSet",
    "mlp_forward",
    "conv2d_forward",
    "init_mlp_params",
    "init_conv_params",
    "AdamState",
    "adam_step",
    "save_params",
    "load_params",
]
