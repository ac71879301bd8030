"""Minimal neural-network core shared by every model in the package."""

from .init import as_rng, orthonormal_init, uniform_init, xavier_init
from .io import load_model, save_model
from .layers import BiLstm, Embedding, Layer, Lstm, LuongAttention, Mlp, dropout_mask
from .optim import Sgd
from .tensor import (
    Parameter,
    Tensor,
    add,
    add_n,
    backward,
    concat,
    constant,
    dot,
    log_softmax_values,
    mask_mul,
    matvec,
    matvec_t,
    mul,
    scale,
    sigmoid,
    softmax,
    softmax_xent,
    stack_rows,
    tanh,
)

__all__ = [
    "BiLstm",
    "Embedding",
    "Layer",
    "Lstm",
    "LuongAttention",
    "Mlp",
    "Parameter",
    "Sgd",
    "Tensor",
    "add",
    "add_n",
    "as_rng",
    "backward",
    "concat",
    "constant",
    "dot",
    "dropout_mask",
    "load_model",
    "log_softmax_values",
    "mask_mul",
    "matvec",
    "matvec_t",
    "mul",
    "orthonormal_init",
    "save_model",
    "scale",
    "sigmoid",
    "softmax",
    "softmax_xent",
    "stack_rows",
    "tanh",
    "uniform_init",
    "xavier_init",
]
