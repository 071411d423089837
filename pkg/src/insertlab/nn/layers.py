"""Named parameter containers and the MLP / conv-chain forward passes."""

from __future__ import annotations

import numpy as np

from ..errors import ConfigurationError, UsageError
from .tensor import Tensor, conv2d

ACTIVATIONS = ("leaky_relu", "tanh", "linear")


class ParameterSet:
    """Mapping name -> trainable Tensor, with gradient slots alongside."""

    def __init__(self, params: dict | None = None):
        self._params: dict[str, Tensor] = {}
        if params:
            for name, value in params.items():
                self.add(name, value)

    def add(self, name: str, value) -> Tensor:
        if name in self._params:
            raise UsageError(f"duplicate parameter name: {name}")
        t = value if isinstance(value, Tensor) else Tensor(value)
        t.requires_grad = True
        self._params[name] = t
        return t

    def __getitem__(self, name: str) -> Tensor:
        return self._params[name]

    def __contains__(self, name: str) -> bool:
        return name in self._params

    def __iter__(self):
        return iter(self._params)

    def __len__(self):
        return len(self._params)

    def names(self):
        return list(self._params)

    def tensors(self):
        return list(self._params.values())

    def items(self):
        return self._params.items()

    def gradients(self) -> dict[str, np.ndarray]:
        """Gradient per parameter; zeros for parameters untouched by backward."""
        return {
            name: (t.grad if t.grad is not None else np.zeros_like(t.data))
            for name, t in self._params.items()
        }

    def zero_grad(self):
        for t in self._params.values():
            t.zero_grad()

    def backward(self, loss: Tensor):
        """Backprop from a scalar loss; unreachable parameters get zero grad."""
        loss.backward()
        for t in self._params.values():
            if t.grad is None:
                t.grad = np.zeros_like(t.data)

    def state_arrays(self) -> dict[str, np.ndarray]:
        return {name: t.data.copy() for name, t in self._params.items()}

    def load_arrays(self, arrays: dict[str, np.ndarray]):
        for name, arr in arrays.items():
            if name not in self._params:
                self.add(name, arr)
            else:
                t = self._params[name]
                if t.data.shape != arr.shape:
                    raise ConfigurationError(
                        f"shape mismatch loading {name}: {t.data.shape} vs {arr.shape}"
                    )
                t.data = arr.astype(np.float32)

    def copy(self) -> "ParameterSet":
        return ParameterSet(self.state_arrays())

    def polyak_update_from(self, source: "ParameterSet", tau: float):
        """theta' <- tau * theta + (1 - tau) * theta'."""
        for name, t in self._params.items():
            t.data = tau * source[name].data + (1.0 - tau) * t.data


def _uniform_fan_in(rng: np.random.Generator, fan_in: int, shape) -> np.ndarray:
    bound = float(np.sqrt(1.0 / max(fan_in, 1)))
    return rng.uniform(-bound, bound, size=shape).astype(np.float32)


def init_mlp_params(rng, layer_spec, prefix="") -> ParameterSet:
    """Weights/biases for widths [in, h1, ..., out], fan-in uniform init."""
    if len(layer_spec) < 2:
        raise ConfigurationError("layer_spec needs at least input and output widths")
    params = ParameterSet()
    for i, (n_in, n_out) in enumerate(zip(layer_spec[:-1], layer_spec[1:])):
        params.add(f"{prefix}w{i}", _uniform_fan_in(rng, n_in, (n_in, n_out)))
        params.add(f"{prefix}b{i}", _uniform_fan_in(rng, n_in, (n_out,)))
    return params


def init_conv_params(rng, in_channels, filters, kernel, prefix="") -> ParameterSet:
    params = ParameterSet()
    c = in_channels
    for i, f in enumerate(filters):
        fan_in = kernel * kernel * c
        params.add(f"{prefix}conv{i}_w", _uniform_fan_in(rng, fan_in, (fan_in, f)))
        params.add(f"{prefix}conv{i}_b", np.zeros(f, dtype=np.float32))
        c = f
    return params


def _activate(x: Tensor, activation: str) -> Tensor:
    if activation == "leaky_relu":
        return x.leaky_relu(0.01)
    if activation == "tanh":
        return x.tanh()
    if activation == "linear":
        return x
    raise ConfigurationError(f"unknown activation {activation!r}")


def mlp_forward(params: ParameterSet, x: Tensor, layer_spec, activation="leaky_relu",
                prefix="") -> Tensor:
    """Fully-connected chain; hidden layers activated, output linear."""
    if not isinstance(x, Tensor):
        x = Tensor(x)
    if x.ndim == 1:
        x = x.reshape(1, -1)
    if not layer_spec or len(layer_spec) < 2:
        raise ConfigurationError("layer_spec must list input and output widths")
    if x.shape[1] != layer_spec[0]:
        raise ConfigurationError(
            f"input width {x.shape[1]} does not match layer_spec[0]={layer_spec[0]}"
        )
    n_layers = len(layer_spec) - 1
    for i in range(n_layers):
        w, b = params[f"{prefix}w{i}"], params[f"{prefix}b{i}"]
        if w.shape != (layer_spec[i], layer_spec[i + 1]):
            raise ConfigurationError(f"weight {prefix}w{i} has shape {w.shape}")
        x = x @ w + b
        if i < n_layers - 1:
            x = _activate(x, activation)
    return x


def conv2d_forward(params: ParameterSet, image: Tensor, filters, strides, kernel,
                   activation="leaky_relu", prefix="") -> Tensor:
    """Strided valid conv chain over an (N,H,W,C) or (H,W,C) image."""
    if not isinstance(image, Tensor):
        image = Tensor(image)
    squeeze = image.ndim == 3
    if squeeze:
        image = image.reshape((1,) + image.shape)
    if image.ndim != 4:
        raise ConfigurationError(f"expected HxWxC or NxHxWxC image, got {image.shape}")
    if len(filters) != len(strides):
        raise ConfigurationError("filters and strides must have equal length")
    x = image
    for i, (f, s) in enumerate(zip(filters, strides)):
        w, b = params[f"{prefix}conv{i}_w"], params[f"{prefix}conv{i}_b"]
        h, wd = x.shape[1], x.shape[2]
        if h < kernel or wd < kernel:
            raise ConfigurationError(
                f"layer {i}: spatial dims {h}x{wd} incompatible with kernel {kernel}"
            )
        x = conv2d(x, w, b, kernel, s)
        x = _activate(x, activation)
    if squeeze:
        x = x.reshape(x.shape[1:])
    return x


def conv_output_shape(size: int, filters, strides, kernel) -> tuple[int, int]:
    """(spatial, channels) after the conv chain on a size x size input."""
    s = size
    for stride in strides:
        s = (s - kernel) // stride + 1
    return s, filters[-1]
