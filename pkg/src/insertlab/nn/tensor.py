"""Tape-based reverse-mode autodiff over dense float32 numpy arrays.

Each op records its parents and a closure that routes the incoming gradient
backwards. The op set is deliberately small: what MLP + strided-conv chains
and a squashed-Gaussian policy need, nothing more.
"""

from __future__ import annotations

from contextlib import contextmanager

import numpy as np

from ..errors import UsageError

_GRAD_ENABLED = True


@contextmanager
def no_grad():
    """Disable graph recording inside the block (target nets, rollouts)."""
    global _GRAD_ENABLED
    prev = _GRAD_ENABLED
    _GRAD_ENABLED = False
    try:
        yield
    finally:
        _GRAD_ENABLED = prev


def _as_array(value) -> np.ndarray:
    # float64 arrays (and numpy scalars produced by reductions) pass through
    # untouched so gradient checks can run the same graph at double
    # precision; everything else is single precision
    if isinstance(value, (np.ndarray, np.generic)) and value.dtype == np.float64:
        return np.asarray(value)
    return np.asarray(value, dtype=np.float32)


class Tensor:
    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward_fn")

    def __init__(self, data, requires_grad=False, _parents=(), _backward=None):
        self.data = _as_array(data)
        self.grad = None
        self.requires_grad = bool(requires_grad)
        self._parents = _parents
        self._backward_fn = _backward

    # -- introspection -------------------------------------------------
    @property
    def shape(self):
        return self.data.shape

    @property
    def ndim(self):
        return self.data.ndim

    @property
    def size(self):
        return self.data.size

    def __repr__(self):
        return f"Tensor(shape={self.data.shape}, grad={self.grad is not None})"

    def detach(self) -> "Tensor":
        return Tensor(self.data)

    def item(self) -> float:
        return float(self.data)

    # -- graph plumbing ------------------------------------------------
    def _accumulate(self, grad: np.ndarray):
        grad = _unbroadcast(grad, self.data.shape)
        if self.grad is None:
            self.grad = grad.astype(self.data.dtype)
        else:
            self.grad = self.grad + grad

    def zero_grad(self):
        self.grad = None

    def backward(self):
        if self.data.size != 1:
            raise UsageError("backward() requires a scalar loss node")
        topo: list[Tensor] = []
        seen: set[int] = set()
        stack = [(self, False)]
        while stack:
            node, processed = stack.pop()
            if processed:
                topo.append(node)
                continue
            if id(node) in seen:
                continue
            seen.add(id(node))
            stack.append((node, True))
            for parent in node._parents:
                if id(parent) not in seen:
                    stack.append((parent, False))
        self.grad = np.ones_like(self.data)
        for node in reversed(topo):
            if node._backward_fn is not None and node.grad is not None:
                node._backward_fn(node.grad)

    # -- operators -----------------------------------------------------
    def __add__(self, other):
        other = _wrap(other)

        def bwd(g, a=self, b=other):
            a._accumulate(g)
            b._accumulate(g)

        return _node(self.data + other.data, (self, other), bwd)

    __radd__ = __add__

    def __neg__(self):
        def bwd(g, a=self):
            a._accumulate(-g)

        return _node(-self.data, (self,), bwd)

    def __sub__(self, other):
        other = _wrap(other)

        def bwd(g, a=self, b=other):
            a._accumulate(g)
            b._accumulate(-g)

        return _node(self.data - other.data, (self, other), bwd)

    def __rsub__(self, other):
        return _wrap(other) - self

    def __mul__(self, other):
        other = _wrap(other)

        def bwd(g, a=self, b=other):
            a._accumulate(g * b.data)
            b._accumulate(g * a.data)

        return _node(self.data * other.data, (self, other), bwd)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _wrap(other)

        def bwd(g, a=self, b=other):
            a._accumulate(g / b.data)
            b._accumulate(-g * a.data / (b.data * b.data))

        return _node(self.data / other.data, (self, other), bwd)

    def __rtruediv__(self, other):
        return _wrap(other) / self

    def __pow__(self, exponent: float):
        out_data = self.data**exponent

        def bwd(g, a=self, e=exponent):
            a._accumulate(g * e * a.data ** (e - 1))

        return _node(out_data, (self,), bwd)

    def __matmul__(self, other):
        other = _wrap(other)
        if self.data.ndim != 2 or other.data.ndim != 2:
            raise UsageError("matmul supports 2-D operands only")

        def bwd(g, a=self, b=other):
            a._accumulate(g @ b.data.T)
            b._accumulate(a.data.T @ g)

        return _node(self.data @ other.data, (self, other), bwd)

    # -- elementwise nonlinearities -------------------------------------
    def exp(self):
        out_data = np.exp(self.data)

        def bwd(g, a=self, o=out_data):
            a._accumulate(g * o)

        return _node(out_data, (self,), bwd)

    def log(self):
        def bwd(g, a=self):
            a._accumulate(g / a.data)

        return _node(np.log(self.data), (self,), bwd)

    def tanh(self):
        out_data = np.tanh(self.data)

        def bwd(g, a=self, o=out_data):
            a._accumulate(g * (1.0 - o * o))

        return _node(out_data, (self,), bwd)

    def leaky_relu(self, slope: float = 0.01):
        scale = np.where(self.data > 0, 1.0, slope).astype(self.data.dtype)

        def bwd(g, a=self, s=scale):
            a._accumulate(g * s)

        return _node(self.data * scale, (self,), bwd)

    def clip(self, lo: float, hi: float):
        inside = ((self.data > lo) & (self.data < hi)).astype(np.float32)

        def bwd(g, a=self, m=inside):
            a._accumulate(g * m)

        return _node(np.clip(self.data, lo, hi), (self,), bwd)

    # -- reductions / reshapes ------------------------------------------
    def sum(self, axis=None, keepdims=False):
        def bwd(g, a=self, ax=axis, kd=keepdims):
            if ax is not None and not kd:
                g = np.expand_dims(g, ax)
            a._accumulate(np.broadcast_to(g, a.data.shape))

        return _node(self.data.sum(axis=axis, keepdims=keepdims), (self,), bwd)

    def mean(self, axis=None, keepdims=False):
        count = self.data.size if axis is None else self.data.shape[axis]

        def bwd(g, a=self, ax=axis, kd=keepdims, n=count):
            if ax is not None and not kd:
                g = np.expand_dims(g, ax)
            a._accumulate(np.broadcast_to(g, a.data.shape) / n)

        return _node(self.data.mean(axis=axis, keepdims=keepdims), (self,), bwd)

    def reshape(self, *shape):
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        old = self.data.shape

        def bwd(g, a=self, s=old):
            a._accumulate(g.reshape(s))

        return _node(self.data.reshape(shape), (self,), bwd)


def _wrap(value) -> Tensor:
    return value if isinstance(value, Tensor) else Tensor(value)


def _node(data, parents, backward_fn) -> Tensor:
    if not _GRAD_ENABLED:
        return Tensor(data)
    return Tensor(data, _parents=parents, _backward=backward_fn)


def _unbroadcast(grad: np.ndarray, shape) -> np.ndarray:
    """Reduce a broadcast gradient back to the original operand shape."""
    if grad.shape == shape:
        return grad
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, d in enumerate(shape) if d == 1 and grad.shape[i] != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad.reshape(shape)


def concat(tensors, axis=1) -> Tensor:
    tensors = [_wrap(t) for t in tensors]
    sizes = [t.data.shape[axis] for t in tensors]
    offsets = np.cumsum([0] + sizes)

    def bwd(g, ts=tensors, off=offsets, ax=axis):
        for t, lo, hi in zip(ts, off[:-1], off[1:]):
            idx = [slice(None)] * g.ndim
            idx[ax] = slice(lo, hi)
            t._accumulate(g[tuple(idx)])

    return _node(np.concatenate([t.data for t in tensors], axis=axis), tuple(tensors), bwd)


def minimum(a: Tensor, b: Tensor) -> Tensor:
    a, b = _wrap(a), _wrap(b)
    mask = (a.data <= b.data).astype(np.float32)

    def bwd(g, ta=a, tb=b, m=mask):
        ta._accumulate(g * m)
        tb._accumulate(g * (1.0 - m))

    return _node(np.minimum(a.data, b.data), (a, b), bwd)


def conv2d(x: Tensor, w: Tensor, b: Tensor, kernel: int, stride: int) -> Tensor:
    """Valid-padding strided convolution.

    x: (N, H, W, C); w: (kernel*kernel*C, F) flattened row-major over
    (kh, kw, c); b: (F,). Returns (N, OH, OW, F).
    """
    n, h, wd, c = x.data.shape
    if h < kernel or wd < kernel:
        raise UsageError(f"input {h}x{wd} smaller than kernel {kernel}")
    oh = (h - kernel) // stride + 1
    ow = (wd - kernel) // stride + 1
    win = np.lib.stride_tricks.sliding_window_view(x.data, (kernel, kernel), axis=(1, 2))
    win = win[:, ::stride, ::stride]  # (N, OH, OW, C, kh, kw)
    cols = np.ascontiguousarray(win.transpose(0, 1, 2, 4, 5, 3)).reshape(
        n * oh * ow, kernel * kernel * c
    )
    out = cols @ w.data + b.data

    def bwd(g, tx=x, tw=w, tb=b, cc=cols, dims=(n, h, wd, c, oh, ow, kernel, stride)):
        n_, h_, w_, c_, oh_, ow_, k_, s_ = dims
        gf = g.reshape(n_ * oh_ * ow_, -1)
        tw._accumulate(cc.T @ gf)
        tb._accumulate(gf.sum(axis=0))
        if tx.requires_grad or tx._parents:
            dcols = (gf @ tw.data.T).reshape(n_, oh_, ow_, k_, k_, c_)
            dx = np.zeros((n_, h_, w_, c_), dtype=tx.data.dtype)
            for ki in range(k_):
                for kj in range(k_):
                    dx[:, ki : ki + s_ * oh_ : s_, kj : kj + s_ * ow_ : s_, :] += dcols[
                        :, :, :, ki, kj, :
                    ]
            tx._accumulate(dx)

    return _node(out.reshape(n, oh, ow, -1), (x, w, b), bwd)
