"""Autodiff gradients against a central finite-difference oracle."""

import numpy as np
import pytest

from insertlab.errors import UsageError
from insertlab.nn import (
    ParameterSet,
    Tensor,
    concat,
    conv2d_forward,
    init_conv_params,
    init_mlp_params,
    minimum,
    mlp_forward,
)

FD_STEP = 1e-5
FD_RTOL = 1e-4


def finite_difference_grads(loss_fn, params: ParameterSet) -> dict:
    """Central differences, independent of the autodiff tape."""
    grads = {}
    for name, tensor in params.items():
        base = tensor.data.copy()
        g = np.zeros(base.shape, dtype=np.float64)
        flat = base.reshape(-1)
        gflat = g.reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + FD_STEP
            tensor.data = base.reshape(tensor.data.shape)
            hi = float(loss_fn().data)
            flat[i] = orig - FD_STEP
            tensor.data = base.reshape(tensor.data.shape)
            lo = float(loss_fn().data)
            flat[i] = orig
            tensor.data = base.reshape(tensor.data.shape)
            gflat[i] = (hi - lo) / (2 * FD_STEP)
        grads[name] = g
    return grads


def assert_grads_match(loss_fn, params):
    # run the identical graph at float64 so the 1e-5 probe step is not
    # swamped by single-precision rounding
    for name in params.names():
        params[name].data = params[name].data.astype(np.float64)
    params.zero_grad()
    loss = loss_fn()
    params.backward(loss)
    analytic = params.gradients()
    numeric = finite_difference_grads(loss_fn, params)
    for name in params.names():
        a, n = analytic[name], numeric[name]
        scale = np.maximum(np.abs(n), 1e-3)
        rel = np.abs(a - n) / scale
        assert rel.max() < FD_RTOL, f"{name}: max rel err {rel.max():.2e}"


def test_linear_loss_gradient_is_one():
    params = ParameterSet({"a": np.array([1.0, -2.0, 3.0]), "b": np.array([[0.5, 0.5]])})
    loss = params["a"].sum() + params["b"].sum()
    params.backward(loss)
    for t in params.tensors():
        assert np.allclose(t.grad, 1.0)


def test_disconnected_parameter_gets_zero_gradient():
    params = ParameterSet({"used": np.array([2.0]), "unused": np.array([5.0, 5.0])})
    loss = (params["used"] * 3.0).sum()
    params.backward(loss)
    assert np.allclose(params.gradients()["unused"], 0.0)
    assert np.allclose(params.gradients()["used"], 3.0)


def test_backward_rejects_non_scalar():
    t = Tensor(np.ones(3), requires_grad=True)
    with pytest.raises(UsageError):
        (t * 2.0).backward()


def test_repeated_use_accumulates():
    x = Tensor(np.array([3.0]), requires_grad=True)
    y = x * x + x  # dy/dx = 2x + 1 = 7
    y.backward()
    assert np.allclose(x.grad, 7.0)


@pytest.mark.parametrize("seed", range(5))
def test_mlp_gradients_match_finite_differences(seed):
    rng = np.random.default_rng(seed)
    spec = [3, 5, 2]
    params = init_mlp_params(rng, spec)
    x = rng.normal(size=(4, 3)).astype(np.float32)
    target = rng.normal(size=(4, 2)).astype(np.float32)

    def loss_fn():
        out = mlp_forward(params, Tensor(x), spec, "leaky_relu")
        diff = out - Tensor(target)
        return (diff * diff).mean()

    assert_grads_match(loss_fn, params)


@pytest.mark.parametrize("activation", ["tanh", "leaky_relu"])
def test_conv_chain_gradients_match_finite_differences(activation):
    rng = np.random.default_rng(11)
    filters, strides, kernel = (2, 3), (2, 2), 3
    params = init_conv_params(rng, 1, filters, kernel)
    img = rng.normal(size=(2, 9, 9, 1)).astype(np.float32)

    def loss_fn():
        out = conv2d_forward(params, Tensor(img), filters, strides, kernel, activation)
        return (out * out).mean()

    assert_grads_match(loss_fn, params)


def test_mixed_graph_gradients_match_finite_differences():
    # exp/log/tanh/clip/concat/minimum all in one graph
    rng = np.random.default_rng(3)
    params = ParameterSet(
        {
            "w": rng.normal(size=(4, 3)).astype(np.float32) * 0.3,
            "b": rng.normal(size=(3,)).astype(np.float32) * 0.3,
            "s": np.array([0.2], dtype=np.float32),
        }
    )
    x = rng.normal(size=(5, 4)).astype(np.float32)

    def loss_fn():
        h = Tensor(x) @ params["w"] + params["b"]
        a = h.tanh() * params["s"].exp()
        b = (h * h + 1.0).log()
        c = minimum(a, b).clip(-0.8, 0.8)
        joined = concat([c, a], axis=1)
        return (joined * joined).mean() + (params["s"] * params["s"]).sum()

    assert_grads_match(loss_fn, params)


def test_division_and_power_gradients():
    params = ParameterSet({"p": np.array([2.0, 4.0], dtype=np.float32)})

    def loss_fn():
        p = params["p"]
        return ((p**3) / (p + 1.0)).sum()

    assert_grads_match(loss_fn, params)


def test_forward_deterministic():
    rng = np.random.default_rng(0)
    spec = [4, 8, 2]
    params = init_mlp_params(rng, spec)
    x = rng.normal(size=(6, 4)).astype(np.float32)
    a = mlp_forward(params, Tensor(x), spec).data
    b = mlp_forward(params, Tensor(x), spec).data
    assert np.array_equal(a, b)


def test_no_nan_with_bounded_parameters():
    rng = np.random.default_rng(42)
    spec = [6, 16, 3]
    params = init_mlp_params(rng, spec)
    for name in params.names():
        params[name].data = np.clip(params[name].data * 1e3, -1e3, 1e3)
    x = rng.normal(size=(8, 6)).astype(np.float32) * 10
    out = mlp_forward(params, Tensor(x), spec, "tanh")
    loss = (out * out).mean()
    params.backward(loss)
    assert np.isfinite(out.data).all()
    for g in params.gradients().values():
        assert np.isfinite(g).all()
