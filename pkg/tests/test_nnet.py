"""Forward/backward correctness, optimizer updates, and norm clipping."""

import numpy as np
import pytest

from wgain.exceptions import InputError
from wgain.nnet import (
    ACTIVATIONS,
    Adam,
    DenseLayer,
    MLP,
    RMSProp,
    clip_l2,
    clip_value,
    flatten_grads,
    init_mlp,
)


def single_layer(w, b, activation="linear"):
    return MLP([DenseLayer(np.asarray(w, float), np.asarray(b, float), activation)])


class TestForward:
    def test_identity_linear_layer(self):
        net = single_layer(np.eye(2), [0.0, 0.0])
        np.testing.assert_array_equal(net.forward([1.0, 2.0]), [[1.0, 2.0]])

    def test_relu_clamps_negatives(self):
        net = single_layer(np.eye(2), [0.0, 0.0], "relu")
        np.testing.assert_array_equal(net.forward([-1.0, 3.0]), [[0.0, 3.0]])

    def test_hand_computed_affine(self):
        net = single_layer([[1.0, 0.0], [1.0, 1.0]], [0.5, 0.0])
        np.testing.assert_allclose(net.forward([1.0, 1.0]), [[2.5, 1.0]])

    def test_dimension_mismatch_rejected(self):
        net = single_layer(np.eye(2), [0.0, 0.0])
        with pytest.raises(InputError):
            net.forward([1.0, 2.0, 3.0])

    def test_incompatible_layers_rejected(self):
        l1 = DenseLayer(np.eye(2), np.zeros(2), "relu")
        l2 = DenseLayer(np.eye(3), np.zeros(3), "linear")
        with pytest.raises(InputError):
            MLP([l1, l2])


class TestBackward:
    def test_zero_out_grad_gives_zero_grads(self):
        net = init_mlp([3, 4, 2], ["relu", "linear"], np.random.default_rng(0))
        x = np.random.default_rng(1).normal(size=(5, 3))
        out, cache = net.forward_cached(x)
        grads, input_grad = net.backward(cache, np.zeros_like(out))
        for dw, db in grads:
            assert not dw.any() and not db.any()
        assert not input_grad.any()

    def test_sum_loss_weight_grad_is_xT_ones(self):
        net = single_layer(np.zeros((3, 2)), [0.0, 0.0])
        x = np.array([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]])
        _, cache = net.forward_cached(x)
        grads, _ = net.backward(cache, np.ones((2, 2)))
        np.testing.assert_allclose(grads[0][0], x.T @ np.ones((2, 2)))
        np.testing.assert_allclose(grads[0][1], [2.0, 2.0])

    def test_shape_mismatch_with_cache_rejected(self):
        net = single_layer(np.eye(2), [0.0, 0.0])
        _, cache = net.forward_cached([[1.0, 2.0]])
        with pytest.raises(InputError):
            net.backward(cache, np.ones((3, 2)))


def finite_difference_grads(net, x, direction, step=1e-5):
    """Central differences of loss(p) = sum(direction * net.forward(x))."""

    def loss():
        return float(np.sum(direction * net.forward(x)))

    fd = []
    for p in net.params():
        g = np.zeros_like(p)
        it = np.nditer(p, flags=["multi_index"])
        for _ in it:
            idx = it.multi_index
            orig = p[idx]
            p[idx] = orig + step
            up = loss()
            p[idx] = orig - step
            down = loss()
            p[idx] = orig
            g[idx] = (up - down) / (2.0 * step)
        fd.append(g)
    return fd


def relative_error(a, b):
    return np.abs(a - b) / np.maximum.reduce([np.abs(a), np.abs(b), np.ones_like(a)])


def make_safe_net_and_input(activation, seed, sizes=(4, 6, 5, 3), kink_gap=1e-3):
    """Random net and batch whose pre-activations stay away from the relu/elu
    kink at 0, where finite differences are invalid."""
    for attempt in range(50):
        rng = np.random.default_rng((seed, attempt))
        acts = [activation] * (len(sizes) - 2) + ["linear"]
        net = init_mlp(list(sizes), acts, rng)
        for layer in net.layers:
            layer.bias[:] = rng.uniform(-0.5, 0.5, size=layer.bias.shape)
        x = rng.uniform(-2.0, 2.0, size=(3, sizes[0]))
        _, cache = net.forward_cached(x)
        if all(np.abs(z).min() > kink_gap for z in cache.preacts):
            return net, x, rng
    raise AssertionError("could not find a kink-free configuration")


@pytest.mark.parametrize("activation", ACTIVATIONS)
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_backward_matches_finite_differences(activation, seed):
    net, x, rng = make_safe_net_and_input(activation, seed)
    direction = rng.normal(size=(3, net.out_dim))
    out, cache = net.forward_cached(x)
    grads, input_grad = net.backward(cache, direction)
    analytic = flatten_grads(grads)
    numeric = finite_difference_grads(net, x, direction)
    for a, n in zip(analytic, numeric):
        assert relative_error(a, n).max() < 1e-5

    # input gradient via finite differences too
    fd_input = np.zeros_like(x)
    step = 1e-5
    for idx in np.ndindex(*x.shape):
        orig = x[idx]
        x[idx] = orig + step
        up = float(np.sum(direction * net.forward(x)))
        x[idx] = orig - step
        down = float(np.sum(direction * net.forward(x)))
        x[idx] = orig
        fd_input[idx] = (up - down) / (2.0 * step)
    assert relative_error(input_grad, fd_input).max() < 1e-5


@pytest.mark.parametrize("seed", range(5))
def test_forward_backward_finite_on_bounded_nets(seed):
    rng = np.random.default_rng(seed)
    net = init_mlp([6, 8, 8, 4], ["relu", "elu", "sigmoid"], rng)
    for layer in net.layers:  # push parameter norms toward the allowed bound
        norm = layer.param_norm()
        if norm > 0:
            layer.weights *= 10.0 / norm * 0.9
    x = rng.uniform(-2.0, 2.0, size=(16, 6))
    out, cache = net.forward_cached(x)
    assert np.isfinite(out).all()
    grads, input_grad = net.backward(cache, rng.normal(size=out.shape))
    assert all(np.isfinite(dw).all() and np.isfinite(db).all() for dw, db in grads)
    assert np.isfinite(input_grad).all()


class TestRMSProp:
    def test_zero_gradient_leaves_params_and_decays_cache(self):
        opt = RMSProp(alpha=0.1, rho=0.9, eps=1e-8)
        p = np.array([1.0, -2.0])
        state = [np.array([0.5, 0.5])]
        opt.step([p], [np.zeros(2)], state)
        np.testing.assert_array_equal(p, [1.0, -2.0])
        np.testing.assert_allclose(state[0], [0.45, 0.45])

    def test_hand_computed_update(self):
        # s = 0.1, w = -0.1/sqrt(0.1)
        opt = RMSProp(alpha=0.1, rho=0.9, eps=0.0)
        p = np.array([0.0])
        state = opt.init_state([p])
        opt.step([p], [np.array([1.0])], state)
        np.testing.assert_allclose(state[0], [0.1])
        np.testing.assert_allclose(p, [-0.1 / np.sqrt(0.1)])
        assert abs(p[0] + 0.31622776601683794) < 1e-15

    def test_default_learning_rate(self):
        assert RMSProp().alpha == 0.0001

    def test_rejects_nonpositive_alpha(self):
        with pytest.raises(InputError):
            RMSProp(alpha=0.0)


class TestAdam:
    def test_zero_gradient_from_zero_moments_leaves_params(self):
        opt = Adam(alpha=0.1)
        p = np.array([3.0])
        state = opt.init_state([p])
        opt.step([p], [np.zeros(1)], state)
        np.testing.assert_array_equal(p, [3.0])
        assert state.t == 1

    def test_hand_computed_first_step(self):
        # bias-corrected m_hat = v_hat = 1 -> w = -alpha
        opt = Adam(alpha=0.1, beta1=0.9, beta2=0.999, eps=0.0)
        p = np.array([0.0])
        state = opt.init_state([p])
        opt.step([p], [np.array([1.0])], state)
        np.testing.assert_allclose(p, [-0.1], atol=1e-15)

    def test_default_learning_rate(self):
        assert Adam().alpha == 0.0001


class TestClipping:
    def test_layer_above_threshold_is_scaled(self):
        net = single_layer([[2.0]], [0.0])
        clip_l2(net, 1.0)
        np.testing.assert_allclose(net.layers[0].weights, [[1.0]])

    def test_layer_below_threshold_unchanged(self):
        net = single_layer([[0.5]], [0.0])
        w_before = net.layers[0].weights.copy()
        clip_l2(net, 1.0)
        np.testing.assert_array_equal(net.layers[0].weights, w_before)

    def test_three_four_scales_to_unit_norm(self):
        net = single_layer([[3.0], [4.0]], [0.0])
        clip_l2(net, 1.0)
        np.testing.assert_allclose(net.layers[0].weights.ravel(), [0.6, 0.8], rtol=1e-12)
        assert abs(net.layers[0].param_norm() - 1.0) < 1e-12

    def test_bias_included_in_norm(self):
        net = single_layer([[3.0]], [4.0])
        clip_l2(net, 1.0)
        np.testing.assert_allclose(net.layers[0].weights, [[0.6]], rtol=1e-12)
        np.testing.assert_allclose(net.layers[0].bias, [0.8], rtol=1e-12)

    @pytest.mark.parametrize("seed", range(10))
    def test_clip_is_exactly_idempotent(self, seed):
        rng = np.random.default_rng(seed)
        net = init_mlp([5, 7, 3], ["relu", "linear"], rng)
        for layer in net.layers:
            layer.weights *= rng.uniform(0.5, 4.0)
        clip_l2(net, 1.0)
        snapshot = [(l.weights.copy(), l.bias.copy()) for l in net.layers]
        clip_l2(net, 1.0)
        for layer, (w, b) in zip(net.layers, snapshot):
            np.testing.assert_array_equal(layer.weights, w)
            np.testing.assert_array_equal(layer.bias, b)

    def test_value_clip_clamps_entries(self):
        net = single_layer([[3.0], [-4.0]], [0.5])
        clip_value(net, 1.0)
        np.testing.assert_array_equal(net.layers[0].weights.ravel(), [1.0, -1.0])
        np.testing.assert_array_equal(net.layers[0].bias, [0.5])

    def test_rejects_nonpositive_w_max(self):
        net = single_layer([[1.0]], [0.0])
        with pytest.raises(InputError):
            clip_l2(net, 0.0)
        with pytest.raises(InputError):
            clip_value(net, -1.0)
