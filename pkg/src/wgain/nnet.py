"""Dense feed-forward networks with hand-rolled backprop.

Only what the imputers need: fully connected layers, four activations,
RMSProp/Adam updates, and per-layer norm clipping. Layer shapes are fixed
at construction; there is no general computation graph and everything runs
in float64.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import InputError
from .validation import as_generator

ACTIVATIONS = ("relu", "elu", "sigmoid", "linear")

ELU_ALPHA = 1.0

# Relative slack on the clipping threshold. Rescaling a layer whose norm
# exceeds the bound leaves the recomputed norm within a few ulp of the
# bound; the slack absorbs that rounding so a second clip is a no-op and
# clipping is exactly idempotent.
_CLIP_SLACK = 1e-12


def _stable_sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0.0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def activate(z: np.ndarray, kind: str) -> np.ndarray:
    if kind == "relu":
        return np.maximum(z, 0.0)
    if kind == "elu":
        return np.where(z > 0.0, z, ELU_ALPHA * np.expm1(np.minimum(z, 0.0)))
    if kind == "sigmoid":
        return _stable_sigmoid(z)
    if kind == "linear":
        return z
    raise InputError(f"unknown activation {kind!r}")


def activate_grad(z: np.ndarray, kind: str) -> np.ndarray:
    """Derivative of the activation with respect to its pre-activation."""
    if kind == "relu":
        return (z > 0.0).astype(np.float64)
    if kind == "elu":
        return np.where(z > 0.0, 1.0, ELU_ALPHA * np.exp(np.minimum(z, 0.0)))
    if kind == "sigmoid":
        s = _stable_sigmoid(z)
        return s * (1.0 - s)
    if kind == "linear":
        return np.ones_like(z)
    raise InputError(f"unknown activation {kind!r}")


@dataclass
class DenseLayer:
    """One fully connected layer: ``y = act(x @ weights + bias)``."""

    weights: np.ndarray  # (in_dim, out_dim)
    bias: np.ndarray  # (out_dim,)
    activation: str

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=np.float64)
        self.bias = np.asarray(self.bias, dtype=np.float64)
        if self.weights.ndim != 2:
            raise InputError("layer weights must be 2-D")
        if self.bias.shape != (self.weights.shape[1],):
            raise InputError(
                f"bias length {self.bias.shape} does not match weight columns "
                f"{self.weights.shape[1]}"
            )
        if self.activation not in ACTIVATIONS:
            raise InputError(f"unknown activation {self.activation!r}")

    @property
    def in_dim(self) -> int:
        return self.weights.shape[0]

    @property
    def out_dim(self) -> int:
        return self.weights.shape[1]

    def param_norm(self) -> float:
        """L2 norm of the layer's full parameter vector (weights and bias)."""
        return math.sqrt(float(np.sum(self.weights**2) + np.sum(self.bias**2)))

    def copy(self) -> "DenseLayer":
        return DenseLayer(self.weights.copy(), self.bias.copy(), self.activation)


@dataclass
class ForwardCache:
    """Per-layer inputs and pre-activations saved by a forward pass."""

    inputs: list  # inputs[i] feeds layer i; inputs[-1] is the network output
    preacts: list  # preacts[i] is layer i's pre-activation


class MLP:
    """A stack of dense layers with explicit forward and backward passes."""

    def __init__(self, layers):
        layers = list(layers)
        if not layers:
            raise InputError("an MLP needs at least one layer")
        for i, (prev, nxt) in enumerate(zip(layers, layers[1:])):
            if prev.out_dim != nxt.in_dim:
                raise InputError(
                    f"layer {i} outputs {prev.out_dim} values but layer {i + 1} "
                    f"expects {nxt.in_dim}"
                )
        self.layers = layers

    @property
    def in_dim(self) -> int:
        return self.layers[0].in_dim

    @property
    def out_dim(self) -> int:
        return self.layers[-1].out_dim

    def _check_input(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.ndim == 1:
            x = x[np.newaxis, :]
        if x.ndim != 2 or x.shape[1] != self.in_dim:
            raise InputError(f"input shape {x.shape} does not match network input dim {self.in_dim}")
        return x

    def forward(self, x) -> np.ndarray:
        """Activations of the final layer for a (batch, in_dim) input."""
        return self.forward_cached(x)[0]

    def forward_cached(self, x):
        """Forward pass returning ``(output, cache)`` for a later backward()."""
        a = self._check_input(x)
        inputs = [a]
        preacts = []
        for layer in self.layers:
            z = a @ layer.weights + layer.bias
            preacts.append(z)
            a = activate(z, layer.activation)
            inputs.append(a)
        return a, ForwardCache(inputs=inputs, preacts=preacts)

    def backward(self, cache: ForwardCache, out_grad):
        """Reverse accumulation from d(loss)/d(output).

        Returns ``(grads, input_grad)`` where ``grads[i]`` is the
        ``(d_weights, d_bias)`` pair for layer ``i``.
        """
        out_grad = np.asarray(out_grad, dtype=np.float64)
        if out_grad.shape != cache.preacts[-1].shape:
            raise InputError(
                f"out_grad shape {out_grad.shape} does not match cached output "
                f"shape {cache.preacts[-1].shape}"
            )
        grads = [None] * len(self.layers)
        delta_a = out_grad
        for i in reversed(range(len(self.layers))):
            layer = self.layers[i]
            delta_z = delta_a * activate_grad(cache.preacts[i], layer.activation)
            grads[i] = (cache.inputs[i].T @ delta_z, delta_z.sum(axis=0))
            delta_a = delta_z @ layer.weights.T
        return grads, delta_a

    def params(self) -> list:
        """Flat list of parameter arrays, weights before bias per layer."""
        out = []
        for layer in self.layers:
            out.append(layer.weights)
            out.append(layer.bias)
        return out

    def copy(self) -> "MLP":
        return MLP([layer.copy() for layer in self.layers])


def flatten_grads(grads) -> list:
    """Flatten backward() layer grads into the params() ordering."""
    out = []
    for dw, db in grads:
        out.append(dw)
        out.append(db)
    return out


def init_mlp(sizes, activations, rng) -> MLP:
    """Glorot-uniform weights and zero biases for the given layer sizes."""
    rng = as_generator(rng)
    if len(activations) != len(sizes) - 1:
        raise InputError("need one activation per layer")
    layers = []
    for fan_in, fan_out, act in zip(sizes, sizes[1:], activations):
        limit = math.sqrt(6.0 / (fan_in + fan_out))
        w = rng.uniform(-limit, limit, size=(fan_in, fan_out))
        layers.append(DenseLayer(w, np.zeros(fan_out), act))
    return MLP(layers)


class RMSProp:
    """Elementwise RMSProp: ``s <- rho*s + (1-rho)*g^2; p <- p - alpha*g/(sqrt(s)+eps)``."""

    def __init__(self, alpha: float = 1e-4, rho: float = 0.9, eps: float = 1e-8):
        if alpha <= 0.0:
            raise InputError("alpha must be positive")
        self.alpha = alpha
        self.rho = rho
        self.eps = eps

    def init_state(self, params) -> list:
        return [np.zeros_like(p) for p in params]

    def step(self, params, grads, state) -> None:
        """Update parameter arrays and squared-gradient caches in place."""
        if not (len(params) == len(grads) == len(state)):
            raise InputError("params, grads and state must align")
        for p, g, s in zip(params, grads, state):
            if p.shape != g.shape or p.shape != s.shape:
                raise InputError("parameter, gradient and state shapes must match")
            s *= self.rho
            s += (1.0 - self.rho) * g * g
            p -= self.alpha * g / (np.sqrt(s) + self.eps)


class AdamState:
    def __init__(self, params):
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]
        self.t = 0


class Adam:
    """Bias-corrected Adam."""

    def __init__(
        self,
        alpha: float = 1e-4,
        beta1: float = 0.9,
        beta2: float = 0.999,
        eps: float = 1e-8,
    ):
        if alpha <= 0.0:
            raise InputError("alpha must be positive")
        self.alpha = alpha
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps

    def init_state(self, params) -> AdamState:
        return AdamState(params)

    def step(self, params, grads, state: AdamState) -> None:
        if not (len(params) == len(grads) == len(state.m)):
            raise InputError("params, grads and state must align")
        state.t += 1
        bc1 = 1.0 - self.beta1**state.t
        bc2 = 1.0 - self.beta2**state.t
        for p, g, m, v in zip(params, grads, state.m, state.v):
            if p.shape != g.shape:
                raise InputError("parameter and gradient shapes must match")
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            p -= self.alpha * (m / bc1) / (np.sqrt(v / bc2) + self.eps)


def clip_l2(net: MLP, w_max: float) -> MLP:
    """Scale each layer so its joint weight+bias L2 norm is at most ``w_max``.

    Mutates the network in place and returns it.
    """
    if w_max <= 0.0:
        raise InputError("w_max must be positive")
    for layer in net.layers:
        norm = layer.param_norm()
        if norm > w_max * (1.0 + _CLIP_SLACK):
            scale = w_max / norm
            layer.weights *= scale
            layer.bias *= scale
    return net


def clip_value(net: MLP, w_max: float) -> MLP:
    """Clamp every weight and bias entry into ``[-w_max, w_max]`` in place."""
    if w_max <= 0.0:
        raise InputError("w_max must be positive")
    for layer in net.layers:
        np.clip(layer.weights, -w_max, w_max, out=layer.weights)
        np.clip(layer.bias, -w_max, w_max, out=layer.bias)
    return net
