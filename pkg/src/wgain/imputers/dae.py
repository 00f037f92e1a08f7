"""Denoising-autoencoder imputation.

A single ELU network (three encoder layers up to a code twice the input
width, three decoder layers back down, linear output) is trained to
reconstruct complete rows from zero-filled corruptions. Imputation is one
deterministic forward pass.
"""

from __future__ import annotations

import math

import numpy as np

from ..exceptions import InputError
from ..masking import MaskScheme, corrupt, sample_mask
from ..nnet import Adam, flatten_grads, init_mlp
from .neural import NeuralImputer


def autoencoder_sizes(d: int):
    """Even ramp d -> ceil(4d/3) -> ceil(5d/3) -> 2d and back down to d."""
    up = [d, math.ceil(4 * d / 3), math.ceil(5 * d / 3), 2 * d]
    return up + up[-2::-1]


class DAEImputer(NeuralImputer):
    def __init__(
        self,
        batch_size: int = 128,
        max_missing_rate: float = 0.3,
        learning_rate: float = 1e-4,
        epochs: int = 8000,
        epoch_mode: str = "iteration",
        standardize: bool = True,
        random_state=None,
    ):
        self.batch_size = batch_size
        self.max_missing_rate = max_missing_rate
        self.learning_rate = learning_rate
        self.epochs = epochs
        self.epoch_mode = epoch_mode
        self.standardize = standardize
        self.random_state = random_state

    def fit(self, X, y=None):
        if not 0.0 < self.max_missing_rate < 1.0:
            raise InputError("max_missing_rate must lie in (0, 1)")
        if self.learning_rate <= 0.0:
            raise InputError("learning_rate must be positive")
        xs, rng = self._prepare_fit(X)
        n, d = xs.shape
        sizes = autoencoder_sizes(d)
        net = init_mlp(sizes, ["elu"] * (len(sizes) - 2) + ["linear"], rng)
        opt = Adam(alpha=self.learning_rate)
        state = opt.init_state(net.params())
        scheme = MaskScheme.per_row_uniform(self.max_missing_rate)

        losses = []
        for it, idx in enumerate(self._batch_indices(n, rng)):
            xb = xs[idx]
            mb = sample_mask(scheme, xb.shape[0], d, rng)
            out, cache = net.forward_cached(corrupt(xb, mb, 0.0))
            diff = out - xb
            loss = float(np.mean(np.sum(diff**2, axis=1)))
            grads, _ = net.backward(cache, (2.0 / xb.shape[0]) * diff)
            opt.step(net.params(), flatten_grads(grads), state)
            losses.append(self._check_finite(loss, it))

        self.network_ = net
        self.loss_trace_ = np.asarray(losses)
        return self

    def _proposal(self, x_filled, mask, seed):
        if x_filled.shape[1] != self.n_features_in_:
            raise InputError(
                f"query has {x_filled.shape[1]} features, model expects {self.n_features_in_}"
            )
        xs = self._to_model_space(x_filled)
        out = self.network_.forward(corrupt(xs, mask, 0.0))
        return self._from_model_space(out)
