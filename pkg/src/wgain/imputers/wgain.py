"""Wasserstein adversarial imputation.

A generator fills missing entries from (noise-corrupted data, mask); a
critic scores (data, mask) pairs and is kept Lipschitz by per-layer norm
clipping after each of its updates. Both train with RMSProp on alternating
steps. The critic objective is

    lambda_critic * (mean f(x_hat, m) - mean f(x, m))

and the generator objective is

    -lambda_gen * mean f(x_hat, m) + lambda_mse * mean ||x_hat - x||^2

where x_hat copies observed entries from x, so the squared-error term only
sees imputed components.
"""

from __future__ import annotations

import math

import numpy as np

from ..exceptions import InputError, TrainingDivergedError
from ..masking import MaskScheme, complete, corrupt, sample_mask
from ..nnet import MLP, RMSProp, clip_l2, clip_value, flatten_grads, init_mlp
from ..validation import as_generator, check_mask, check_matrix, check_same_shape
from .neural import NeuralImputer

CLIP_MODES = ("norm", "value")


def generator_sizes(d: int):
    """Layer widths d*2 -> ceil(1.5 d) -> ceil(1.25 d) -> d."""
    return [2 * d, math.ceil(1.5 * d), math.ceil(1.25 * d), d]


def critic_sizes(d: int):
    return [2 * d, math.ceil(1.5 * d), math.ceil(1.25 * d), 1]


def _critic_io(x, mask):
    return np.concatenate([x, mask], axis=1)


def critic_objective(critic: MLP, x_hat, x, mask, lambda_critic: float) -> float:
    """lambda * (mean critic(x_hat, m) - mean critic(x, m))."""
    return _critic_loss(critic, x_hat, x, mask, lambda_critic, with_grads=False)[0]


def critic_loss_and_grads(critic: MLP, x_hat, x, mask, lambda_critic: float):
    """Critic objective and its gradients in critic.params() order."""
    return _critic_loss(critic, x_hat, x, mask, lambda_critic, with_grads=True)


def _critic_loss(critic, x_hat, x, mask, lambda_critic, with_grads):
    x_hat = check_matrix(x_hat, "x_hat")
    x = check_matrix(x, "x")
    check_same_shape(x_hat, x, ("x_hat", "x"))
    mask = check_mask(mask, x.shape)
    m = x.shape[0]
    f_fake, cache_fake = critic.forward_cached(_critic_io(x_hat, mask))
    f_real, cache_real = critic.forward_cached(_critic_io(x, mask))
    loss = lambda_critic * float(f_fake.mean() - f_real.mean())
    if not with_grads:
        return loss, None
    grads_fake, _ = critic.backward(cache_fake, np.full((m, 1), lambda_critic / m))
    grads_real, _ = critic.backward(cache_real, np.full((m, 1), -lambda_critic / m))
    grads = [
        (gf[0] + gr[0], gf[1] + gr[1]) for gf, gr in zip(grads_fake, grads_real)
    ]
    return loss, flatten_grads(grads)


def generator_objective(
    critic: MLP, x_hat, x, mask, lambda_gen: float, lambda_mse: float
) -> float:
    """-lambda_gen * mean critic(x_hat, m) + lambda_mse * mean ||x_hat - x||^2."""
    x_hat = check_matrix(x_hat, "x_hat")
    x = check_matrix(x, "x")
    check_same_shape(x_hat, x, ("x_hat", "x"))
    mask = check_mask(mask, x.shape)
    f_fake = critic.forward(_critic_io(x_hat, mask))
    mse = float(np.mean(np.sum((x_hat - x) ** 2, axis=1)))
    return -lambda_gen * float(f_fake.mean()) + lambda_mse * mse


def generator_forward(generator: MLP, x, mask, z):
    """Corruption, generator pass, completion; returns (gen_out, cache, x_hat)."""
    x_tilde = corrupt(x, mask, z)
    gen_out, cache = generator.forward_cached(np.concatenate([x_tilde, mask], axis=1))
    return gen_out, cache, complete(gen_out, x, mask)


def generator_loss_and_grads(
    generator: MLP, critic: MLP, x, mask, z, lambda_gen: float, lambda_mse: float
):
    """Generator objective on a frozen batch and its parameter gradients."""
    x = check_matrix(x, "x")
    mask = check_mask(mask, x.shape)
    z = check_matrix(z, "z")
    check_same_shape(x, z, ("x", "z"))
    m, d = x.shape
    gen_out, gen_cache, x_hat = generator_forward(generator, x, mask, z)
    f_fake, critic_cache = critic.forward_cached(_critic_io(x_hat, mask))
    mse = float(np.mean(np.sum((x_hat - x) ** 2, axis=1)))
    loss = -lambda_gen * float(f_fake.mean()) + lambda_mse * mse
    # d(loss)/d(x_hat): adversarial part flows back through the critic's
    # data half, squared-error part is direct; only missing entries reach
    # the generator because complete() blocks the observed ones.
    _, d_critic_in = critic.backward(critic_cache, np.full((m, 1), -lambda_gen / m))
    d_x_hat = d_critic_in[:, :d] + (2.0 * lambda_mse / m) * (x_hat - x)
    grads, _ = generator.backward(gen_cache, d_x_hat * (1.0 - mask))
    return loss, flatten_grads(grads)


class WGAINImputer(NeuralImputer):
    """Adversarially trained imputer with a norm-clipped Wasserstein critic.

    Fit on complete data; impute/transform fills missing entries by running
    the generator on noise-corrupted, standardized inputs and copying
    observed values through untouched.
    """

    def __init__(
        self,
        batch_size: int = 128,
        max_missing_rate: float = 0.3,
        noise_std: float = 0.01,
        lambda_critic: float = 10.0,
        lambda_gen: float = 2.0,
        lambda_mse: float = 1.0,
        clip_norm: float = 1.0,
        learning_rate: float = 1e-4,
        epochs: int = 8000,
        epoch_mode: str = "iteration",
        clip_mode: str = "norm",
        standardize: bool = True,
        random_state=None,
        on_iteration=None,
    ):
        self.batch_size = batch_size
        self.max_missing_rate = max_missing_rate
        self.noise_std = noise_std
        self.lambda_critic = lambda_critic
        self.lambda_gen = lambda_gen
        self.lambda_mse = lambda_mse
        self.clip_norm = clip_norm
        self.learning_rate = learning_rate
        self.epochs = epochs
        self.epoch_mode = epoch_mode
        self.clip_mode = clip_mode
        self.standardize = standardize
        self.random_state = random_state
        self.on_iteration = on_iteration

    def _validate_params(self):
        if not 0.0 < self.max_missing_rate < 1.0:
            raise InputError("max_missing_rate must lie in (0, 1)")
        if self.noise_std <= 0.0:
            raise InputError("noise_std must be positive")
        if self.clip_norm <= 0.0:
            raise InputError("clip_norm must be positive")
        if self.clip_mode not in CLIP_MODES:
            raise InputError(f"clip_mode must be one of {CLIP_MODES}")
        for name in ("lambda_critic", "lambda_gen", "lambda_mse", "learning_rate"):
            if getattr(self, name) <= 0.0:
                raise InputError(f"{name} must be positive")

    def fit(self, X, y=None):
        self._validate_params()
        xs, rng = self._prepare_fit(X)
        n, d = xs.shape
        generator = init_mlp(generator_sizes(d), ["relu", "relu", "linear"], rng)
        critic = init_mlp(critic_sizes(d), ["relu", "relu", "linear"], rng)
        opt_g = RMSProp(alpha=self.learning_rate)
        opt_c = RMSProp(alpha=self.learning_rate)
        state_g = opt_g.init_state(generator.params())
        state_c = opt_c.init_state(critic.params())
        clip = clip_l2 if self.clip_mode == "norm" else clip_value
        scheme = MaskScheme.per_row_uniform(self.max_missing_rate)

        critic_losses = []
        gen_losses = []
        norm_trace = []
        for it, idx in enumerate(self._batch_indices(n, rng)):
            xb = xs[idx]
            mb = sample_mask(scheme, xb.shape[0], d, rng)
            zb = rng.normal(0.0, self.noise_std, size=xb.shape)

            _, _, x_hat = generator_forward(generator, xb, mb, zb)
            if not np.isfinite(x_hat).all():
                raise TrainingDivergedError("generator output became non-finite", it)
            c_loss, c_grads = critic_loss_and_grads(critic, x_hat, xb, mb, self.lambda_critic)
            opt_c.step(critic.params(), c_grads, state_c)
            clip(critic, self.clip_norm)

            g_loss, g_grads = generator_loss_and_grads(
                generator, critic, xb, mb, zb, self.lambda_gen, self.lambda_mse
            )
            opt_g.step(generator.params(), g_grads, state_g)

            critic_losses.append(self._check_finite(c_loss, it))
            gen_losses.append(self._check_finite(g_loss, it))
            norm_trace.append(max(layer.param_norm() for layer in critic.layers))
            if self.on_iteration is not None:
                self.on_iteration(it, critic, generator)

        self.generator_ = generator
        self.critic_ = critic
        self.critic_loss_trace_ = np.asarray(critic_losses)
        self.generator_loss_trace_ = np.asarray(gen_losses)
        self.critic_norm_trace_ = np.asarray(norm_trace)
        return self

    def _proposal(self, x_filled, mask, seed):
        if x_filled.shape[1] != self.n_features_in_:
            raise InputError(
                f"query has {x_filled.shape[1]} features, model expects {self.n_features_in_}"
            )
        rng = as_generator(seed if seed is not None else self.transform_seed_)
        xs = self._to_model_space(x_filled)
        z = rng.normal(0.0, self.noise_std, size=xs.shape)
        x_tilde = corrupt(xs, mask, z)
        gen_out = self.generator_.forward(np.concatenate([x_tilde, mask], axis=1))
        return self._from_model_space(gen_out)
