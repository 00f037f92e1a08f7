"""GAIN-style adversarial imputation.

The discriminator predicts, per component, whether a value was observed or
imputed, guided by a hint matrix that reveals most of the true mask. The
generator is trained to fool it on missing components while keeping the
completed vector close to the data under squared error. Both networks use
Adam and hidden layers as wide as the data.
"""

from __future__ import annotations

import numpy as np

from ..exceptions import InputError, TrainingDivergedError
from ..masking import MaskScheme, complete, corrupt, sample_mask
from ..nnet import MLP, Adam, flatten_grads, init_mlp
from ..validation import as_generator, check_mask
from .neural import NeuralImputer

_LOG_EPS = 1e-8


def gain_hint(mask, hint_rate: float, seed) -> np.ndarray:
    """Hint matrix H = B*m + 0.5*(1-B) with B ~ Bernoulli(hint_rate).

    Revealed entries copy the mask; concealed ones read 0.5.
    """
    if not 0.0 <= hint_rate <= 1.0:
        raise InputError("hint_rate must lie in [0, 1]")
    mask = check_mask(mask)
    rng = as_generator(seed)
    b = (rng.random(mask.shape) < hint_rate).astype(np.float64)
    return b * mask + 0.5 * (1.0 - b)


def discriminator_loss_and_grads(disc: MLP, x_hat, mask, hint):
    """Mean binary cross-entropy between the mask and D(x_hat, H)."""
    n_entries = mask.size
    d_in = np.concatenate([x_hat, hint], axis=1)
    d_prob, cache = disc.forward_cached(d_in)
    loss = -float(
        np.mean(mask * np.log(d_prob + _LOG_EPS) + (1.0 - mask) * np.log(1.0 - d_prob + _LOG_EPS))
    )
    d_grad = -(mask / (d_prob + _LOG_EPS) - (1.0 - mask) / (1.0 - d_prob + _LOG_EPS)) / n_entries
    grads, _ = disc.backward(cache, d_grad)
    return loss, flatten_grads(grads)


def gain_generator_loss_and_grads(generator: MLP, disc: MLP, x, mask, z, hint, lambda_mse: float):
    """Adversarial loss plus reconstruction error of the completed vector.

    Both terms are means over the missing entries: observed components of
    the completed vector equal the data by construction, so they carry no
    reconstruction error, and the discriminator term only rewards fooling
    it where something was actually imputed.
    """
    d = x.shape[1]
    x_tilde = corrupt(x, mask, z)
    gen_out, gen_cache = generator.forward_cached(np.concatenate([x_tilde, mask], axis=1))
    x_hat = complete(gen_out, x, mask)
    d_prob, disc_cache = disc.forward_cached(np.concatenate([x_hat, hint], axis=1))

    n_miss = float((1.0 - mask).sum())
    adv = 0.0
    rec = 0.0
    d_x_hat = np.zeros_like(x)
    if n_miss > 0:
        adv = -float(np.sum((1.0 - mask) * np.log(d_prob + _LOG_EPS))) / n_miss
        d_prob_grad = -((1.0 - mask) / (d_prob + _LOG_EPS)) / n_miss
        _, d_disc_in = disc.backward(disc_cache, d_prob_grad)
        rec = float(np.sum((x_hat - x) ** 2)) / n_miss
        d_x_hat = d_disc_in[:, :d] + 2.0 * lambda_mse * (x_hat - x) / n_miss

    loss = adv + lambda_mse * rec
    grads, _ = generator.backward(gen_cache, d_x_hat * (1.0 - mask))
    return loss, flatten_grads(grads)


class GAINImputer(NeuralImputer):
    """Adversarial imputer with a hint-guided sigmoid discriminator."""

    def __init__(
        self,
        batch_size: int = 128,
        missing_rate: float = 0.2,
        hint_rate: float = 0.9,
        noise_std: float = 0.01,
        lambda_mse: float = 1.0,
        learning_rate: float = 1e-4,
        epochs: int = 7000,
        epoch_mode: str = "iteration",
        standardize: bool = True,
        random_state=None,
    ):
        self.batch_size = batch_size
        self.missing_rate = missing_rate
        self.hint_rate = hint_rate
        self.noise_std = noise_std
        self.lambda_mse = lambda_mse
        self.learning_rate = learning_rate
        self.epochs = epochs
        self.epoch_mode = epoch_mode
        self.standardize = standardize
        self.random_state = random_state

    def _validate_params(self):
        if not 0.0 < self.missing_rate < 1.0:
            raise InputError("missing_rate must lie in (0, 1)")
        if not 0.0 <= self.hint_rate <= 1.0:
            raise InputError("hint_rate must lie in [0, 1]")
        if self.noise_std <= 0.0:
            raise InputError("noise_std must be positive")
        if self.lambda_mse <= 0.0 or self.learning_rate <= 0.0:
            raise InputError("lambda_mse and learning_rate must be positive")

    def fit(self, X, y=None):
        self._validate_params()
        xs, rng = self._prepare_fit(X)
        n, d = xs.shape
        # hidden layers all d wide; discriminator ends in a sigmoid over
        # per-component observed/imputed probabilities
        generator = init_mlp([2 * d, d, d, d], ["relu", "relu", "linear"], rng)
        disc = init_mlp([2 * d, d, d, d], ["relu", "relu", "sigmoid"], rng)
        opt_g = Adam(alpha=self.learning_rate)
        opt_d = Adam(alpha=self.learning_rate)
        state_g = opt_g.init_state(generator.params())
        state_d = opt_d.init_state(disc.params())
        scheme = MaskScheme.fixed_rate(self.missing_rate)

        disc_losses = []
        gen_losses = []
        for it, idx in enumerate(self._batch_indices(n, rng)):
            xb = xs[idx]
            mb = sample_mask(scheme, xb.shape[0], d, rng)
            zb = rng.normal(0.0, self.noise_std, size=xb.shape)
            hint = gain_hint(mb, self.hint_rate, rng)

            x_tilde = corrupt(xb, mb, zb)
            gen_out = generator.forward(np.concatenate([x_tilde, mb], axis=1))
            x_hat = complete(gen_out, xb, mb)
            if not np.isfinite(x_hat).all():
                raise TrainingDivergedError("generator output became non-finite", it)
            d_loss, d_grads = discriminator_loss_and_grads(disc, x_hat, mb, hint)
            opt_d.step(disc.params(), d_grads, state_d)

            g_loss, g_grads = gain_generator_loss_and_grads(
                generator, disc, xb, mb, zb, hint, self.lambda_mse
            )
            opt_g.step(generator.params(), g_grads, state_g)

            disc_losses.append(self._check_finite(d_loss, it))
            gen_losses.append(self._check_finite(g_loss, it))

        self.generator_ = generator
        self.discriminator_ = disc
        self.discriminator_loss_trace_ = np.asarray(disc_losses)
        self.generator_loss_trace_ = np.asarray(gen_losses)
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
