"""On-policy clipped-surrogate learner: Gaussian policy with state-independent
log-std, separate value network, generalized advantage estimation, and
multi-epoch minibatch updates."""

from __future__ import annotations

import math

import numpy as np

from .nets import Adam, Mlp

LOG_2PI = math.log(2.0 * math.pi)


class PpoAgent:

    def __init__(self, obs_dim: int, act_dim: int, rng: np.random.Generator,
                 hidden: int = 64, lr: float = 3e-4, clip_eps: float = 0.2,
                 epochs: int = 10, minibatch: int = 64):
        self.obs_dim = obs_dim
        self.act_dim = act_dim
        self.clip_eps = clip_eps
        self.epochs = epochs
        self.minibatch = minibatch
        self.policy = Mlp([obs_dim, hidden, hidden, act_dim], rng, out_scale=0.01)
        self.log_std = np.zeros(act_dim)
        self.value = Mlp([obs_dim, hidden, hidden, 1], rng)
        self.policy_opt = Adam(self.policy.params + [self.log_std], lr)
        self.value_opt = Adam(self.value.params, lr)

    # -- acting ---------------------------------------------------------------
    def act(self, obs: np.ndarray, rng: np.random.Generator):
        """Sample an action; returns (action, log_prob, value)."""
        mean = self.policy(obs)[0]
        std = np.exp(self.log_std)
        action = mean + std * rng.standard_normal(self.act_dim)
        return action, self.log_prob(mean, action), float(self.value(obs)[0, 0])

    def mean_action(self, obs: np.ndarray) -> np.ndarray:
        return self.policy(obs)[0]

    def log_prob(self, mean: np.ndarray, action: np.ndarray) -> float:
        z = (action - mean) / np.exp(self.log_std)
        return float(-0.5 * np.sum(z * z) - np.sum(self.log_std)
                     - 0.5 * LOG_2PI * self.act_dim)

    # -- learning ---------------------------------------------------------------
    def update(self, obs, actions, logp_old, advantages, returns,
               rng: np.random.Generator) -> dict:
        """Epochs of shuffled minibatch updates; returns loss statistics."""
        n = obs.shape[0]
        stats = {"policy_loss": 0.0, "value_loss": 0.0, "updates": 0}
        for _ in range(self.epochs):
            order = rng.permutation(n)
            for start in range(0, n, self.minibatch):
                idx = order[start:start + self.minibatch]
                pl = self._policy_step(obs[idx], actions[idx], logp_old[idx],
                                       advantages[idx])
                vl = self._value_step(obs[idx], returns[idx])
                stats["policy_loss"] += pl
                stats["value_loss"] += vl
                stats["updates"] += 1
        return stats

    def _policy_step(self, obs, actions, logp_old, adv) -> float:
        n = obs.shape[0]
        mean, cache = self.policy.forward(obs)
        std = np.exp(self.log_std)
        z = (actions - mean) / std
        logp = -0.5 * np.sum(z * z, axis=1) - np.sum(self.log_std) \
            - 0.5 * LOG_2PI * self.act_dim
        ratio = np.exp(logp - logp_old)
        s1 = ratio * adv
        s2 = np.clip(ratio, 1.0 - self.clip_eps, 1.0 + self.clip_eps) * adv
        loss = -float(np.mean(np.minimum(s1, s2)))
        # gradient flows only through the unclipped branch of the min
        mask = (s1 <= s2).astype(np.float64)
        dlogp = -(adv * ratio * mask) / n
        grad_mean = dlogp[:, None] * (z / std)
        grad_log_std = (dlogp[:, None] * (z * z - 1.0)).sum(axis=0)
        grads, _ = self.policy.backward(cache, grad_mean)
        self.policy_opt.step(self.policy.params + [self.log_std],
                             grads + [grad_log_std])
        return loss

    def _value_step(self, obs, returns) -> float:
        n = obs.shape[0]
        v, cache = self.value.forward(obs)
        err = v[:, 0] - returns
        loss = 0.5 * float(np.mean(err * err))
        grads, _ = self.value.backward(cache, (err / n)[:, None])
        self.value_opt.step(self.value.params, grads)
        return loss
