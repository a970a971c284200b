"""Off-policy twin-critic learner: deterministic tanh-bounded actor, clipped
target-action smoothing, delayed policy updates, and polyak-averaged target
networks over a uniform ring replay buffer."""

from __future__ import annotations

import copy

import numpy as np

from ..core import BoxSpace
from .losses import td3_target
from .nets import Adam, Mlp, polyak_update


class ReplayBuffer:
    """Fixed-capacity ring of transitions with a uniform sampler.

    Observations/actions are held in the learner's dtype so sampling does
    not re-cast every batch."""

    def __init__(self, obs_dim: int, act_dim: int, capacity: int = 100_000,
                 dtype=np.float32):
        self.capacity = capacity
        self.size = 0
        self._next = 0
        self.obs = np.zeros((capacity, obs_dim), dtype=dtype)
        self.act = np.zeros((capacity, act_dim), dtype=dtype)
        self.rew = np.zeros(capacity)
        self.obs2 = np.zeros((capacity, obs_dim), dtype=dtype)
        self.done = np.zeros(capacity)

    def add(self, obs, act, rew, obs2, done) -> None:
        i = self._next
        self.obs[i] = obs
        self.act[i] = act
        self.rew[i] = rew
        self.obs2[i] = obs2
        self.done[i] = float(done)
        self._next = (i + 1) % self.capacity
        self.size = min(self.size + 1, self.capacity)

    def sample(self, batch_size: int, rng: np.random.Generator):
        if self.size < batch_size:
            raise ValueError("not enough transitions buffered")
        idx = rng.integers(0, self.size, size=batch_size)
        return (self.obs[idx], self.act[idx], self.rew[idx],
                self.obs2[idx], self.done[idx])


class Td3Agent:
    """Networks see observations affinely scaled into the declared unit box
    (a fixed map from the observation-space bounds, not running statistics):
    raw channels spanning [0, 5] next to ones spanning ~0.2 saturate the
    first tanh layer and starve its gradients."""

    def __init__(self, obs_dim: int, act_dim: int, space: BoxSpace,
                 rng: np.random.Generator, hidden: int = 256,
                 lr: float = 1e-3, gamma: float = 0.99, tau: float = 0.005,
                 policy_delay: int = 2, target_noise: float = 0.2,
                 target_noise_clip: float = 0.5, explore_noise: float = 0.1,
                 act_reg: float = 0.3, dtype=np.float32,
                 obs_space: BoxSpace | None = None):
        self.obs_dim = obs_dim
        self.act_dim = act_dim
        self.low = space.low.astype(dtype)
        self.high = space.high.astype(dtype)
        self.center = ((space.high + space.low) / 2.0).astype(dtype)
        self.half = ((space.high - space.low) / 2.0).astype(dtype)
        if obs_space is not None:
            self.obs_center = ((obs_space.high + obs_space.low) / 2.0).astype(dtype)
            self.obs_half = ((obs_space.high - obs_space.low) / 2.0).astype(dtype)
        else:
            self.obs_center = np.zeros(obs_dim, dtype=dtype)
            self.obs_half = np.ones(obs_dim, dtype=dtype)
        self.gamma = gamma
        self.tau = tau
        self.policy_delay = policy_delay
        self.target_noise = target_noise
        self.target_noise_clip = target_noise_clip
        self.explore_noise = explore_noise
        self.act_reg = act_reg
        self._updates = 0

        # near-zero initial policy: the suspension stays still until the
        # critic gives a reason to move it, keeping early replay data in a
        # regime where the attitude penalty is predictable from the action
        self.actor = Mlp([obs_dim, hidden, hidden, act_dim], rng,
                         out_scale=0.01, dtype=dtype)
        self.critic1 = Mlp([obs_dim + act_dim, hidden, hidden, 1], rng,
                           dtype=dtype)
        self.critic2 = Mlp([obs_dim + act_dim, hidden, hidden, 1], rng,
                           dtype=dtype)
        self.actor_target = copy.deepcopy(self.actor)
        self.critic1_target = copy.deepcopy(self.critic1)
        self.critic2_target = copy.deepcopy(self.critic2)
        self.actor_opt = Adam(self.actor.params, lr)
        self.critic1_opt = Adam(self.critic1.params, lr)
        self.critic2_opt = Adam(self.critic2.params, lr)

    def set_lr(self, lr: float) -> None:
        self.actor_opt.lr = lr
        self.critic1_opt.lr = lr
        self.critic2_opt.lr = lr

    # -- acting ----------------------------------------------------------------
    def _bound(self, raw: np.ndarray) -> np.ndarray:
        return self.center + self.half * np.tanh(raw)

    def _scale_obs(self, obs: np.ndarray) -> np.ndarray:
        return (np.asarray(obs, dtype=self.actor.dtype) - self.obs_center) \
            / self.obs_half

    def act(self, obs: np.ndarray) -> np.ndarray:
        """Deterministic policy action, already inside the action bounds."""
        return self._bound(self.actor(self._scale_obs(obs)))[0]

    def act_explore(self, obs: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        noise = rng.normal(0.0, self.explore_noise * self.half)
        return np.clip(self.act(obs) + noise, self.low, self.high)

    # -- learning ----------------------------------------------------------------
    def train_step(self, buffer: ReplayBuffer, batch_size: int,
                   rng: np.random.Generator, update_actor: bool = True) -> dict:
        """One critic update; every policy_delay-th call also updates the
        actor and the target networks. update_actor=False keeps the actor
        and its target frozen (critic pretraining) while the critic targets
        still track."""
        obs, act, rew, obs2, done = buffer.sample(batch_size, rng)
        obs = self._scale_obs(obs)
        obs2 = self._scale_obs(obs2)
        n = obs.shape[0]
        dtype = self.actor.dtype

        # smoothed, clipped target action
        a2 = self._bound(self.actor_target(obs2))
        noise = np.clip(rng.normal(0.0, self.target_noise * self.half,
                                   size=a2.shape).astype(dtype),
                        -self.target_noise_clip * self.half,
                        self.target_noise_clip * self.half)
        a2 = np.clip(a2 + noise, self.low, self.high)
        sa2 = np.concatenate([obs2, a2], axis=1, dtype=dtype)
        y = td3_target(rew, done, self.gamma,
                       self.critic1_target(sa2)[:, 0],
                       self.critic2_target(sa2)[:, 0])

        sa = np.concatenate([obs, act], axis=1, dtype=dtype)
        critic_loss = 0.0
        for critic, opt in ((self.critic1, self.critic1_opt),
                            (self.critic2, self.critic2_opt)):
            q, cache = critic.forward(sa)
            err = q[:, 0] - y
            critic_loss += float(np.mean(err * err))
            grads, _ = critic.backward(cache,
                                       (2.0 * err / n)[:, None].astype(dtype))
            opt.step(critic.params, grads)

        stats = {"critic_loss": critic_loss, "actor_loss": None}
        self._updates += 1
        if self._updates % self.policy_delay == 0:
            if update_actor:
                stats["actor_loss"] = self._actor_step(obs)
                polyak_update(self.actor_target.params, self.actor.params,
                              self.tau)
            polyak_update(self.critic1_target.params, self.critic1.params, self.tau)
            polyak_update(self.critic2_target.params, self.critic2.params, self.tau)
        return stats

    def _actor_step(self, obs: np.ndarray) -> float:
        n = obs.shape[0]
        dtype = self.actor.dtype
        raw, actor_cache = self.actor.forward(obs)
        tanh_raw = np.tanh(raw)
        a_pi = self.center + self.half * tanh_raw
        sa = np.concatenate([obs, a_pi], axis=1, dtype=dtype)
        q, critic_cache = self.critic1.forward(sa)
        # pre-activation pull per action coordinate: keeps the tanh bounding
        # out of its dead zone and holds dimensions the critic is flat in
        # (e.g. turning, where progress is second-order at zero) from
        # saturating on spurious value slopes; genuinely preferred
        # dimensions still win because their value gradients grow as the
        # behavior improves
        reg = self.act_reg * float(np.mean(np.sum(raw * raw, axis=1)))
        loss = -float(np.mean(q)) + reg
        # dq/da through the critic input, then through the tanh bounding
        _, grad_in = self.critic1.backward(critic_cache,
                                           np.full((n, 1), -1.0 / n, dtype=dtype))
        grad_a = grad_in[:, self.obs_dim:]
        grad_raw = (grad_a * self.half * (1.0 - tanh_raw * tanh_raw)
                    + (2.0 * self.act_reg / n) * raw).astype(dtype)
        grads, _ = self.actor.backward(actor_cache, grad_raw)
        self.actor_opt.step(self.actor.params, grads)
        return loss
