"""Algorithm-defining scalar pieces: generalized advantage estimation, the
clipped surrogate objective, and the twin-critic bootstrap target."""

from __future__ import annotations

import numpy as np

from ..core import RoverGymError


class LengthMismatch(RoverGymError):
    pass


def gae(rewards, values, dones, gamma: float, lam: float):
    """Generalized advantage estimation.

    values may carry one extra bootstrap entry for a rollout cut mid-episode;
    without it the terminal bootstrap value is 0. Recursion:
    delta_t = r_t + gamma * v_{t+1} * (1 - done_t) - v_t
    A_t = delta_t + gamma * lam * (1 - done_t) * A_{t+1}
    Returns (advantages, returns) with returns = A + v.
    """
    r = np.asarray(rewards, dtype=np.float64)
    v = np.asarray(values, dtype=np.float64)
    d = np.asarray(dones, dtype=np.float64)
    n = r.shape[0]
    if d.shape[0] != n:
        raise LengthMismatch(f"{n} rewards vs {d.shape[0]} dones")
    if v.shape[0] == n:
        v = np.append(v, 0.0)
    elif v.shape[0] != n + 1:
        raise LengthMismatch(f"{n} rewards vs {v.shape[0]} values")
    adv = np.zeros(n)
    acc = 0.0
    for t in range(n - 1, -1, -1):
        nonterminal = 1.0 - d[t]
        delta = r[t] + gamma * v[t + 1] * nonterminal - v[t]
        acc = delta + gamma * lam * nonterminal * acc
        adv[t] = acc
    return adv, adv + v[:n]


def ppo_surrogate(ratio, advantage, eps: float):
    """Per-sample clipped surrogate objective min(r*A, clip(r)*A)."""
    ratio = np.asarray(ratio, dtype=np.float64)
    advantage = np.asarray(advantage, dtype=np.float64)
    clipped = np.clip(ratio, 1.0 - eps, 1.0 + eps)
    return np.minimum(ratio * advantage, clipped * advantage)


def td3_target(reward, done, gamma: float, q1_target, q2_target):
    """Bootstrap target y = r + gamma * (1 - done) * min(q1', q2')."""
    reward = np.asarray(reward, dtype=np.float64)
    done = np.asarray(done, dtype=np.float64)
    q_min = np.minimum(np.asarray(q1_target, dtype=np.float64),
                       np.asarray(q2_target, dtype=np.float64))
    return reward + gamma * (1.0 - done) * q_min
