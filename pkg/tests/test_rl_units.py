"""Learner building blocks: GAE identities and brute-force oracle, clip and
bootstrap-target identities, exact backprop vs central finite differences,
optimizer behavior, replay uniformity, and polyak contraction."""

import math

import numpy as np
import pytest

from rovergym.core import BoxSpace
from rovergym.rl import (Adam, LengthMismatch, Mlp, NonFiniteGradient,
                         PpoAgent, ReplayBuffer, Td3Agent, gae,
                         polyak_update, ppo_surrogate, td3_target)


def gae_bruteforce(rewards, values, dones, gamma, lam):
    """Direct evaluation of the recursive definition, written independently:
    A_t = sum_{l>=0} (gamma*lam)^l * prod-of-nonterminal * delta_{t+l}."""
    n = len(rewards)
    v = list(values) + ([0.0] if len(values) == n else [])
    deltas = [rewards[t] + gamma * v[t + 1] * (1 - dones[t]) - v[t]
              for t in range(n)]
    adv = []
    for t in range(n):
        total = 0.0
        factor = 1.0
        for l in range(t, n):
            total += factor * deltas[l]
            if dones[l]:
                break
            factor *= gamma * lam
        adv.append(total)
    return np.array(adv)


class TestGae:
    def test_undiscounted_returns(self):
        adv, ret = gae([1, 1, 1], [0, 0, 0], [0, 0, 1], 1.0, 1.0)
        assert np.array_equal(adv, [3.0, 2.0, 1.0])
        assert np.array_equal(ret, [3.0, 2.0, 1.0])

    def test_gamma_zero_one_step(self):
        adv, _ = gae([0.5, -1.0, 2.0], [0.1, 0.2, 0.3], [0, 0, 1], 0.0, 0.95)
        assert adv == pytest.approx([0.4, -1.2, 1.7])

    def test_bootstrap_value_used(self):
        adv, _ = gae([0.0], [0.0, 10.0], [0], 0.5, 1.0)
        assert adv[0] == pytest.approx(5.0)

    def test_brute_force_oracle_random_episodes(self):
        rng = np.random.default_rng(12)
        for _ in range(20):
            n = 50
            rewards = rng.standard_normal(n)
            values = rng.standard_normal(n + 1)
            dones = (rng.uniform(size=n) < 0.1).astype(float)
            gamma = rng.uniform(0.9, 1.0)
            lam = rng.uniform(0.8, 1.0)
            adv, ret = gae(rewards, values, dones, gamma, lam)
            expected = gae_bruteforce(rewards, values, dones, gamma, lam)
            assert np.max(np.abs(adv - expected)) < 1e-12
            assert np.max(np.abs(ret - (expected + values[:n]))) < 1e-12

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            gae([1, 2], [0, 0, 0, 0], [0, 0], 0.9, 0.9)
        with pytest.raises(LengthMismatch):
            gae([1, 2], [0, 0], [0], 0.9, 0.9)


class TestPpoSurrogate:
    def test_unclipped_identity(self):
        assert ppo_surrogate(1.0, 2.0, 0.2) == 2.0

    def test_upper_clip_binds(self):
        assert ppo_surrogate(2.0, 1.0, 0.2) == pytest.approx(1.2)

    def test_lower_clip_binds_negative_advantage(self):
        assert ppo_surrogate(0.5, -1.0, 0.2) == pytest.approx(-0.8)

    def test_vectorized(self):
        out = ppo_surrogate([1.0, 2.0, 0.5], [2.0, 1.0, -1.0], 0.2)
        assert out == pytest.approx([2.0, 1.2, -0.8])


class TestTd3Target:
    def test_terminal_no_bootstrap(self):
        assert td3_target(1.0, 1.0, 0.99, 5.0, 7.0) == 1.0

    def test_min_selects_smaller(self):
        assert td3_target(0.0, 0.0, 0.99, 2.0, 3.0) == pytest.approx(1.98)

    def test_noise_clip_rule(self):
        # sampled noise 0.9 clipped at c=0.5 contributes exactly 0.5
        assert float(np.clip(0.9, -0.5, 0.5)) == 0.5


class TestBackprop:
    def test_single_linear_layer(self):
        rng = np.random.default_rng(0)
        net = Mlp([3, 2], rng)
        x = np.array([[1.0, -2.0, 0.5]])
        u = np.array([[1.0, 2.0]])
        _, cache = net.forward(x)
        grads, gx = net.backward(cache, u)
        assert np.allclose(grads[0], x.T @ u)      # dW = x^T u
        assert np.allclose(grads[1], u[0])         # db = u
        assert np.allclose(gx, u @ net.params[0].T)

    def test_zero_upstream_zero_grads(self):
        rng = np.random.default_rng(1)
        net = Mlp([4, 8, 2], rng)
        _, cache = net.forward(rng.standard_normal((3, 4)))
        grads, _ = net.backward(cache, np.zeros((3, 2)))
        assert all(np.all(g == 0) for g in grads)

    @pytest.mark.parametrize("sizes", [[5, 16, 16, 3], [9, 32, 32, 1],
                                       [3, 64, 64, 6], [2, 8, 1]])
    def test_finite_difference_oracle(self, sizes):
        rng = np.random.default_rng(hash(tuple(sizes)) % 2**32)
        net = Mlp(sizes, rng)
        x = rng.standard_normal((4, sizes[0]))
        u = rng.standard_normal((4, sizes[-1]))
        _, cache = net.forward(x)
        grads, _ = net.backward(cache, u)
        analytic = np.concatenate([g.ravel() for g in grads]).copy()
        assert max_fd_rel_error(net, x, u, analytic) < 1e-4

    def test_nonfinite_gradient_detected(self):
        rng = np.random.default_rng(2)
        net = Mlp([2, 4, 1], rng)
        _, cache = net.forward(np.ones((1, 2)))
        with pytest.raises(NonFiniteGradient):
            net.backward(cache, np.array([[np.nan]]))


def max_fd_rel_error(net, x, u, analytic, h=1e-5, n_probe=250):
    """Central finite differences on a random subset of coordinates."""
    flat = net.get_flat()
    rng = np.random.default_rng(0)
    idx = rng.choice(flat.size, size=min(n_probe, flat.size), replace=False)
    worst = 0.0
    for i in idx:
        fp = flat.copy()
        fp[i] += h
        net.set_flat(fp)
        lp = float(np.sum(u * net(x)))
        fp[i] -= 2 * h
        net.set_flat(fp)
        lm = float(np.sum(u * net(x)))
        fd = (lp - lm) / (2 * h)
        rel = abs(analytic[i] - fd) / max(abs(fd), 1e-6)
        worst = max(worst, rel)
    net.set_flat(flat)
    return worst


class TestLossGradients:
    """Finite differences through the actual training losses."""

    def test_ppo_policy_loss_gradient(self):
        rng = np.random.default_rng(5)
        agent = PpoAgent(4, 2, rng, hidden=16)
        obs = rng.standard_normal((8, 4))
        actions = rng.standard_normal((8, 2))
        adv = rng.standard_normal(8)
        mean0, _ = agent.policy.forward(obs)
        std = np.exp(agent.log_std)
        z0 = (actions - mean0) / std
        logp_old = (-0.5 * np.sum(z0 * z0, axis=1) - np.sum(agent.log_std)
                    - 0.5 * math.log(2 * math.pi) * 2)
        # shift params a little so ratios are away from the clip kinks
        for p in agent.policy.params:
            p += 0.01 * rng.standard_normal(p.shape)

        def loss_at(flat):
            agent.policy.set_flat(flat)
            mean, _ = agent.policy.forward(obs)
            z = (actions - mean) / std
            logp = (-0.5 * np.sum(z * z, axis=1) - np.sum(agent.log_std)
                    - 0.5 * math.log(2 * math.pi) * 2)
            ratio = np.exp(logp - logp_old)
            s1 = ratio * adv
            s2 = np.clip(ratio, 0.8, 1.2) * adv
            return -float(np.mean(np.minimum(s1, s2)))

        flat = agent.policy.get_flat()
        # analytic gradient via the agent's own update path
        mean, cache = agent.policy.forward(obs)
        z = (actions - mean) / std
        logp = (-0.5 * np.sum(z * z, axis=1) - np.sum(agent.log_std)
                - 0.5 * math.log(2 * math.pi) * 2)
        ratio = np.exp(logp - logp_old)
        s1 = ratio * adv
        s2 = np.clip(ratio, 0.8, 1.2) * adv
        mask = (s1 <= s2).astype(float)
        dlogp = -(adv * ratio * mask) / 8
        grads, _ = agent.policy.backward(cache, dlogp[:, None] * (z / std))
        analytic = np.concatenate([g.ravel() for g in grads]).copy()

        rng_idx = np.random.default_rng(1)
        idx = rng_idx.choice(flat.size, size=150, replace=False)
        h = 1e-6
        for i in idx:
            fp = flat.copy()
            fp[i] += h
            lp = loss_at(fp)
            fp[i] -= 2 * h
            lm = loss_at(fp)
            fd = (lp - lm) / (2 * h)
            assert abs(analytic[i] - fd) <= 1e-4 * max(abs(fd), 1.0)
        agent.policy.set_flat(flat)

    def test_td3_critic_loss_gradient(self):
        rng = np.random.default_rng(6)
        space = BoxSpace(low=np.array([-1.0]), high=np.array([1.0]))
        agent = Td3Agent(3, 1, space, rng, hidden=16, dtype=np.float64)
        sa = rng.standard_normal((8, 4))
        y = rng.standard_normal(8)

        q, cache = agent.critic1.forward(sa)
        err = q[:, 0] - y
        grads, _ = agent.critic1.backward(cache, (2 * err / 8)[:, None])
        analytic = np.concatenate([g.ravel() for g in grads]).copy()

        def loss_at(flat):
            agent.critic1.set_flat(flat)
            q = agent.critic1(sa)[:, 0]
            return float(np.mean((q - y) ** 2))

        flat = agent.critic1.get_flat()
        idx = np.random.default_rng(2).choice(flat.size, size=150,
                                              replace=False)
        h = 1e-6
        for i in idx:
            fp = flat.copy()
            fp[i] += h
            lp = loss_at(fp)
            fp[i] -= 2 * h
            lm = loss_at(fp)
            fd = (lp - lm) / (2 * h)
            assert abs(analytic[i] - fd) <= 1e-4 * max(abs(fd), 1.0)
        agent.critic1.set_flat(flat)


class TestAdam:
    def test_first_step_is_lr_signed(self):
        p = [np.array([1.0, -1.0])]
        opt = Adam(p, lr=0.1)
        opt.step(p, [np.array([0.5, -2.0])])
        # bias-corrected first step moves by ~lr in the gradient direction
        assert p[0][0] == pytest.approx(1.0 - 0.1, abs=1e-6)
        assert p[0][1] == pytest.approx(-1.0 + 0.1, abs=1e-6)

    def test_converges_on_quadratic(self):
        p = [np.array([5.0])]
        opt = Adam(p, lr=0.1)
        for _ in range(500):
            opt.step(p, [2.0 * p[0]])
        assert abs(p[0][0]) < 1e-3


class TestReplayBuffer:
    def test_ring_overwrite(self):
        buf = ReplayBuffer(1, 1, capacity=10)
        for i in range(25):
            buf.add([i], [0.0], 0.0, [0.0], False)
        assert buf.size == 10
        assert set(buf.obs[:, 0].astype(int)) == set(range(15, 25))

    def test_sample_requires_fill(self):
        buf = ReplayBuffer(1, 1, capacity=10)
        buf.add([0.0], [0.0], 0.0, [0.0], False)
        with pytest.raises(ValueError):
            buf.sample(4, np.random.default_rng(0))

    def test_uniformity(self):
        # 1e5 draws over a 100-item buffer: per-item frequency within 3 sigma
        buf = ReplayBuffer(1, 1, capacity=100)
        for i in range(100):
            buf.add([i], [0.0], 0.0, [0.0], False)
        rng = np.random.default_rng(9)
        counts = np.zeros(100)
        n_draws = 100_000
        for _ in range(n_draws // 100):
            obs, *_ = buf.sample(100, rng)
            idx, c = np.unique(obs[:, 0].astype(int), return_counts=True)
            counts[idx] += c
        expected = n_draws / 100
        sigma = math.sqrt(n_draws * (1 / 100) * (99 / 100))
        assert np.all(np.abs(counts - expected) <= 3.5 * sigma)


class TestPolyak:
    def test_exact_formula(self):
        rng = np.random.default_rng(3)
        theta = [rng.standard_normal((4, 4))]
        target = [rng.standard_normal((4, 4))]
        expected = 0.005 * theta[0] + 0.995 * target[0]
        polyak_update(target, theta, 0.005)
        assert np.allclose(target[0], expected, atol=1e-15)

    def test_contracts_toward_frozen_params(self):
        rng = np.random.default_rng(4)
        theta = [rng.standard_normal((8, 8))]
        target = [rng.standard_normal((8, 8))]
        dist = np.linalg.norm(target[0] - theta[0])
        for _ in range(50):
            polyak_update(target, theta, 0.01)
            new_dist = np.linalg.norm(target[0] - theta[0])
            assert new_dist < dist
            dist = new_dist


class TestTd3Agent:
    def test_actions_inside_bounds(self):
        rng = np.random.default_rng(10)
        space = BoxSpace(low=np.array([-1.0, -2.0]), high=np.array([1.0, 2.0]))
        agent = Td3Agent(3, 2, space, rng)
        for _ in range(100):
            obs = rng.standard_normal(3) * 5
            a = agent.act_explore(obs, rng)
            assert np.all(a >= space.low) and np.all(a <= space.high)

    def test_target_networks_start_identical(self):
        rng = np.random.default_rng(11)
        space = BoxSpace(low=np.array([-1.0]), high=np.array([1.0]))
        agent = Td3Agent(2, 1, space, rng, hidden=8)
        for p, tp in zip(agent.actor.params, agent.actor_target.params):
            assert np.array_equal(p, tp)
