"""Environment contract: spaces, lifecycle state machine, registry,
determinism, and the render frame schema."""

import json

import numpy as np
import pytest

import rovergym
from rovergym import (BoxSpace, NonFiniteAction, NotReset, RenderFrame,
                      SteppedAfterDone, UnknownEnvironment, make, sample)
from rovergym.core import ENV_ID_PATTERN, RngStreams, register


def test_make_known_envs():
    env = make("lsd_force_lidar-v0", 0)
    assert env.observation_space.dim == 3
    assert env.action_space.dim == 6
    env = make("leo_nav-v0", 0)
    assert env.action_space.dim == 2


def test_make_unknown_env():
    with pytest.raises(UnknownEnvironment):
        make("nope-v0", 0)


def test_registry_dims_match_constructed_envs():
    for env_id, spec in rovergym.registry().items():
        env = make(env_id, 0)
        assert env.observation_space.dim == spec.obs_dim, env_id
        assert env.action_space.dim == spec.act_dim, env_id


def test_registry_id_pattern():
    assert ENV_ID_PATTERN.match("lsd_force_lidar-v0")
    assert not ENV_ID_PATTERN.match("BadName-v0")
    assert not ENV_ID_PATTERN.match("lsd-v")
    with pytest.raises(ValueError):
        register("Bad-v0", lambda seed: None, 1, 1)
    with pytest.raises(ValueError):
        register("lsd_force_lidar-v0", lambda seed: None, 1, 1)  # duplicate


class TestLifecycle:
    def test_step_before_reset(self):
        env = make("drive_to_target-v0", 0)
        with pytest.raises(NotReset):
            env.step(np.zeros(1))

    def test_get_observation_before_reset(self):
        env = make("drive_to_target-v0", 0)
        with pytest.raises(NotReset):
            env.get_observation()

    def test_render_before_reset(self):
        env = make("drive_to_target-v0", 0)
        with pytest.raises(NotReset):
            env.render()

    def test_step_after_done(self):
        env = make("drive_to_target-v0", 0)
        env.reset()
        done = False
        while not done:
            done = env.step(np.array([1.5])).done
        with pytest.raises(SteppedAfterDone):
            env.step(np.array([0.0]))

    def test_reset_after_done_allows_stepping(self):
        env = make("drive_to_target-v0", 0)
        env.reset()
        done = False
        while not done:
            done = env.step(np.array([1.5])).done
        obs = env.reset()
        assert obs.shape == (1,)
        result = env.step(np.array([0.5]))
        assert not result.done

    def test_nonfinite_action_rejected(self):
        env = make("lsd_force_lidar-v0", 0)
        env.reset()
        bad = np.zeros(6)
        bad[2] = np.nan
        with pytest.raises(NonFiniteAction):
            env.step(bad)
        bad[2] = np.inf
        with pytest.raises(NonFiniteAction):
            env.step(bad)

    def test_sample_step_loop_terminates_and_resets(self):
        env = make("lsd_force_lidar-v0", 5)
        env.reset()
        rng = np.random.default_rng(1)
        done = False
        while not done:
            done = env.step(sample(env.action_space, rng)).done
        obs = env.reset()
        assert env.observation_space.contains(obs)


class TestDeterminism:
    def test_identical_trajectories(self):
        rng = np.random.default_rng(3)
        actions = [rng.uniform(-1, 1, size=6) * [1, 1, 1, 1, 1.5, 2]
                   for _ in range(300)]
        rewards = []
        observations = []
        for _ in range(2):
            env = make("lsd_force_lidar-v0", 42)
            obs = [env.reset()]
            rew = []
            for a in actions:
                result = env.step(a)
                obs.append(result.observation)
                rew.append(result.reward)
                if result.done:
                    break
            rewards.append(rew)
            observations.append(np.vstack(obs))
        assert rewards[0] == rewards[1]  # bit-identical, no tolerance
        assert np.array_equal(observations[0], observations[1])

    def test_reset_same_seed_same_obs(self):
        a = make("lsd_force_lidar-v0", 9).reset()
        b = make("lsd_force_lidar-v0", 9).reset()
        assert np.array_equal(a, b)

    def test_named_streams_independent(self):
        hub1 = RngStreams(7)
        a_first = hub1.stream("a").standard_normal(4)
        hub2 = RngStreams(7)
        hub2.stream("b").standard_normal(100)  # extra consumer
        a_second = hub2.stream("a").standard_normal(4)
        assert np.array_equal(a_first, a_second)


class TestGetObservation:
    def test_pure_between_steps(self):
        env = make("lsd_force_lidar-v0", 0)
        env.reset()
        env.step(np.array([0.2, 0, 0, 0, 1.0, 0.1]))
        a = env.get_observation()
        b = env.get_observation()
        assert np.array_equal(a, b)
        c = env.get_observation()
        assert np.array_equal(b, c)

    def test_matches_step_result(self):
        env = make("lsd_force_lidar-v0", 0)
        env.reset()
        result = env.step(np.array([0, 0, 0, 0, 0.7, 0.0]))
        assert np.array_equal(result.observation, env.get_observation())

    def test_returned_array_is_a_copy(self):
        env = make("drive_to_target-v0", 0)
        env.reset()
        obs = env.get_observation()
        obs[0] = 123.0
        assert env.get_observation()[0] != 123.0


class TestBoxSpace:
    def test_invariants(self):
        with pytest.raises(ValueError):
            BoxSpace(low=np.array([0.0, 0.0]), high=np.array([1.0]))
        with pytest.raises(ValueError):
            BoxSpace(low=np.array([1.0]), high=np.array([1.0]))  # low < high
        with pytest.raises(ValueError):
            BoxSpace(low=np.array([np.nan]), high=np.array([1.0]))

    def test_sample_within_degenerate_band(self):
        space = BoxSpace(low=np.array([0.5 - 1e-9]), high=np.array([0.5 + 1e-9]))
        rng = np.random.default_rng(0)
        for _ in range(100):
            v = space.sample(rng)
            assert space.contains(v)

    def test_sample_mean(self):
        # CLT: mean of 1e4 uniforms on [-1, 1] has sigma ~ 0.0058
        space = BoxSpace(low=np.array([-1.0]), high=np.array([1.0]))
        rng = np.random.default_rng(123)
        draws = np.array([space.sample(rng)[0] for _ in range(10_000)])
        assert abs(draws.mean()) < 0.05

    def test_sample_deterministic(self):
        space = BoxSpace(low=np.array([-2.0, 0.0]), high=np.array([2.0, 1.0]))
        a = space.sample(np.random.default_rng(5))
        b = space.sample(np.random.default_rng(5))
        assert np.array_equal(a, b)

    def test_clip(self):
        space = BoxSpace(low=np.array([-1.0, -1.0]), high=np.array([1.0, 1.0]))
        clipped = space.clip([5.0, -0.5])
        assert np.array_equal(clipped, [1.0, -0.5])

    def test_actions_clipped_into_bounds(self):
        env = make("lsd_force_lidar-v0", 0)
        env.reset()
        rng = np.random.default_rng(8)
        for _ in range(50):
            wild = rng.uniform(-50, 50, size=6)
            result = env.step(wild)
            assert env.observation_space.contains(result.observation, atol=1e-9)
            if result.done:
                env.reset()


class TestRenderFrame:
    def test_schema_keys_and_roundtrip(self):
        env = make("lsd_force_lidar-v0", 0)
        env.reset()
        env.step(np.array([0.1, -0.1, 0.0, 0.3, 1.0, 0.2]))
        frame = env.render()
        doc = json.loads(frame.to_json())
        assert set(doc.keys()) == {"tick", "pose", "suspension", "lidar",
                                   "terrain_slice", "reward", "done",
                                   "termination"}
        assert set(doc["pose"].keys()) == {"x", "y", "heading", "pitch", "roll"}
        assert set(doc["lidar"].keys()) == {"height", "distance"}
        assert len(doc["suspension"]) == 4
        assert RenderFrame.from_json(frame.to_json()) == frame

    def test_pose_matches_state(self):
        env = make("lsd_force_lidar-v0", 0)
        env.reset()
        env.step(np.array([0, 0, 0, 0, 1.2, 0.4]))
        frame = env.render()
        assert frame.pose["x"] == env.state.x
        assert frame.pose["heading"] == env.state.heading
        assert frame.tick == env.state.tick

    def test_terrain_slice_length(self):
        env = make("lsd_force_lidar-v0", 0)
        env.reset()
        assert len(env.render().terrain_slice) == 64
