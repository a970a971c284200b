"""Desk-scale smoke-test environment with a known optimal policy: drive the
rover along a flat arena to a target a couple of meters ahead. Gives the
training harness an oracle-checkable reward ceiling (scripted_policy).

Observation (1): [remaining x distance to the target].
Action (1): [linear velocity].
"""

from __future__ import annotations

import numpy as np

from ..core import BoxSpace
from ..dynamics import DynamicsParams, RoverState, Twist
from ..terrain import flat_arena
from .base import EpisodeConfig, RewardWeights, RoverSimEnv

START_X = 1.0
TARGET_DISTANCE_RANGE = (1.5, 2.5)
TARGET_RADIUS = 0.1
MAX_STEPS = 200


def smoke_config(seed=None) -> EpisodeConfig:
    return EpisodeConfig(max_steps=MAX_STEPS, seed=seed)


class DriveToTargetEnv(RoverSimEnv):

    def __init__(self, seed: int, config: EpisodeConfig = None,
                 weights: RewardWeights = RewardWeights(),
                 params: DynamicsParams = DynamicsParams()):
        super().__init__(seed, config or smoke_config(), weights, params)
        self.observation_space = BoxSpace(low=np.array([-25.0]),
                                          high=np.array([25.0]))
        self.action_space = BoxSpace(low=np.array([-params.v_max]),
                                     high=np.array([params.v_max]))
        self.target_x = 0.0

    def _setup_episode(self):
        self.target_x = START_X + self.rng.stream("goal").uniform(
            *TARGET_DISTANCE_RANGE)
        return flat_arena(8.0, 2.0), RoverState(x=START_X, y=0.0, heading=0.0)

    def _split_action(self, action: np.ndarray):
        return Twist(float(action[0]), 0.0), (0.0, 0.0, 0.0, 0.0)

    def _observe(self) -> np.ndarray:
        return np.array([self.target_x - self.state.x])

    def _termination(self, prev, cur):
        if abs(self.target_x - cur.x) <= TARGET_RADIUS:
            return "success"
        if self._flipped(cur):
            return "flipped"
        return None


def scripted_policy(obs: np.ndarray, v_max: float = 1.5) -> np.ndarray:
    """Bang-bang optimal controller: full speed toward the target."""
    return np.array([v_max if obs[0] >= 0 else -v_max])
