"""Obstacle-climbing environment: a randomly generated full-width box is
placed ahead of the rover, which must drive over it using its four
suspension motors plus forward/angular velocity.

Observation (3): [obstacle height seen by the lidar, chassis pitch,
obstacle distance from the front wheel center].
Action (6): [motor1..motor4 in [-1, 1], linear velocity, angular velocity].
"""

from __future__ import annotations

import numpy as np

from ..core import BoxSpace
from ..dynamics import DynamicsParams, RoverState, Twist
from ..terrain import Obstacle, burn_obstacle, flat_arena
from .base import EpisodeConfig, RewardWeights, RoverSimEnv

ARENA_LENGTH = 20.0
ARENA_WIDTH = 4.0
START_X = 1.0


class LsdClimbEnv(RoverSimEnv):

    def __init__(self, seed: int, config: EpisodeConfig = EpisodeConfig(),
                 weights: RewardWeights = RewardWeights(),
                 params: DynamicsParams = DynamicsParams()):
        super().__init__(seed, config, weights, params)
        half_pi = np.pi / 2.0
        self.observation_space = BoxSpace(
            low=np.array([0.0, -half_pi, 0.0]),
            high=np.array([1.0, half_pi, params.lidar_max_range]))
        self.action_space = BoxSpace(
            low=np.array([-1.0, -1.0, -1.0, -1.0, -params.v_max, -params.w_max]),
            high=np.array([1.0, 1.0, 1.0, 1.0, params.v_max, params.w_max]))
        self.obstacle: Obstacle | None = None

    def _setup_episode(self):
        rng = self.rng.stream("obstacle")
        cfg = self.config
        height = rng.uniform(*cfg.obstacle_height_range)
        depth = rng.uniform(*cfg.obstacle_depth_range)
        placement = rng.uniform(*cfg.obstacle_placement_range)
        self.obstacle = Obstacle(x_start=START_X + placement, height=height,
                                 depth=depth, width=ARENA_WIDTH)
        field = flat_arena(ARENA_LENGTH, ARENA_WIDTH)
        burn_obstacle(field, self.obstacle)
        return field, RoverState(x=START_X, y=0.0, heading=0.0)

    def _split_action(self, action: np.ndarray):
        return Twist(float(action[4]), float(action[5])), tuple(action[0:4])

    def _observe(self) -> np.ndarray:
        lidar = self._lidar()
        imu = self._imu()
        return np.array([lidar.obstacle_height, imu.pitch,
                         lidar.obstacle_distance])

    def _termination(self, prev, cur):
        if cur.x > self.obstacle.x_end:
            return "success"
        if self._flipped(cur):
            return "flipped"
        return None
