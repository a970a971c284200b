"""Navigation environment on undulating terrain: drive to a goal position
using a mast-mounted depth camera and the IMU.

Observation (773): 32x24 depth raster in meters, row-major, followed by
[pitch, roll, pitch_rate, roll_rate, yaw_rate].
Action (2): [linear velocity, angular velocity].
"""

from __future__ import annotations

import math

import numpy as np

from ..core import BoxSpace
from ..dynamics import DynamicsParams, RoverState, Twist, depth_camera
from ..terrain import undulating_arena
from .base import EpisodeConfig, RewardWeights, RoverSimEnv

ARENA_LENGTH = 20.0
ARENA_WIDTH = 4.0
START_X = 1.0
RASTER_COLS = 32
RASTER_ROWS = 24
MAX_DEPTH = 5.0
RATE_BOUND = 50.0  # rad/s observation clamp for the IMU rate channels
GOAL_RADIUS = 0.3
GOAL_DISTANCE_RANGE = (3.0, 6.0)


class LeoNavEnv(RoverSimEnv):

    def __init__(self, seed: int, config: EpisodeConfig = EpisodeConfig(),
                 weights: RewardWeights = RewardWeights(),
                 params: DynamicsParams = DynamicsParams()):
        super().__init__(seed, config, weights, params)
        n = RASTER_COLS * RASTER_ROWS
        half_pi = np.pi / 2.0
        self.observation_space = BoxSpace(
            low=np.concatenate([np.zeros(n),
                                [-half_pi, -half_pi,
                                 -RATE_BOUND, -RATE_BOUND, -RATE_BOUND]]),
            high=np.concatenate([np.full(n, MAX_DEPTH),
                                 [half_pi, half_pi,
                                  RATE_BOUND, RATE_BOUND, RATE_BOUND]]))
        self.action_space = BoxSpace(
            low=np.array([-params.v_max, -params.w_max]),
            high=np.array([params.v_max, params.w_max]))
        self.goal = (0.0, 0.0)

    def _setup_episode(self):
        field = undulating_arena(self.rng.stream("terrain"),
                                 ARENA_LENGTH, ARENA_WIDTH)
        dist = self.rng.stream("goal").uniform(*GOAL_DISTANCE_RANGE)
        self.goal = (START_X + dist, 0.0)
        return field, RoverState(x=START_X, y=0.0, heading=0.0)

    def _split_action(self, action: np.ndarray):
        return Twist(float(action[0]), float(action[1])), (0.0, 0.0, 0.0, 0.0)

    # reward here is goal progress minus the stability penalty, with no
    # terminal bonus (reaching the goal already ends the episode)
    def _success_bonus_applies(self) -> bool:
        return False

    def _goal_distance(self, s: RoverState) -> float:
        return math.hypot(self.goal[0] - s.x, self.goal[1] - s.y)

    def _progress(self, prev, cur):
        return self._goal_distance(prev) - self._goal_distance(cur)

    def _observe(self) -> np.ndarray:
        raster = depth_camera(self.state, self.terrain, self.params,
                              n_cols=RASTER_COLS, n_rows=RASTER_ROWS,
                              max_depth=MAX_DEPTH)
        imu = self._imu()
        # rate channels clip at the space bound; backward-difference rates
        # can spike on sharp attitude changes
        channels = np.clip([imu.pitch, imu.roll, imu.pitch_rate,
                            imu.roll_rate, imu.yaw_rate],
                           -RATE_BOUND, RATE_BOUND)
        return np.concatenate([raster, channels])

    def _termination(self, prev, cur):
        if self._goal_distance(cur) <= GOAL_RADIUS:
            return "success"
        if self._flipped(cur):
            return "flipped"
        return None
