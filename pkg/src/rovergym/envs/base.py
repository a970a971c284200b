"""Shared machinery for the concrete rover environments: episode
configuration, the shaped reward, arena walls, sensor-backed observations,
render frames, and per-episode logging."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from ..core import Env, StepResult, TERMINATION_CAUSES
from ..dynamics import (DT, DynamicsParams, RoverState, Twist, imu_read,
                        integrate, lidar_scan, settle_attitude)
from ..terrain import Heightfield

WALL_MARGIN = 0.6  # m kept between the rover center and the terrain edge


@dataclass(frozen=True)
class EpisodeConfig:
    max_steps: int = 1500
    obstacle_height_range: tuple[float, float] = (0.05, 0.25)
    obstacle_depth_range: tuple[float, float] = (0.10, 0.50)
    obstacle_placement_range: tuple[float, float] = (2.0, 4.0)  # m ahead of start
    flip_threshold: float = 0.6  # rad
    seed: Optional[int] = None   # None: use the seed passed to make()

    def __post_init__(self):
        for name in ("obstacle_height_range", "obstacle_depth_range",
                     "obstacle_placement_range"):
            lo, hi = getattr(self, name)
            if not (0 <= lo <= hi):
                raise ValueError(f"{name} must be a nonempty nonnegative range")
        if self.max_steps <= 0 or self.flip_threshold <= 0:
            raise ValueError("max_steps and flip_threshold must be positive")


@dataclass(frozen=True)
class RewardWeights:
    w_progress: float = 10.0     # per m of forward progress
    w_stability: float = 1.0     # per rad/s of attitude rate
    w_effort: float = 0.01       # per unit of motor command
    success_bonus: float = 100.0

    def __post_init__(self):
        if min(self.w_progress, self.w_stability, self.w_effort,
               self.success_bonus) < 0:
            raise ValueError("reward weights must be nonnegative")


def reward(prev: RoverState, cur: RoverState, motor_commands,
           weights: RewardWeights = RewardWeights(),
           success: bool = False, progress: Optional[float] = None) -> float:
    """Per-tick shaped reward: progress minus stability and effort penalties,
    plus the terminal bonus on the success tick.

    progress defaults to the x advance cur.x - prev.x; navigation tasks pass
    their own goal-directed progress instead."""
    if progress is None:
        progress = cur.x - prev.x
    effort = sum(abs(float(c)) for c in motor_commands)
    r = weights.w_progress * progress \
        - weights.w_stability * (abs(cur.pitch_rate) + abs(cur.roll_rate)) \
        - weights.w_effort * effort
    if success:
        r += weights.success_bonus
    return r


class RoverSimEnv(Env):
    """Environment base owning one rover on one heightfield.

    Subclasses build the terrain and initial state in _setup_episode(),
    produce observations in _observe(), and judge the episode in
    _termination(). Stepping integrates the physics, applies invisible
    arena walls (episodes end only by success/flipped/timeout, never by
    driving off the grid), and keeps a per-episode log of
    (tick, state, action, reward, done) records.
    """

    def __init__(self, seed: int, config: EpisodeConfig = EpisodeConfig(),
                 weights: RewardWeights = RewardWeights(),
                 params: DynamicsParams = DynamicsParams()):
        super().__init__(seed if config.seed is None else config.seed)
        self.config = config
        self.weights = weights
        self.params = params
        self.terrain: Optional[Heightfield] = None
        self.state = RoverState()
        self.episode_log: list[dict] = []
        self._steps = 0

    # -- subclass hooks -----------------------------------------------------
    def _setup_episode(self) -> tuple[Heightfield, RoverState]:
        raise NotImplementedError

    def _observe(self) -> np.ndarray:
        raise NotImplementedError

    def _termination(self, prev: RoverState, cur: RoverState) -> Optional[str]:
        """Return a termination cause or None; timeout is handled here."""
        raise NotImplementedError

    def _split_action(self, action: np.ndarray) -> tuple[Twist, tuple]:
        raise NotImplementedError

    def _progress(self, prev: RoverState, cur: RoverState) -> Optional[float]:
        return None  # default: x advance

    def _success_bonus_applies(self) -> bool:
        return True

    # -- lifecycle ------------------------------------------------------------
    def _do_reset(self) -> np.ndarray:
        self.terrain, state = self._setup_episode()
        self.state = settle_attitude(state, self.terrain, self.params)
        self._steps = 0
        self.episode_log = []
        return self._observe()

    def _do_step(self, action: np.ndarray) -> StepResult:
        twist, motors = self._split_action(action)
        prev = self.state
        cur = integrate(prev, twist, motors, self.terrain, DT, self.params)
        cur = self._apply_walls(cur)
        self._steps += 1
        self.state = cur

        cause = self._termination(prev, cur)
        if cause is None and self._steps >= self.config.max_steps:
            cause = "timeout"
        assert cause is None or cause in TERMINATION_CAUSES
        r = reward(prev, cur, motors, self.weights,
                   success=(cause == "success"
                            and self._success_bonus_applies()),
                   progress=self._progress(prev, cur))
        obs = self._observe()
        info = {"termination": cause} if cause else {}
        result = StepResult(obs, r, cause is not None, info)
        self.episode_log.append({
            "tick": cur.tick,
            "state": state_record(cur),
            "action": [float(a) for a in action],
            "reward": r,
            "done": result.done,
        })
        return result

    def _apply_walls(self, state: RoverState) -> RoverState:
        t = self.terrain
        x = min(max(state.x, t.x0 + WALL_MARGIN), t.x_max - WALL_MARGIN)
        y = min(max(state.y, t.y0 + WALL_MARGIN), t.y_max - WALL_MARGIN)
        if x != state.x or y != state.y:
            return replace(state, x=x, y=y)
        return state

    def _flipped(self, cur: RoverState) -> bool:
        th = self.config.flip_threshold
        return abs(cur.pitch) > th or abs(cur.roll) > th

    # -- render ----------------------------------------------------------------
    def _frame_fields(self) -> dict:
        s = self.state
        lidar = lidar_scan(s, self.terrain, self.params)
        return {
            "pose": {"x": s.x, "y": s.y, "heading": s.heading,
                     "pitch": s.pitch, "roll": s.roll},
            "suspension": [float(a) for a in s.suspension.joint_angles],
            "lidar": {"height": lidar.obstacle_height,
                      "distance": lidar.obstacle_distance},
            "terrain_slice": self._terrain_slice(),
        }

    def _terrain_slice(self, back: float = 1.0, ahead: float = 4.0,
                       samples: int = 64) -> list[float]:
        s = self.state
        ch, sh = math.cos(s.heading), math.sin(s.heading)
        out = []
        for i in range(samples):
            d = -back + (back + ahead) * i / (samples - 1)
            x = s.x + d * ch
            y = s.y + d * sh
            out.append(self.terrain.height_at(x, y)
                       if self.terrain.contains(x, y) else 0.0)
        return out

    # -- sensors shared by subclasses ----------------------------------------
    def _imu(self):
        rng = self.rng.stream("imu") if self.params.sigma_imu > 0 else None
        return imu_read(self.state, rng, self.params.sigma_imu)

    def _lidar(self):
        return lidar_scan(self.state, self.terrain, self.params)


def state_record(s: RoverState) -> dict:
    return {
        "x": s.x, "y": s.y, "heading": s.heading,
        "pitch": s.pitch, "roll": s.roll,
        "pitch_rate": s.pitch_rate, "roll_rate": s.roll_rate,
        "yaw_rate": s.yaw_rate,
        "suspension": [float(a) for a in s.suspension.joint_angles],
        "motors": [float(c) for c in s.suspension.motor_commands],
    }
