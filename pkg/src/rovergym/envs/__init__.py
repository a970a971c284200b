"""Concrete environments and their registry entries."""

from ..core import register
from .base import EpisodeConfig, RewardWeights, RoverSimEnv, reward
from .leo import LeoNavEnv
from .logs import (EmptyLog, StabilityReport, read_episode_log,
                   stability_series, write_episode_log)
from .lsd import LsdClimbEnv
from .smoke import DriveToTargetEnv, scripted_policy

register("lsd_force_lidar-v0", LsdClimbEnv, obs_dim=3, act_dim=6)
register("leo_nav-v0", LeoNavEnv, obs_dim=773, act_dim=2)
register("drive_to_target-v0", DriveToTargetEnv, obs_dim=1, act_dim=1)

__all__ = [
    "EpisodeConfig", "RewardWeights", "RoverSimEnv", "reward",
    "LsdClimbEnv", "LeoNavEnv", "DriveToTargetEnv", "scripted_policy",
    "EmptyLog", "StabilityReport", "stability_series",
    "write_episode_log", "read_episode_log",
]
