"""Rover simulation and reinforcement-learning toolkit: deterministic
heightfield physics with active suspension, gym-style environments,
from-scratch PPO/TD3 training, URDF ingestion, and live teleoperation."""

from .core import (BoxSpace, Env, EnvSpec, NonFiniteAction, NotReset,
                   OutOfTerrain, RenderFrame, RngStreams, RoverGymError,
                   StepResult, SteppedAfterDone, UnknownEnvironment, make,
                   register, registry, sample)
from . import envs  # noqa: F401  (populates the registry on import)

__version__ = "0.1.0"

__all__ = [
    "BoxSpace", "Env", "EnvSpec", "RenderFrame", "RngStreams", "StepResult",
    "RoverGymError", "UnknownEnvironment", "NotReset", "SteppedAfterDone",
    "NonFiniteAction", "OutOfTerrain",
    "make", "register", "registry", "sample",
    "__version__",
]
