"""Environment contract: bounded box spaces, the step/reset/render lifecycle,
named-environment registry, and the telemetry frame schema.

Environments are deterministic: a fixed (env_id, seed) pair replayed with the
same action sequence produces a bit-identical trajectory. All stochasticity
flows from named RNG streams derived from the root seed, so adding a new
consumer never perturbs existing ones.
"""

from __future__ import annotations

import json
import re
import zlib
from dataclasses import dataclass, field
from typing import Any, Callable, Optional, Sequence

import numpy as np

ENV_ID_PATTERN = re.compile(r"^[a-z_]+-v[0-9]+$")


# ---------------------------------------------------------------------------
# Errors
# ---------------------------------------------------------------------------

class RoverGymError(Exception):
    """Base class for errors raised by this package."""


class UnknownEnvironment(RoverGymError):
    """Requested environment id is not registered."""


class NotReset(RoverGymError):
    """Operation requires the environment to have been reset first."""


class SteppedAfterDone(RoverGymError):
    """step() called past a done step without an intervening reset."""


class NonFiniteAction(RoverGymError):
    """Action contained NaN or infinity."""


class OutOfTerrain(RoverGymError):
    """Query or rover footprint left the heightfield bounds."""


# ---------------------------------------------------------------------------
# Seeded named RNG streams
# ---------------------------------------------------------------------------

class RngStreams:
    """Splittable per-purpose random streams derived from one root seed.

    Each named stream is an independent PCG64 generator whose seed is the
    root seed combined with a stable hash of the name (never Python's
    randomized hash()). Drawing from one stream does not affect any other,
    so new consumers can be added without perturbing existing sequences.
    """

    def __init__(self, seed: int):
        self.seed = int(seed)
        self._streams: dict[str, np.random.Generator] = {}

    def stream(self, name: str) -> np.random.Generator:
        gen = self._streams.get(name)
        if gen is None:
            key = zlib.crc32(name.encode("utf-8")) & 0xFFFFFFFF
            seq = np.random.SeedSequence(entropy=self.seed, spawn_key=(key,))
            gen = np.random.Generator(np.random.PCG64(seq))
            self._streams[name] = gen
        return gen


# ---------------------------------------------------------------------------
# Spaces and step results
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoxSpace:
    """Bounded real vector space with component-wise [low, high] limits."""

    low: np.ndarray
    high: np.ndarray

    def __post_init__(self):
        low = np.asarray(self.low, dtype=np.float64)
        high = np.asarray(self.high, dtype=np.float64)
        object.__setattr__(self, "low", low)
        object.__setattr__(self, "high", high)
        if low.ndim != 1 or high.ndim != 1 or low.shape != high.shape:
            raise ValueError("low/high must be 1-D vectors of equal length")
        if not (np.all(np.isfinite(low)) and np.all(np.isfinite(high))):
            raise ValueError("space bounds must be finite")
        if not np.all(low < high):
            raise ValueError("low[i] < high[i] must hold for every component")

    @property
    def dim(self) -> int:
        return int(self.low.shape[0])

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        """Uniform draw, component-wise within [low, high]."""
        return rng.uniform(self.low, self.high)

    def clip(self, values: Sequence[float]) -> np.ndarray:
        return np.clip(np.asarray(values, dtype=np.float64), self.low, self.high)

    def contains(self, values: Sequence[float], atol: float = 0.0) -> bool:
        v = np.asarray(values, dtype=np.float64)
        if v.shape != self.low.shape or not np.all(np.isfinite(v)):
            return False
        return bool(np.all(v >= self.low - atol) and np.all(v <= self.high + atol))


# Observations and actions are plain float vectors; the owning BoxSpace
# defines their length and bounds.
Observation = np.ndarray
Action = np.ndarray

TERMINATION_CAUSES = ("success", "flipped", "timeout")


@dataclass
class StepResult:
    observation: Observation
    reward: float
    done: bool
    info: dict[str, str] = field(default_factory=dict)


@dataclass
class RenderFrame:
    """Serializable snapshot of one simulation tick.

    This is the same schema the teleoperation service broadcasts, so anything
    that can draw a broadcast frame can draw a render() result.
    """

    tick: int
    pose: dict[str, float]          # keys: x, y, heading, pitch, roll
    suspension: list[float]         # 4 joint angles, rad
    lidar: dict[str, float]         # keys: height, distance
    terrain_slice: list[float]      # heights under/ahead of the rover, m
    reward: float
    done: bool
    termination: Optional[str]

    def to_json(self) -> str:
        return json.dumps({
            "tick": self.tick,
            "pose": self.pose,
            "suspension": self.suspension,
            "lidar": self.lidar,
            "terrain_slice": self.terrain_slice,
            "reward": self.reward,
            "done": self.done,
            "termination": self.termination,
        })

    @staticmethod
    def from_json(text: str) -> "RenderFrame":
        d = json.loads(text)
        return RenderFrame(
            tick=d["tick"],
            pose=d["pose"],
            suspension=d["suspension"],
            lidar=d["lidar"],
            terrain_slice=d["terrain_slice"],
            reward=d["reward"],
            done=d["done"],
            termination=d["termination"],
        )


# ---------------------------------------------------------------------------
# Environment base class: lifecycle state machine
# ---------------------------------------------------------------------------

_UNRESET, _RUNNING, _FINISHED = "unreset", "running", "finished"


class Env:
    """Base environment enforcing the episode lifecycle.

    Lifecycle: unreset -> (reset) -> running -> (done) -> finished
    -> (reset) -> running. step() outside "running" and observation access
    before the first reset raise the documented errors.

    Subclasses implement _do_reset() and _do_step(clipped_action), and
    provide observation_space / action_space. One instance must not be used
    from multiple threads concurrently; independent instances are fine.
    """

    observation_space: BoxSpace
    action_space: BoxSpace

    def __init__(self, seed: int):
        self.rng = RngStreams(seed)
        self._phase = _UNRESET
        self._tick = 0
        self._last_obs: Optional[np.ndarray] = None
        self._last_reward = 0.0
        self._last_termination: Optional[str] = None

    # -- subclass hooks ----------------------------------------------------
    def _do_reset(self) -> np.ndarray:
        raise NotImplementedError

    def _do_step(self, action: np.ndarray) -> StepResult:
        raise NotImplementedError

    def _frame_fields(self) -> dict[str, Any]:
        """Pose/suspension/lidar/terrain_slice fields for render()."""
        raise NotImplementedError

    # -- public API ----------------------------------------------------------
    def reset(self) -> Observation:
        """Start a new episode; valid in any lifecycle phase."""
        obs = self._do_reset()
        self._phase = _RUNNING
        self._tick = 0
        self._last_obs = np.asarray(obs, dtype=np.float64)
        self._last_reward = 0.0
        self._last_termination = None
        return self._last_obs.copy()

    def step(self, action: Sequence[float]) -> StepResult:
        if self._phase == _UNRESET:
            raise NotReset("step() called before the first reset()")
        if self._phase == _FINISHED:
            raise SteppedAfterDone("step() called after done; reset() first")
        a = np.asarray(action, dtype=np.float64).reshape(-1)
        if a.shape[0] != self.action_space.dim:
            raise NonFiniteAction(
                f"action has dim {a.shape[0]}, expected {self.action_space.dim}")
        if not np.all(np.isfinite(a)):
            raise NonFiniteAction(f"action contains NaN/inf: {a}")
        clipped = self.action_space.clip(a)
        result = self._do_step(clipped)
        self._tick += 1
        self._last_obs = np.asarray(result.observation, dtype=np.float64)
        self._last_reward = float(result.reward)
        if result.done:
            self._phase = _FINISHED
            self._last_termination = result.info.get("termination")
        return result

    def get_observation(self) -> Observation:
        """Pure read of the current observation; no state change."""
        if self._last_obs is None:
            raise NotReset("get_observation() called before the first reset()")
        return self._last_obs.copy()

    def render(self) -> RenderFrame:
        if self._phase == _UNRESET:
            raise NotReset("render() called before the first reset()")
        fields = self._frame_fields()
        return RenderFrame(
            tick=self._tick,
            reward=self._last_reward,
            done=self._phase == _FINISHED,
            termination=self._last_termination,
            **fields,
        )

    @property
    def tick(self) -> int:
        return self._tick


# ---------------------------------------------------------------------------
# Registry
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EnvSpec:
    env_id: str
    factory: Callable[..., Env]     # called as factory(seed=..., config=...)
    obs_dim: int
    act_dim: int


_REGISTRY: dict[str, EnvSpec] = {}


def register(env_id: str, factory: Callable[..., Env], obs_dim: int, act_dim: int) -> None:
    if not ENV_ID_PATTERN.match(env_id):
        raise ValueError(f"environment id {env_id!r} must match name-vN pattern")
    if env_id in _REGISTRY:
        raise ValueError(f"environment id {env_id!r} already registered")
    _REGISTRY[env_id] = EnvSpec(env_id, factory, obs_dim, act_dim)


def registry() -> dict[str, EnvSpec]:
    """Immutable view of the registered environments."""
    return dict(_REGISTRY)


def make(env_id: str, seed: int, config: Any = None) -> Env:
    """Construct a registered environment in the unreset state."""
    spec = _REGISTRY.get(env_id)
    if spec is None:
        raise UnknownEnvironment(env_id)
    if config is None:
        return spec.factory(seed=seed)
    return spec.factory(seed=seed, config=config)


def sample(space: BoxSpace, rng: np.random.Generator) -> Action:
    """Uniform action draw from a box space."""
    return space.sample(rng)
