"""Environment-agnostic training and evaluation.

The training loop touches environments only through make/reset/step and the
space objects, so any registered environment trains with the same code path.
Learning-curve rows (timestep, 100-episode windowed mean reward) are emitted
every CURVE_INTERVAL timesteps and saved as CSV with a Step,Value header.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Optional

import numpy as np

from .. import __version__
from ..core import RngStreams, RoverGymError, make, registry
from ..envs.logs import stability_series
from .losses import gae
from .nets import Mlp
from .ppo import PpoAgent
from .td3 import ReplayBuffer, Td3Agent

CURVE_INTERVAL = 2048
EPISODE_WINDOW = 100
CHECKPOINT_FORMAT = "rovergym-checkpoint"
CHECKPOINT_VERSION = 1


class DivergedTraining(RoverGymError):
    """Loss became non-finite; the run is aborted with diagnostics."""


class ShapeMismatch(RoverGymError):
    """Checkpoint architecture does not match the environment's spaces."""


class EmptyEvaluation(RoverGymError):
    """Evaluation over zero episodes was requested."""


@dataclass
class TrainConfig:
    algo: str = "ppo"                 # "ppo" | "td3"
    total_timesteps: int = 50_000
    gamma: float = 0.99
    seed: int = 0
    # on-policy settings
    lam: float = 0.95
    clip_eps: float = 0.2
    epochs: int = 10
    minibatch: int = 64
    horizon: int = 2048
    ppo_lr: float = 3e-4
    ppo_hidden: int = 64
    # off-policy settings
    tau: float = 0.005
    policy_delay: int = 2
    target_noise: float = 0.2
    target_noise_clip: float = 0.5
    explore_noise: float = 0.1
    batch_size: int = 256
    td3_lr: float = 1e-3
    td3_lr_decay: float = 0.9         # fraction of the rate annealed away by the end
    td3_hidden: int = 256
    buffer_capacity: int = 100_000
    start_steps: int = 5_000          # buffer prefill before updates begin
    actor_start_steps: int = 15_000   # critic-only pretraining until here
    update_every: int = 1             # env steps per gradient update

    def __post_init__(self):
        if self.algo not in ("ppo", "td3"):
            raise ValueError(f"unknown algorithm {self.algo!r}")
        if not 0.0 < self.gamma <= 1.0:
            raise ValueError("gamma must be in (0, 1]")
        if self.clip_eps <= 0 or self.ppo_lr <= 0 or self.td3_lr <= 0:
            raise ValueError("clip_eps and learning rates must be positive")
        if self.total_timesteps < 0:
            raise ValueError("total_timesteps must be nonnegative")


@dataclass
class LearningCurve:
    rows: list[tuple[int, float]] = field(default_factory=list)

    def append(self, step: int, value: float) -> None:
        if self.rows and step <= self.rows[-1][0]:
            raise ValueError("Step must be strictly increasing")
        self.rows.append((step, value))

    def to_csv(self) -> str:
        lines = ["Step,Value"]
        lines += [f"{step},{value}" for step, value in self.rows]
        return "\n".join(lines) + "\n"

    def save(self, path) -> None:
        Path(path).write_text(self.to_csv(), encoding="utf-8")

    @staticmethod
    def load(path) -> "LearningCurve":
        lines = Path(path).read_text(encoding="utf-8").strip().splitlines()
        if not lines or lines[0] != "Step,Value":
            raise ValueError("expected Step,Value header")
        curve = LearningCurve()
        for line in lines[1:]:
            step, value = line.split(",")
            curve.append(int(step), float(value))
        return curve


@dataclass
class RunningNorm:
    """Streaming mean/std observation normalizer (frozen at evaluation)."""

    mean: np.ndarray
    var: np.ndarray
    count: float = 1e-4

    @staticmethod
    def for_dim(dim: int) -> "RunningNorm":
        return RunningNorm(np.zeros(dim), np.ones(dim))

    def update(self, obs: np.ndarray) -> None:
        self.count += 1.0
        delta = obs - self.mean
        self.mean = self.mean + delta / self.count
        self.var = self.var + (delta * (obs - self.mean) - self.var) / self.count

    def normalize(self, obs: np.ndarray) -> np.ndarray:
        return (obs - self.mean) / np.sqrt(self.var + 1e-8)


@dataclass
class TrainResult:
    curve: LearningCurve
    checkpoint: dict
    env_id: str
    config: TrainConfig


@dataclass
class EvalReport:
    n_episodes: int
    success_rate: float
    mean_reward: float
    stability_rms: float           # combined RMS over all evaluated episodes
    success_stability_rms: float   # combined RMS over successful episodes only


# ---------------------------------------------------------------------------
# Training
# ---------------------------------------------------------------------------

def train(env_id: str, config: TrainConfig, out_dir=None,
          env_config: Any = None) -> TrainResult:
    """Run the configured algorithm; optionally write curve.csv, checkpoint,
    and a run manifest into out_dir."""
    if env_id not in registry():
        raise RoverGymError(f"environment {env_id!r} is not registered")
    env = make(env_id, seed=config.seed, config=env_config)
    obs_dim = env.observation_space.dim
    act_dim = env.action_space.dim
    streams = RngStreams(config.seed)

    if config.algo == "ppo":
        checkpoint, curve = _train_ppo(env, config, streams)
    else:
        checkpoint, curve = _train_td3(env, config, streams)

    checkpoint.update({
        "format": CHECKPOINT_FORMAT,
        "version": CHECKPOINT_VERSION,
        "algo": config.algo,
        "env_id": env_id,
        "obs_dim": obs_dim,
        "act_dim": act_dim,
    })
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        curve.save(out / "curve.csv")
        save_checkpoint(checkpoint, out / "checkpoint.json")
        (out / "manifest.json").write_text(json.dumps({
            "seed": config.seed,
            "config_hash": config_hash(config),
            "version": __version__,
            "env_id": env_id,
            "algo": config.algo,
            "total_timesteps": config.total_timesteps,
        }, indent=2) + "\n", encoding="utf-8")
    return TrainResult(curve, checkpoint, env_id, config)


class _EpisodeTracker:
    def __init__(self):
        self.returns: list[float] = []
        self.current = 0.0

    def add(self, reward: float, done: bool) -> None:
        self.current += reward
        if done:
            self.returns.append(self.current)
            self.current = 0.0

    def window_mean(self) -> Optional[float]:
        if not self.returns:
            return None
        window = self.returns[-EPISODE_WINDOW:]
        return float(np.mean(window))


def _maybe_curve_row(curve: LearningCurve, tracker: _EpisodeTracker,
                     t: int) -> None:
    if t % CURVE_INTERVAL == 0:
        value = tracker.window_mean()
        if value is not None:
            curve.append(t, value)


def _train_ppo(env, config: TrainConfig, streams: RngStreams):
    obs_dim = env.observation_space.dim
    act_dim = env.action_space.dim
    agent = PpoAgent(obs_dim, act_dim, streams.stream("net_init"),
                     hidden=config.ppo_hidden, lr=config.ppo_lr,
                     clip_eps=config.clip_eps, epochs=config.epochs,
                     minibatch=config.minibatch)
    norm = RunningNorm.for_dim(obs_dim)
    sample_rng = streams.stream("rollout")
    shuffle_rng = streams.stream("minibatch")

    curve = LearningCurve()
    tracker = _EpisodeTracker()
    raw_obs = env.reset()
    t = 0
    while t < config.total_timesteps:
        horizon = min(config.horizon, config.total_timesteps - t)
        batch_obs = np.zeros((horizon, obs_dim))
        batch_act = np.zeros((horizon, act_dim))
        batch_logp = np.zeros(horizon)
        batch_val = np.zeros(horizon)
        batch_rew = np.zeros(horizon)
        batch_done = np.zeros(horizon)
        for i in range(horizon):
            norm.update(raw_obs)
            obs = norm.normalize(raw_obs)
            action, logp, value = agent.act(obs, sample_rng)
            result = env.step(action)
            batch_obs[i] = obs
            batch_act[i] = action
            batch_logp[i] = logp
            batch_val[i] = value
            batch_rew[i] = result.reward
            batch_done[i] = float(result.done)
            tracker.add(result.reward, result.done)
            raw_obs = env.reset() if result.done else result.observation
            t += 1
            _maybe_curve_row(curve, tracker, t)
        bootstrap = 0.0 if batch_done[-1] else float(
            agent.value(norm.normalize(raw_obs))[0, 0])
        adv, ret = gae(batch_rew, np.append(batch_val, bootstrap), batch_done,
                       config.gamma, config.lam)
        adv = (adv - adv.mean()) / (adv.std() + 1e-8)
        stats = agent.update(batch_obs, batch_act, batch_logp, adv, ret,
                             shuffle_rng)
        if not np.isfinite(stats["policy_loss"]) or not np.isfinite(stats["value_loss"]):
            raise DivergedTraining(f"non-finite loss at timestep {t}: {stats}")

    checkpoint = {
        "arrays": _net_arrays({"policy": agent.policy, "value": agent.value}),
        "log_std": agent.log_std.tolist(),
        "norm": {"mean": norm.mean.tolist(), "var": norm.var.tolist(),
                 "count": norm.count},
        "hidden": config.ppo_hidden,
    }
    return checkpoint, curve


def _train_td3(env, config: TrainConfig, streams: RngStreams):
    obs_dim = env.observation_space.dim
    act_dim = env.action_space.dim
    agent = Td3Agent(obs_dim, act_dim, env.action_space,
                     streams.stream("net_init"), hidden=config.td3_hidden,
                     lr=config.td3_lr, gamma=config.gamma, tau=config.tau,
                     policy_delay=config.policy_delay,
                     target_noise=config.target_noise,
                     target_noise_clip=config.target_noise_clip,
                     explore_noise=config.explore_noise,
                     obs_space=env.observation_space)
    buffer = ReplayBuffer(obs_dim, act_dim, config.buffer_capacity)
    explore_rng = streams.stream("explore")
    replay_rng = streams.stream("replay")

    curve = LearningCurve()
    tracker = _EpisodeTracker()
    obs = env.reset()
    for t in range(1, config.total_timesteps + 1):
        # warmup transitions come from the (near-zero) actor plus exploration
        # noise, not uniform sampling: uniform motor commands thrash the
        # suspension through hidden joint states whose attitude penalties the
        # critic cannot attribute, poisoning early value estimates
        action = agent.act_explore(obs, explore_rng)
        result = env.step(action)
        # timeout cuts are not true terminal states; do not stop the bootstrap
        timeout = result.info.get("termination") == "timeout"
        buffer.add(obs, action, result.reward, result.observation,
                   result.done and not timeout)
        tracker.add(result.reward, result.done)
        obs = env.reset() if result.done else result.observation
        if (t > config.start_steps and buffer.size >= config.batch_size
                and t % config.update_every == 0):
            # linear learning-rate annealing damps late-run policy cycling
            frac = t / config.total_timesteps
            lr = config.td3_lr * (1.0 - config.td3_lr_decay * frac)
            agent.set_lr(lr)
            stats = agent.train_step(buffer, config.batch_size, replay_rng,
                                     update_actor=t > config.actor_start_steps)
            if not np.isfinite(stats["critic_loss"]):
                raise DivergedTraining(f"non-finite critic loss at timestep {t}")
        _maybe_curve_row(curve, tracker, t)

    checkpoint = {
        "arrays": _net_arrays({"actor": agent.actor, "critic1": agent.critic1,
                               "critic2": agent.critic2}),
        "hidden": config.td3_hidden,
        "action_low": env.action_space.low.tolist(),
        "action_high": env.action_space.high.tolist(),
        "obs_low": env.observation_space.low.tolist(),
        "obs_high": env.observation_space.high.tolist(),
    }
    return checkpoint, curve


# ---------------------------------------------------------------------------
# Checkpoints
# ---------------------------------------------------------------------------

def _net_arrays(nets: dict[str, Mlp]) -> dict:
    arrays = {}
    for net_name, net in nets.items():
        for i, p in enumerate(net.params):
            arrays[f"{net_name}.{i}"] = {"shape": list(p.shape),
                                         "data": p.ravel().tolist()}
        arrays[f"{net_name}.sizes"] = {"shape": [len(net.sizes)],
                                       "data": list(net.sizes)}
    return arrays


def _load_net(arrays: dict, net_name: str) -> Mlp:
    sizes = [int(v) for v in arrays[f"{net_name}.sizes"]["data"]]
    net = Mlp(sizes, np.random.default_rng(0))
    for i in range(len(net.params)):
        entry = arrays[f"{net_name}.{i}"]
        net.params[i] = np.array(entry["data"], dtype=np.float64).reshape(
            entry["shape"])
    return net


def save_checkpoint(checkpoint: dict, path) -> None:
    Path(path).write_text(json.dumps(checkpoint), encoding="utf-8")


def load_checkpoint(path) -> dict:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if doc.get("format") != CHECKPOINT_FORMAT:
        raise RoverGymError(f"{path}: not a checkpoint file")
    if doc.get("version") != CHECKPOINT_VERSION:
        raise RoverGymError(f"{path}: unsupported checkpoint version")
    return doc


def config_hash(config: TrainConfig) -> str:
    canonical = json.dumps(asdict(config), sort_keys=True)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

def policy_from_checkpoint(checkpoint: dict):
    """Deterministic action function obs -> action from a checkpoint."""
    arrays = checkpoint["arrays"]
    if checkpoint["algo"] == "ppo":
        policy = _load_net(arrays, "policy")
        norm = checkpoint["norm"]
        mean = np.array(norm["mean"])
        var = np.array(norm["var"])

        def act(obs: np.ndarray) -> np.ndarray:
            normed = (obs - mean) / np.sqrt(var + 1e-8)
            return policy(normed)[0]
    else:
        actor = _load_net(arrays, "actor")
        low = np.array(checkpoint["action_low"])
        high = np.array(checkpoint["action_high"])
        center = (high + low) / 2.0
        half = (high - low) / 2.0
        obs_low = np.array(checkpoint["obs_low"])
        obs_high = np.array(checkpoint["obs_high"])
        obs_center = (obs_high + obs_low) / 2.0
        obs_half = (obs_high - obs_low) / 2.0

        def act(obs: np.ndarray) -> np.ndarray:
            scaled = (obs - obs_center) / obs_half
            return center + half * np.tanh(actor(scaled)[0])

    return act


def evaluate(checkpoint: dict, env_id: str, n_episodes: int, seed: int = 1000,
             env_config: Any = None) -> EvalReport:
    """Deterministic-policy rollouts: success fraction, mean episode reward,
    and attitude-stability RMS (combined longitudinal/lateral)."""
    if n_episodes <= 0:
        raise EmptyEvaluation("n_episodes must be positive")
    env = make(env_id, seed=seed, config=env_config)
    if (checkpoint["obs_dim"] != env.observation_space.dim
            or checkpoint["act_dim"] != env.action_space.dim):
        raise ShapeMismatch(
            f"checkpoint is {checkpoint['obs_dim']}/{checkpoint['act_dim']}, "
            f"env needs {env.observation_space.dim}/{env.action_space.dim}")
    act = policy_from_checkpoint(checkpoint)

    successes = 0
    rewards = []
    sq_sum, sq_count = 0.0, 0
    success_sq_sum, success_sq_count = 0.0, 0
    for _ in range(n_episodes):
        obs = env.reset()
        total = 0.0
        done = False
        while not done:
            result = env.step(act(obs))
            obs = result.observation
            total += result.reward
            done = result.done
        rewards.append(total)
        succeeded = result.info.get("termination") == "success"
        successes += int(succeeded)
        log = getattr(env, "episode_log", None)
        if log:
            report = stability_series(log)
            ssq = sum(v * v for v in report.longitudinal) \
                + sum(v * v for v in report.lateral)
            sq_sum += ssq
            sq_count += len(report.longitudinal)
            if succeeded:
                success_sq_sum += ssq
                success_sq_count += len(report.longitudinal)

    return EvalReport(
        n_episodes=n_episodes,
        success_rate=successes / n_episodes,
        mean_reward=float(np.mean(rewards)),
        stability_rms=float(np.sqrt(sq_sum / sq_count)) if sq_count else 0.0,
        success_stability_rms=(float(np.sqrt(success_sq_sum / success_sq_count))
                               if success_sq_count else 0.0),
    )
