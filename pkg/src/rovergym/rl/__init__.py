"""From-scratch model-free deep RL: MLPs with explicit backprop, an
adaptive-moment optimizer, on- and off-policy learners, and the
environment-agnostic training loop."""

from .losses import LengthMismatch, gae, ppo_surrogate, td3_target
from .nets import Adam, Mlp, NonFiniteGradient, polyak_update
from .ppo import PpoAgent
from .td3 import ReplayBuffer, Td3Agent
from .train import (DivergedTraining, EmptyEvaluation, EvalReport,
                    LearningCurve, RunningNorm, ShapeMismatch, TrainConfig,
                    TrainResult, config_hash, evaluate, load_checkpoint,
                    policy_from_checkpoint, save_checkpoint, train)

__all__ = [
    "gae", "ppo_surrogate", "td3_target", "LengthMismatch",
    "Mlp", "Adam", "NonFiniteGradient", "polyak_update",
    "PpoAgent", "Td3Agent", "ReplayBuffer",
    "TrainConfig", "TrainResult", "LearningCurve", "RunningNorm",
    "EvalReport", "train", "evaluate", "config_hash",
    "save_checkpoint", "load_checkpoint", "policy_from_checkpoint",
    "DivergedTraining", "ShapeMismatch", "EmptyEvaluation",
]
