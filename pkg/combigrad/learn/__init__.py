from combigrad.learn.config import REPELLENT_C_K, TrainConfig, load_config, preset
from combigrad.learn.models import DigitCostModel, Model, SphereEmbeddingModel, VertexCostModel, build_model
from combigrad.learn.ops import OPS
from combigrad.learn.optim import AdamState, adam_step, lr_for_epoch
from combigrad.learn.tensor import Tensor, constant, parameter
from combigrad.learn.train import EpochRecord, TrainResult, evaluate, predict, train

__all__ = [
    "OPS",
    "REPELLENT_C_K",
    "AdamState",
    "DigitCostModel",
    "EpochRecord",
    "Model",
    "SphereEmbeddingModel",
    "Tensor",
    "TrainConfig",
    "TrainResult",
    "VertexCostModel",
    "adam_step",
    "build_model",
    "constant",
    "evaluate",
    "load_config",
    "lr_for_epoch",
    "parameter",
    "predict",
    "preset",
    "train",
]
