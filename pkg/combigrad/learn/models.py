"""
Modelos por familia: extractor afín (+ReLU opcional) desde las features
sintéticas hasta los pesos del solver.
"""
from typing import Dict, List

import numpy as np

from combigrad.errors import ConfigError, InstanceError
from combigrad.learn.config import TrainConfig
from combigrad.learn.ops import (
    affine,
    pairwise_dist,
    relu,
    scale_shift,
    sphere_project,
    vertex_to_edge_cost,
)
from combigrad.learn.tensor import Tensor, constant, parameter
from combigrad.solvers import MatchingInstance

# Costo inicial de vértice (centro del rango de costos de terreno)
SP_COST_OFFSET = 5.0
# Dígito inicial (centro de 0..9)
PM_DIGIT_OFFSET = 4.5


def _init_mlp(rng: np.random.Generator, in_dim: int, hidden: int, out_dim: int) -> Dict[str, Tensor]:
    dims = [in_dim, hidden, out_dim] if hidden else [in_dim, out_dim]
    params = {}
    for i, (d_in, d_out) in enumerate(zip(dims, dims[1:])):
        params[f"W{i}"] = parameter(rng.normal(0.0, 1.0 / np.sqrt(d_in), size=(d_out, d_in)))
        params[f"b{i}"] = parameter(np.zeros(d_out))
    return params


class Model:
    family = "abstract"

    def __init__(self, params: Dict[str, Tensor]):
        self.params = params

    def _mlp(self, x: Tensor) -> Tensor:
        n_layers = len(self.params) // 2
        for i in range(n_layers):
            x = affine(x, self.params[f"W{i}"], self.params[f"b{i}"])
            if i < n_layers - 1:
                x = relu(x)
        return x

    def weights(self, features: np.ndarray) -> Tensor:
        raise NotImplementedError

    def zero_grad(self) -> None:
        for p in self.params.values():
            p.zero_grad()

    def arrays(self) -> Dict[str, np.ndarray]:
        return {name: p.data for name, p in self.params.items()}

    def grads(self) -> Dict[str, np.ndarray]:
        return {name: p.grad for name, p in self.params.items()}

    def state_dict(self) -> Dict[str, List]:
        return {name: p.data.tolist() for name, p in self.params.items()}

    def load_state_dict(self, state: Dict[str, List]) -> None:
        if set(state) != set(self.params):
            raise InstanceError("state dict keys do not match the model", expected=sorted(self.params))
        for name, value in state.items():
            arr = np.asarray(value, dtype=np.float64)
            if arr.shape != self.params[name].shape:
                raise InstanceError("state dict shape mismatch", param=name)
            self.params[name].data[...] = arr


class VertexCostModel(Model):
    """Camino mínimo: features de terreno por vértice -> costo del vértice."""

    family = "sp"

    def weights(self, features: np.ndarray) -> Tensor:
        out = self._mlp(constant(features))
        return scale_shift(out, 1.0, SP_COST_OFFSET)


class SphereEmbeddingModel(Model):
    """TSP: feature de cada ciudad -> punto en la esfera -> distancias."""

    family = "tsp"

    def embed(self, features: np.ndarray) -> Tensor:
        return sphere_project(self._mlp(constant(features)))

    def weights(self, features: np.ndarray) -> Tensor:
        return pairwise_dist(self.embed(features))


class DigitCostModel(Model):
    """Matching: clase de dígito por vértice -> valor del dígito -> costo de arista."""

    family = "pm"

    def __init__(self, params: Dict[str, Tensor], instance: MatchingInstance):
        super().__init__(params)
        self.instance = instance

    def weights(self, features: np.ndarray) -> Tensor:
        digits = scale_shift(self._mlp(constant(features)), 1.0, PM_DIGIT_OFFSET)
        return vertex_to_edge_cost(digits, self.instance)


def build_model(config: TrainConfig, n_features: int, rng: np.random.Generator) -> Model:
    if config.family == "sp":
        return VertexCostModel(_init_mlp(rng, n_features, config.hidden, 1))
    if config.family == "tsp":
        return SphereEmbeddingModel(_init_mlp(rng, n_features, config.hidden, 3))
    if config.family == "pm":
        return DigitCostModel(_init_mlp(rng, n_features, config.hidden, 1), MatchingInstance(config.k))
    raise ConfigError(f"unknown family {config.family!r}")
