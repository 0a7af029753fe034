"""
Loop de entrenamiento por minibatches con la capa del solver adentro.

Por ejemplo: pesos = modelo(features) -> y = solve(pesos) -> Hamming
contra la etiqueta; el backward del solver aporta el gradiente. El
gradiente del batch es el promedio por ejemplo (una llamada extra al
solver por ejemplo). Las métricas se registran por época.
"""
import logging
import time
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np

from combigrad.core import Solution, SolverHandle
from combigrad.errors import DivergenceError, InstanceError, NumericError
from combigrad.harness.datasets import Example, SyntheticDataset, derive_seed
from combigrad.harness.metrics import accuracy_optimal_cost, tour_match
from combigrad.learn.config import TrainConfig
from combigrad.learn.models import Model, SphereEmbeddingModel, build_model
from combigrad.learn.ops import blackbox_solve, hamming, hamming_loss, pairwise_dist, repellent_reg
from combigrad.learn.optim import AdamState, adam_step
from combigrad.solvers import InstanceSpec, build_solver

logger = logging.getLogger(__name__)


@dataclass
class EpochRecord:
    epoch: int
    train_loss: float
    test_loss: Optional[float]
    train_acc: float
    test_acc: Optional[float]
    lr: float

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class TrainResult:
    model: Model
    history: List[EpochRecord] = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def final(self) -> Dict[str, Any]:
        return self.history[-1].to_dict() if self.history else {}


def solver_for(config: TrainConfig) -> SolverHandle:
    spec = InstanceSpec(family=config.family, k=config.k, connectivity=config.connectivity)
    return build_solver(spec, approximate=config.solver == "approx", weight_floor=config.weight_floor)


def exact_solver_for(config: TrainConfig) -> SolverHandle:
    spec = InstanceSpec(family=config.family, k=config.k, connectivity=config.connectivity)
    return build_solver(spec, weight_floor=config.weight_floor)


def is_correct(family: str, pred: Solution, example: Example, exact_solver: SolverHandle) -> bool:
    """SP y PM: costo óptimo bajo los pesos verdaderos. TSP: tour completo."""
    if family == "tsp":
        return tour_match(pred, example.label)
    optimum = float(np.dot(example.true_weights, example.label))
    return accuracy_optimal_cost(pred, example.true_weights, exact_solver, optimum=optimum)


def predict(model: Model, solver: SolverHandle, features: np.ndarray) -> Solution:
    w = model.weights(features).data.reshape(-1)
    return solver.solve(solver.project(w))


def evaluate(
    model: Model,
    dataset: SyntheticDataset,
    solver: SolverHandle,
    exact_solver: Optional[SolverHandle] = None,
) -> Tuple[float, float]:
    """(Hamming medio, accuracy) del modelo sobre `dataset`."""
    if len(dataset) == 0:
        return float("nan"), float("nan")
    exact_solver = exact_solver or solver
    losses, hits = [], 0
    for ex in dataset:
        pred = predict(model, solver, ex.features)
        losses.append(hamming(pred.indicator, ex.label)[0])
        hits += is_correct(dataset.family, pred, ex, exact_solver)
    return float(np.mean(losses)), hits / len(dataset)


def _check_dataset(config: TrainConfig, dataset: SyntheticDataset) -> None:
    if dataset.family != config.family or dataset.k != config.k:
        raise InstanceError(
            "dataset does not match the config",
            config=f"{config.family}({config.k})",
            dataset=f"{dataset.family}({dataset.k})",
        )
    if len(dataset) == 0:
        raise InstanceError("training set is empty")


def _example_step(
    model: Model,
    solver: SolverHandle,
    config: TrainConfig,
    example: Example,
    weight: float,
    repel: bool,
) -> Solution:
    """Forward + backward de un ejemplo; acumula `weight` * gradiente en los parámetros."""
    if isinstance(model, SphereEmbeddingModel):
        emb = model.embed(example.features)
        w = pairwise_dist(emb)
    else:
        emb, w = None, model.weights(example.features)
    y, sol = blackbox_solve(w, solver, config.lam)
    hamming_loss(y, example.label).backward(weight)
    if repel and emb is not None:
        repellent_reg(emb, config.c_k).backward(weight)
    return sol


def train(
    config: TrainConfig,
    train_set: SyntheticDataset,
    test_set: Optional[SyntheticDataset] = None,
    solver: Optional[SolverHandle] = None,
    on_epoch: Optional[Callable[[EpochRecord], None]] = None,
) -> TrainResult:
    """
    Entrena un modelo nuevo según `config`. Determinista dado config.seed:
    la inicialización y el orden de los batches salen de semillas derivadas.
    """
    _check_dataset(config, train_set)
    solver = solver or solver_for(config)
    exact_solver = exact_solver_for(config)

    model = build_model(config, train_set.n_features, np.random.default_rng(derive_seed(config.seed, "train/init")))
    shuffle_rng = np.random.default_rng(derive_seed(config.seed, "train/shuffle"))
    state = AdamState(
        lr=config.lr,
        beta1=config.betas[0],
        beta2=config.betas[1],
        eps=config.eps,
        schedule=list(config.schedule),
    )
    result = TrainResult(model=model)
    started = time.perf_counter()
    n = len(train_set)

    for epoch in range(config.epochs):
        lr = state.lr_at(epoch)
        repel = config.family == "tsp" and config.repellent_active(epoch)
        order = shuffle_rng.permutation(n)
        losses, hits = [], 0

        for b, start in enumerate(range(0, n, config.batch)):
            batch = order[start:start + config.batch]
            model.zero_grad()
            for idx in batch:
                ex = train_set[int(idx)]
                try:
                    sol = _example_step(model, solver, config, ex, 1.0 / len(batch), repel)
                except NumericError as e:
                    raise DivergenceError(
                        "training diverged: non-finite values in the forward/backward pass",
                        epoch=epoch,
                        batch=b,
                        example=int(idx),
                        op=e.context.get("op"),
                    ) from e
                losses.append(hamming(sol.indicator, ex.label)[0])
                hits += is_correct(config.family, sol, ex, exact_solver)

            grads = model.grads()
            if not all(np.all(np.isfinite(g)) for g in grads.values()):
                raise DivergenceError("training diverged: non-finite gradient", epoch=epoch, batch=b)
            adam_step(model.arrays(), grads, state, lr=lr)

        train_loss = float(np.mean(losses))
        if not np.isfinite(train_loss):
            raise DivergenceError("training diverged: non-finite loss", epoch=epoch, loss=train_loss)

        if test_set is not None and len(test_set):
            test_loss, test_acc = evaluate(model, test_set, solver, exact_solver)
        else:
            test_loss, test_acc = None, None

        record = EpochRecord(
            epoch=epoch,
            train_loss=train_loss,
            test_loss=test_loss,
            train_acc=hits / n,
            test_acc=test_acc,
            lr=lr,
        )
        result.history.append(record)
        logger.info(
            "epoch %d/%d lr=%.2e train_loss=%.4f train_acc=%.3f test_acc=%s",
            epoch + 1,
            config.epochs,
            lr,
            train_loss,
            record.train_acc,
            "n/a" if test_acc is None else f"{test_acc:.3f}",
        )
        if on_epoch is not None:
            on_epoch(record)

    result.wall_time = time.perf_counter() - started
    return result
