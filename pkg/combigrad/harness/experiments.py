"""
Corridas completas: dataset -> entrenamiento -> métricas finales.

`run_experiment` arma un RunRecord reproducible desde (config, seed).
`compare_solvers` repite el experimento TSP con el solver aproximado y
agrega la columna del aproximado evaluado sobre las ubicaciones reales
(el techo de lo que ese solver puede lograr). `gradient_activity` mide
cuántos ejemplos reciben gradiente del solver con un lambda dado.
"""
import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from combigrad.core import backward, forward
from combigrad.errors import ConfigError, InstanceError
from combigrad.harness.datasets import SyntheticDataset, derive_seed, make_splits
from combigrad.harness.metrics import EARTH_RADIUS_KM, procrustes_offset, tour_match
from combigrad.learn.config import TrainConfig
from combigrad.learn.models import Model, SphereEmbeddingModel, build_model
from combigrad.learn.ops import hamming
from combigrad.learn.train import EpochRecord, TrainResult, solver_for, train
from combigrad.solvers import TspInstance, tsp_approx

logger = logging.getLogger(__name__)


@dataclass
class RunRecord:
    config_hash: str
    family: str
    k: int
    seed: int
    history: List[Dict[str, Any]] = field(default_factory=list)
    final: Dict[str, Any] = field(default_factory=dict)
    wall_time: float = 0.0
    model_state: Optional[Dict[str, Any]] = None

    def to_dict(self, include_model: bool = False) -> Dict[str, Any]:
        data = {
            "config_hash": self.config_hash,
            "family": self.family,
            "k": self.k,
            "seed": self.seed,
            "history": self.history,
            "final": self.final,
            "wall_time": self.wall_time,
        }
        if include_model:
            data["model_state"] = self.model_state
        return data


def embedding_offset(result: TrainResult, dataset: SyntheticDataset) -> Dict[str, Any]:
    """Procrustes entre el embedding aprendido del pool completo y las ubicaciones ocultas."""
    model = result.model
    if not isinstance(model, SphereEmbeddingModel):
        raise ConfigError("embedding offset only applies to tsp runs")
    flags = np.asarray(dataset.meta["pool_flags"], dtype=np.float64)
    truth = np.asarray(dataset.meta["pool_locations"], dtype=np.float64)
    learned = model.embed(flags).data
    return procrustes_offset(learned, truth, radius=EARTH_RADIUS_KM).to_dict()


def record_from(config: TrainConfig, result: TrainResult, train_set: SyntheticDataset) -> RunRecord:
    final = dict(result.final)
    if config.family == "tsp":
        final["procrustes"] = embedding_offset(result, train_set)
        final["procrustes"].pop("rotation")
    return RunRecord(
        config_hash=config.config_hash(),
        family=config.family,
        k=config.k,
        seed=config.seed,
        history=[r.to_dict() for r in result.history],
        final=final,
        wall_time=result.wall_time,
        model_state=result.model.state_dict(),
    )


def run_experiment(
    config: TrainConfig,
    train_set: Optional[SyntheticDataset] = None,
    test_set: Optional[SyntheticDataset] = None,
    on_epoch: Optional[Callable[[EpochRecord], None]] = None,
) -> RunRecord:
    if train_set is None:
        train_set, test_set = make_splits(config)
    logger.info("running %s(k=%d) seed=%d hash=%s", config.family, config.k, config.seed, config.config_hash()[:12])
    result = train(config, train_set, test_set, on_epoch=on_epoch)
    record = record_from(config, result, train_set)
    logger.info("finished in %.1fs: %s", record.wall_time, {k: v for k, v in record.final.items() if k != "procrustes"})
    return record


def approx_on_truth_accuracy(dataset: SyntheticDataset) -> float:
    """Accuracy de tour completo del solver aproximado sobre las distancias reales."""
    instance = TspInstance(dataset.k)
    if len(dataset) == 0:
        return float("nan")
    hits = sum(tour_match(tsp_approx(instance, ex.true_weights), ex.label) for ex in dataset)
    return hits / len(dataset)


def compare_solvers(config: TrainConfig) -> Dict[str, Any]:
    """
    Tabla exacto vs aproximado embebido (mismo dataset y semilla) más el
    techo del aproximado sobre la verdad.
    """
    if config.family != "tsp":
        raise ConfigError("solver comparison is defined for tsp", family=config.family)
    train_set, test_set = make_splits(config)

    rows = []
    for solver in ("exact", "approx"):
        cfg = config.model_copy(update={"solver": solver})
        record = run_experiment(cfg, train_set, test_set)
        rows.append(
            {
                "solver": solver,
                "train_acc": record.final.get("train_acc"),
                "test_acc": record.final.get("test_acc"),
                "wall_time": record.wall_time,
            }
        )

    ceiling = {
        "train_acc": approx_on_truth_accuracy(train_set),
        "test_acc": approx_on_truth_accuracy(test_set),
    }
    return {
        "family": config.family,
        "k": config.k,
        "seed": config.seed,
        "rows": rows,
        "approx_on_truth": ceiling,
    }


def gradient_activity(
    config: TrainConfig,
    dataset: SyntheticDataset,
    model: Optional[Model] = None,
) -> Dict[str, Any]:
    """
    Fracción de ejemplos con gradiente del solver distinto de cero bajo
    config.lam, junto a la fracción con predicción distinta de la etiqueta.
    Sin `model` se usa la inicialización de `train` para config.seed.
    """
    if len(dataset) == 0:
        raise InstanceError("gradient activity needs at least one example")
    solver = solver_for(config)
    if model is None:
        rng = np.random.default_rng(derive_seed(config.seed, "train/init"))
        model = build_model(config, dataset.n_features, rng)

    nonzero = mismatch = 0
    for ex in dataset:
        w_hat = solver.project(model.weights(ex.features).data.reshape(-1))
        y_hat, state = forward(solver, w_hat, config.lam)
        _, grad_y = hamming(y_hat.indicator, ex.label)
        grad = backward(solver, state, grad_y)
        nonzero += bool(np.any(grad != 0.0))
        mismatch += not np.array_equal(y_hat.indicator, np.asarray(ex.label).reshape(-1))

    size = len(dataset)
    logger.info("gradient activity at lambda=%g: %d/%d nonzero, %d mismatched", config.lam, nonzero, size, mismatch)
    return {
        "lambda": config.lam,
        "size": size,
        "nonzero_fraction": nonzero / size,
        "mismatch_fraction": mismatch / size,
    }
