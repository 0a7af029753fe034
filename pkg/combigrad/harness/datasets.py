"""
Datasets sintéticos para las tres familias.

Cada ejemplo guarda sus features crudas, la etiqueta (indicador óptimo
del solver exacto), los pesos verdaderos ocultos y la verdad de terreno
que los generó (costos de terreno, ciudades, dígitos). Toda la
aleatoriedad sale de semillas derivadas de (seed, etiqueta), así cada
ejemplo se puede regenerar solo.
"""
import hashlib
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from combigrad import settings
from combigrad.errors import CapacityError, InputError, InstanceError
from combigrad.solvers import GridGraph, MatchingInstance, TspInstance, dijkstra_grid, matching_exact, tsp_exact
from combigrad.solvers.tsp import EXACT_MAX_K as TSP_EXACT_MAX_K

logger = logging.getLogger(__name__)

# Rango de costos ocultos de terreno
TERRAIN_COST_RANGE = (0.8, 9.2)
DIGIT_CLASSES = 10


def derive_seed(seed: int, tag: str) -> int:
    digest = hashlib.sha256(f"{seed}:{tag}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


@dataclass
class Example:
    features: np.ndarray
    label: np.ndarray
    true_weights: np.ndarray
    truth: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "features": self.features.tolist(),
            "label": [int(v) for v in self.label],
            "true_weights": self.true_weights.tolist(),
            "truth": self.truth,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Example":
        return cls(
            features=np.asarray(data["features"], dtype=np.float64),
            label=np.asarray(data["label"], dtype=np.int8),
            true_weights=np.asarray(data["true_weights"], dtype=np.float64),
            truth=data.get("truth", {}),
        )


@dataclass
class SyntheticDataset:
    family: str
    k: int
    examples: List[Example]
    meta: Dict[str, Any] = field(default_factory=dict)

    @property
    def size(self) -> int:
        return len(self.examples)

    def __len__(self) -> int:
        return len(self.examples)

    def __iter__(self) -> Iterator[Example]:
        return iter(self.examples)

    def __getitem__(self, idx: int) -> Example:
        return self.examples[idx]

    @property
    def n_features(self) -> int:
        return int(self.examples[0].features.shape[-1])

    def split(self, n_first: int) -> Tuple["SyntheticDataset", "SyntheticDataset"]:
        return (
            SyntheticDataset(self.family, self.k, self.examples[:n_first], dict(self.meta)),
            SyntheticDataset(self.family, self.k, self.examples[n_first:], dict(self.meta)),
        )


def _build_examples(size: int, make: Callable[[int], Example]) -> List[Example]:
    """Un ejemplo por índice; con COMBIGRAD_WORKERS > 1 se reparten en hilos."""
    if settings.WORKERS <= 1 or size < 2:
        return [make(i) for i in range(size)]
    with ThreadPoolExecutor(max_workers=settings.WORKERS) as pool:
        return list(pool.map(make, range(size)))


def _one_hot(idx: np.ndarray, n: int) -> np.ndarray:
    out = np.zeros((idx.shape[0], n))
    out[np.arange(idx.shape[0]), idx] = 1.0
    return out


def gen_sp(
    k: int,
    size: int,
    n_terrain_types: int = 5,
    seed: int = 0,
    noise: float = 0.1,
    connectivity: int = 8,
    type_costs: Optional[Sequence[float]] = None,
) -> SyntheticDataset:
    """
    Grillas de terreno: cada vértice tiene un tipo con costo oculto fijo;
    la feature es el one-hot del tipo más ruido gaussiano.
    """
    if n_terrain_types < 2:
        raise InputError("need at least two terrain types", n_terrain_types=n_terrain_types)
    grid = GridGraph(k, connectivity)
    if type_costs is None:
        costs = np.random.default_rng(derive_seed(seed, "sp/types")).uniform(*TERRAIN_COST_RANGE, n_terrain_types)
    else:
        costs = np.asarray(type_costs, dtype=np.float64)
        if costs.shape != (n_terrain_types,) or np.any(costs <= 0):
            raise InputError("type_costs must give one positive cost per terrain type")

    def make(i: int) -> Example:
        rng = np.random.default_rng(derive_seed(seed, f"sp/{i}"))
        types = rng.integers(0, n_terrain_types, grid.size)
        features = _one_hot(types, n_terrain_types) + noise * rng.normal(size=(grid.size, n_terrain_types))
        vertex_costs = costs[types]
        label = dijkstra_grid(grid, vertex_costs).indicator
        return Example(features, label, vertex_costs, {"types": types.tolist()})

    meta = {
        "n_terrain_types": n_terrain_types,
        "type_costs": costs.tolist(),
        "connectivity": connectivity,
        "noise": noise,
        "seed": seed,
    }
    return SyntheticDataset("sp", k, _build_examples(size, make), meta)


def globe_pool(n_cities_pool: int, flag_dim: int, seed: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Ubicaciones fijas en la esfera unitaria y una feature aleatoria fija por ciudad.

    Con flag_dim >= n_cities_pool las banderas son filas ortogonales de
    norma sqrt(flag_dim); la capa afín ve entonces una tabla de embeddings
    bien condicionada. Con menos dimensiones son gaussianas.
    """
    rng = np.random.default_rng(derive_seed(seed, "tsp/pool"))
    locations = rng.normal(size=(n_cities_pool, 3))
    locations /= np.linalg.norm(locations, axis=1, keepdims=True)
    if flag_dim >= n_cities_pool:
        q, _ = np.linalg.qr(rng.normal(size=(flag_dim, n_cities_pool)))
        flags = np.sqrt(flag_dim) * q.T
    else:
        flags = rng.normal(size=(n_cities_pool, flag_dim))
    return locations, flags


def gen_tsp(
    k: int,
    size: int,
    n_cities_pool: int = 100,
    seed: int = 0,
    flag_dim: Optional[int] = None,
) -> SyntheticDataset:
    """
    Un pool fijo de ciudades sobre la esfera; cada ejemplo toma k de ellas
    y expone sólo sus "banderas" (features). La etiqueta es el tour óptimo
    según las distancias de cuerda reales.
    """
    if n_cities_pool < k:
        raise InstanceError("city pool must hold at least k cities", k=k, pool=n_cities_pool)
    if k > TSP_EXACT_MAX_K:
        raise CapacityError("labels need the exact TSP solver", k=k, guard=TSP_EXACT_MAX_K)
    instance = TspInstance(k)
    flag_dim = flag_dim or n_cities_pool
    locations, flags = globe_pool(n_cities_pool, flag_dim, seed)

    def make(i: int) -> Example:
        rng = np.random.default_rng(derive_seed(seed, f"tsp/{i}"))
        cities = np.sort(rng.choice(n_cities_pool, size=k, replace=False))
        dist = instance.chord_distances(locations[cities])
        label = tsp_exact(instance, dist).indicator
        return Example(flags[cities], label, dist, {"cities": cities.tolist()})

    meta = {
        "n_cities_pool": n_cities_pool,
        "flag_dim": flag_dim,
        "pool_locations": locations.tolist(),
        "pool_flags": flags.tolist(),
        "seed": seed,
    }
    return SyntheticDataset("tsp", k, _build_examples(size, make), meta)


def gen_pm(k: int, size: int, seed: int = 0, noise: float = 0.0) -> SyntheticDataset:
    """Grillas de dígitos 0-9; la feature es el one-hot de la clase (más ruido si noise > 0)."""
    instance = MatchingInstance(k)
    cells = k * k

    def make(i: int) -> Example:
        rng = np.random.default_rng(derive_seed(seed, f"pm/{i}"))
        digits = rng.integers(0, DIGIT_CLASSES, cells)
        features = _one_hot(digits, DIGIT_CLASSES) + noise * rng.normal(size=(cells, DIGIT_CLASSES))
        edge_costs = instance.edge_costs_from_digits(digits)
        label = matching_exact(instance, edge_costs).indicator
        return Example(features, label, edge_costs, {"digits": digits.tolist()})

    meta = {"noise": noise, "seed": seed}
    return SyntheticDataset("pm", k, _build_examples(size, make), meta)


def generate(config, size: Optional[int] = None) -> SyntheticDataset:
    """Dataset de train+test para un TrainConfig (un solo pool para TSP)."""
    size = config.train_size + config.test_size if size is None else size
    logger.info("generating %s(k=%d) dataset: %d examples, seed=%d", config.family, config.k, size, config.seed)
    if config.family == "sp":
        return gen_sp(config.k, size, config.n_terrain_types, config.seed, config.feature_noise(), config.connectivity)
    if config.family == "tsp":
        return gen_tsp(config.k, size, config.pool, config.seed, config.flag_dim)
    return gen_pm(config.k, size, config.seed, config.feature_noise())


def make_splits(config) -> Tuple[SyntheticDataset, SyntheticDataset]:
    return generate(config).split(config.train_size)


# === JSON-lines ===


def _meta_path(path: Path) -> Path:
    return path.with_name(path.stem + ".meta.json")


def save_dataset(dataset: SyntheticDataset, path: Union[str, Path]) -> Path:
    """Un ejemplo por línea; family/k/meta van al .meta.json hermano."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        for ex in dataset.examples:
            fh.write(json.dumps(ex.to_dict()) + "\n")
    header = {"family": dataset.family, "k": dataset.k, "size": dataset.size, "meta": dataset.meta}
    _meta_path(path).write_text(json.dumps(header), encoding="utf-8")
    return path


def load_dataset(path: Union[str, Path]) -> SyntheticDataset:
    path = Path(path)
    meta_file = _meta_path(path)
    if not path.exists() or not meta_file.exists():
        raise InputError("dataset file or its .meta.json is missing", path=str(path))
    header = json.loads(meta_file.read_text(encoding="utf-8"))
    with path.open(encoding="utf-8") as fh:
        examples = [Example.from_dict(json.loads(line)) for line in fh if line.strip()]
    return SyntheticDataset(header["family"], int(header["k"]), examples, header.get("meta", {}))
