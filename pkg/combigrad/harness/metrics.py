"""Métricas de evaluación: costo óptimo, tour exacto y Procrustes."""
import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional

import numpy as np

from combigrad.core import Solution, SolverHandle, is_tie
from combigrad.errors import InputError

logger = logging.getLogger(__name__)

EARTH_RADIUS_KM = 6371.0
# Tolerancia absoluta de la comparación de costos
COST_TOL = 1e-9


def _indicator(pred: Any) -> np.ndarray:
    return pred.indicator if isinstance(pred, Solution) else np.asarray(pred).reshape(-1)


def accuracy_optimal_cost(
    pred: Any,
    true_weights: Any,
    solver: SolverHandle,
    optimum: Optional[float] = None,
) -> bool:
    """
    True si el costo de `pred` bajo los pesos verdaderos iguala el óptimo.
    Compara costos, no indicadores: un co-óptimo distinto también cuenta.
    Sin `optimum` se resuelve con el solver.
    """
    ind = _indicator(pred)
    if not solver.feasible(ind):
        logger.warning("infeasible prediction counted as wrong (family=%s)", solver.family)
        return False
    w = np.asarray(true_weights, dtype=np.float64).reshape(-1)
    if optimum is None:
        optimum = solver.solve(w).objective
    cost = float(np.dot(w, ind))
    return abs(cost - optimum) <= COST_TOL or is_tie(cost, optimum)


def tour_match(pred: Any, label: Any) -> bool:
    """Precisión de tour completo: el mismo conjunto de aristas."""
    return bool(np.array_equal(_indicator(pred).astype(np.int8), np.asarray(label, dtype=np.int8).reshape(-1)))


@dataclass
class ProcrustesResult:
    rotation: np.ndarray
    mean_offset: float
    degenerate: bool
    radius: Optional[float] = None

    @property
    def mean_offset_km(self) -> Optional[float]:
        return None if self.radius is None else self.mean_offset * self.radius

    def to_dict(self) -> Dict[str, Any]:
        return {
            "rotation": self.rotation.tolist(),
            "mean_offset": self.mean_offset,
            "mean_offset_km": self.mean_offset_km,
            "degenerate": self.degenerate,
        }


def procrustes_offset(X: Any, Y: Any, radius: Optional[float] = None) -> ProcrustesResult:
    """
    R* = argmin_{R^T R = I} |R X - Y|² sobre puntos por fila (se permiten
    reflexiones) y la distancia angular media entre R x_i e y_i.
    """
    X = np.asarray(X, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    if X.shape != Y.shape or X.ndim != 2 or X.shape[1] != 3:
        raise InputError("procrustes needs two (k, 3) matrices", x=list(X.shape), y=list(Y.shape))
    if X.shape[0] < 3:
        raise InputError("procrustes needs at least 3 points", k=X.shape[0])
    for name, M in (("X", X), ("Y", Y)):
        if not np.allclose(np.linalg.norm(M, axis=1), 1.0, atol=1e-6):
            raise InputError(f"rows of {name} must be unit vectors")

    degenerate = np.linalg.matrix_rank(X, tol=1e-9) < 2 or np.linalg.matrix_rank(Y, tol=1e-9) < 2
    if degenerate:
        logger.warning("procrustes on a rank<2 configuration; rotation is not unique")

    U, _, Vt = np.linalg.svd(Y.T @ X)
    R = U @ Vt
    aligned = X @ R.T
    cosines = np.clip(np.sum(aligned * Y, axis=1), -1.0, 1.0)
    return ProcrustesResult(
        rotation=R,
        mean_offset=float(np.mean(np.arccos(cosines))),
        degenerate=bool(degenerate),
        radius=radius,
    )
