"""
Conjuntos Y explícitos: solver de juguete y oráculo de fuerza bruta.

Ambos rompen empates eligiendo el indicador lexicográficamente mayor
(el que selecciona el primer slot), la misma regla que usa el DP de
matching.
"""
import itertools
from typing import Any, Iterable, Iterator, Optional, Sequence

import numpy as np

from combigrad import settings
from combigrad.core import Solution, SolverHandle, is_tie, objective, tie_mask
from combigrad.errors import CapacityError, InputError, InstanceError

_CHUNK = 4096


def _lex_greatest(rows: Sequence[np.ndarray]) -> np.ndarray:
    return max(rows, key=lambda r: tuple(int(v) for v in r))


def brute_force_oracle(candidates: Iterable[Any], w: Any, budget: Optional[int] = None) -> Solution:
    """
    argmin exacto de w . phi(y) recorriendo `candidates` por bloques.

    Más de `budget` candidatos -> CapacityError (se corta apenas se pasa,
    sin materializar el resto del iterador).
    """
    budget = settings.ORACLE_BUDGET if budget is None else int(budget)
    w = np.asarray(w, dtype=np.float64).reshape(-1)
    if not np.all(np.isfinite(w)):
        raise InputError("w contains non-finite entries")

    it = iter(candidates)
    seen = 0
    best: Optional[np.ndarray] = None
    best_cost = np.inf

    while True:
        chunk = list(itertools.islice(it, _CHUNK))
        if not chunk:
            break
        seen += len(chunk)
        if seen > budget:
            raise CapacityError("candidate set exceeds the oracle budget", budget=budget)

        mat = np.asarray(chunk, dtype=np.int8)
        if mat.ndim != 2 or mat.shape[1] != w.shape[0]:
            raise InstanceError(
                "candidate indicators do not match the weight length",
                expected=int(w.shape[0]),
            )
        costs = mat.astype(np.float64) @ w
        c_min = float(costs.min())
        local = _lex_greatest(mat[tie_mask(costs, c_min)])

        if best is None or (c_min < best_cost and not is_tie(c_min, best_cost)):
            best, best_cost = local, c_min
        elif is_tie(c_min, best_cost):
            best = _lex_greatest([best, local])
            best_cost = min(best_cost, c_min)

    if best is None:
        raise InstanceError("empty candidate set")
    best = np.array(best, dtype=np.int8)
    return Solution(indicator=best, objective=objective(w, best))


class ExplicitSolver(SolverHandle):
    """Minimiza sobre una lista fija de indicadores (toys del laboratorio)."""

    family = "explicit"

    def __init__(self, candidates: Iterable[Any]):
        rows = {tuple(int(v) for v in np.asarray(c).reshape(-1)) for c in candidates}
        if not rows:
            raise InstanceError("explicit solver needs at least one candidate")
        lengths = {len(r) for r in rows}
        if len(lengths) != 1:
            raise InstanceError("candidates have different lengths", lengths=sorted(lengths))
        if any(v not in (0, 1) for r in rows for v in r):
            raise InstanceError("candidates must be 0/1 indicators")

        # Orden descendente: el primer empatado es el lexicográficamente mayor
        self._rows = sorted(rows, reverse=True)
        self._members = set(rows)
        self.Y = np.array(self._rows, dtype=np.int8)
        self._Yf = self.Y.astype(np.float64)

    @property
    def size(self) -> int:
        return int(self.Y.shape[1])

    def _solve(self, w: np.ndarray) -> np.ndarray:
        costs = self._Yf @ w
        first = int(np.argmax(tie_mask(costs, costs.min())))
        return self.Y[first].copy()

    def solve_many(self, weights: np.ndarray) -> np.ndarray:
        W = np.atleast_2d(np.asarray(weights, dtype=np.float64))
        if W.shape[1] != self.size:
            raise InstanceError(
                f"weights have {W.shape[1]} columns, instance expects {self.size}",
                expected=self.size,
                received=int(W.shape[1]),
            )
        if not np.all(np.isfinite(W)):
            raise InputError("weights contain non-finite entries")
        costs = W @ self._Yf.T
        best = costs.min(axis=1, keepdims=True)
        idx = tie_mask(costs, best).argmax(axis=1)
        return self.Y[idx].copy()

    def feasible(self, indicator: np.ndarray) -> bool:
        key = tuple(int(v) for v in np.asarray(indicator).reshape(-1))
        return key in self._members

    def enumerate(self) -> Iterator[np.ndarray]:
        return iter(self.Y.copy())

    def describe(self):
        info = super().describe()
        info["candidates"] = len(self._rows)
        return info
