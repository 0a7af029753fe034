"""
Capa de caja negra: contrato del solver y pasadas forward/backward.

El solver es un minimizador exacto (o aproximado, marcado como tal) de
c(w, y) = w . phi(y) sobre un conjunto finito Y fijo por instancia. La capa
nunca le pide derivadas: el backward perturba los pesos con el gradiente
de la pérdida y vuelve a llamar al solver una sola vez.
"""
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Dict, Iterator, Tuple

import numpy as np

from combigrad.errors import InputError, InstanceError, NoInformativeLambda


# Tolerancia relativa para considerar dos objetivos como empate
TIE_RTOL = 1e-12


def is_tie(a: float, b: float) -> bool:
    return abs(a - b) <= TIE_RTOL * max(1.0, abs(a), abs(b))


def tie_mask(values: np.ndarray, best: np.ndarray) -> np.ndarray:
    """Máscara de entradas empatadas con `best` (acepta broadcasting)."""
    scale = np.maximum(1.0, np.maximum(np.abs(values), np.abs(best)))
    return np.abs(values - best) <= TIE_RTOL * scale


def as_weights(values: Any, size: int, name: str = "w") -> np.ndarray:
    """
    Copia `values` a un vector float64 de largo `size`.

    Largo distinto -> InstanceError; NaN/inf -> InputError.
    """
    arr = np.array(values, dtype=np.float64).reshape(-1)
    if arr.shape[0] != size:
        raise InstanceError(
            f"{name} has length {arr.shape[0]}, instance expects {size}",
            expected=size,
            received=int(arr.shape[0]),
        )
    if not np.all(np.isfinite(arr)):
        bad = int(np.flatnonzero(~np.isfinite(arr))[0])
        raise InputError(f"{name} contains non-finite entries", index=bad)
    return arr


def objective(w: np.ndarray, indicator: np.ndarray) -> float:
    return float(np.dot(w, indicator))


@dataclass(frozen=True)
class Solution:
    indicator: np.ndarray
    objective: float

    def to_dict(self) -> Dict[str, Any]:
        return {"indicator": [int(v) for v in self.indicator], "objective": self.objective}


class SolverHandle(ABC):
    """
    Minimizador opaco de w . phi(y) sobre una estructura de instancia fija.

    Las subclases implementan `_solve` (devuelve el indicador 0/1) y
    `feasible`. `solve` valida la entrada y arma la Solution, así todas
    las familias calculan el objetivo de la misma forma.
    """

    family: str = "abstract"
    exact: bool = True

    @property
    @abstractmethod
    def size(self) -> int:
        ...

    @abstractmethod
    def _solve(self, w: np.ndarray) -> np.ndarray:
        ...

    @abstractmethod
    def feasible(self, indicator: np.ndarray) -> bool:
        ...

    def enumerate(self) -> Iterator[np.ndarray]:
        """Iterador exhaustivo sobre Y; solo instancias pequeñas lo soportan."""
        raise NotImplementedError(f"{type(self).__name__} does not enumerate Y")

    def project(self, w: np.ndarray) -> np.ndarray:
        return w

    def describe(self) -> Dict[str, Any]:
        return {"family": self.family, "exact": self.exact, "size": self.size}

    def solve(self, w: Any) -> Solution:
        w = as_weights(w, self.size)
        indicator = np.asarray(self._solve(w), dtype=np.int8)
        return Solution(indicator=indicator, objective=objective(w, indicator))

    def solve_many(self, weights: np.ndarray) -> np.ndarray:
        """Resuelve cada fila de `weights`; devuelve la matriz de indicadores."""
        weights = np.atleast_2d(np.asarray(weights, dtype=np.float64))
        return np.stack([self.solve(row).indicator for row in weights])


class CountingSolver(SolverHandle):
    """Envuelve un solver y cuenta las llamadas a `solve`."""

    def __init__(self, inner: SolverHandle):
        self.inner = inner
        self.calls = 0
        self.family = inner.family
        self.exact = inner.exact

    @property
    def size(self) -> int:
        return self.inner.size

    def _solve(self, w: np.ndarray) -> np.ndarray:
        return self.inner._solve(w)

    def solve(self, w: Any) -> Solution:
        self.calls += 1
        return self.inner.solve(w)

    def feasible(self, indicator: np.ndarray) -> bool:
        return self.inner.feasible(indicator)

    def enumerate(self) -> Iterator[np.ndarray]:
        return self.inner.enumerate()

    def project(self, w: np.ndarray) -> np.ndarray:
        return self.inner.project(w)

    def describe(self) -> Dict[str, Any]:
        return self.inner.describe()


@dataclass(frozen=True)
class BlackboxLayerState:
    w_hat: np.ndarray
    y_hat: Solution
    lam: float


def check_lambda(lam: float) -> float:
    lam = float(lam)
    if not np.isfinite(lam) or lam <= 0:
        raise InputError("lambda must be a positive finite number", value=lam)
    return lam


def forward(solver: SolverHandle, w_hat: Any, lam: float) -> Tuple[Solution, BlackboxLayerState]:
    lam = check_lambda(lam)
    w = as_weights(w_hat, solver.size, name="w_hat")
    y_hat = solver.solve(w)
    return y_hat, BlackboxLayerState(w_hat=w, y_hat=y_hat, lam=lam)


def backward(solver: SolverHandle, state: BlackboxLayerState, grad_y: Any) -> np.ndarray:
    """
    Gradiente de f_lambda en w_hat: -(phi(y_hat) - phi(y_lambda)) / lambda,
    con y_lambda = solve(w_hat + lambda * grad_y). Una sola llamada al solver.
    """
    g = as_weights(grad_y, solver.size, name="grad_y")
    w_prime = solver.project(state.w_hat + state.lam * g)
    y_lam = solver.solve(w_prime)
    diff = state.y_hat.indicator.astype(np.float64) - y_lam.indicator.astype(np.float64)
    return -diff / state.lam


def suggest_lambda(w_sample: Any, grad_sample: Any) -> float:
    """
    lambda ~ <|w|> / <|dL/dy|>: deja ambos términos de w' en el mismo orden.

    Se usan promedios de valores absolutos; un gradiente de promedio cero
    no da un lambda informativo.
    """
    w = np.abs(np.asarray(w_sample, dtype=np.float64).reshape(-1))
    g = np.abs(np.asarray(grad_sample, dtype=np.float64).reshape(-1))
    if w.size == 0 or g.size == 0:
        raise NoInformativeLambda("empty sample")
    mean_w = float(w.mean())
    mean_g = float(g.mean())
    if not np.isfinite(mean_g) or mean_g == 0.0:
        raise NoInformativeLambda("gradient sample has zero mean magnitude", mean_grad=mean_g)
    if not np.isfinite(mean_w) or mean_w == 0.0:
        raise NoInformativeLambda("weight sample has zero mean magnitude", mean_w=mean_w)
    return mean_w / mean_g
