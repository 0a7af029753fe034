"""
Problemas de laboratorio: un solver, una linealización de la pérdida y la
caja de pesos de donde se muestrea.
"""
from dataclasses import dataclass, field
from typing import Any, Optional, Tuple, Union

import numpy as np

from combigrad.core import Solution, SolverHandle
from combigrad.errors import InstanceError
from combigrad.solvers import ExplicitSolver, InstanceSpec, build_solver


@dataclass(frozen=True)
class Linearization:
    """f(y) = L(y_hat) + grad . (phi(y) - phi(y_hat))."""

    base: Solution
    base_loss: float
    grad: np.ndarray

    def __call__(self, y: Union[Solution, np.ndarray]) -> float:
        ind = y.indicator if isinstance(y, Solution) else np.asarray(y)
        diff = ind.astype(np.float64) - self.base.indicator.astype(np.float64)
        return float(self.base_loss + np.dot(self.grad, diff))

    def many(self, Y: np.ndarray) -> np.ndarray:
        diff = np.asarray(Y, dtype=np.float64) - self.base.indicator.astype(np.float64)
        return self.base_loss + diff @ self.grad


def eval_f(lin: Linearization, y: Union[Solution, np.ndarray]) -> float:
    ind = y.indicator if isinstance(y, Solution) else np.asarray(y)
    if ind.shape[-1] != lin.grad.shape[0]:
        raise InstanceError("solution length does not match the linearization", expected=lin.grad.shape[0])
    return lin(ind)


@dataclass
class LabProblem:
    name: str
    solver: SolverHandle
    lin: Linearization
    low: float
    high: float
    extent: Tuple[float, float, float, float] = (-1.0, 1.0, -1.0, 1.0)
    slice_axes: Optional[Tuple[np.ndarray, np.ndarray, np.ndarray]] = field(default=None, repr=False)

    @property
    def size(self) -> int:
        return self.solver.size

    def sample_weights(self, n: int, rng: np.random.Generator) -> np.ndarray:
        return rng.uniform(self.low, self.high, size=(n, self.size))

    def default_slice(self, rng: Optional[np.random.Generator] = None):
        """
        Corte 2D (origin, u, v) que se queda dentro de la caja de pesos para
        coordenadas en [-1, 1]. Los toys traen el suyo fijo.
        """
        if self.slice_axes is not None:
            return self.slice_axes
        rng = rng or np.random.default_rng(0)
        half = (self.high - self.low) / 2.0
        origin = np.full(self.size, self.low + half)
        u = rng.uniform(-1.0, 1.0, self.size)
        v = rng.uniform(-1.0, 1.0, self.size)
        scale = half / float(np.max(np.abs(u) + np.abs(v)))
        return origin, u * scale, v * scale


def _toy_linearization(base: np.ndarray, base_loss: float, grad) -> Linearization:
    ind = np.asarray(base, dtype=np.int8)
    return Linearization(
        base=Solution(indicator=ind, objective=0.0),
        base_loss=float(base_loss),
        grad=np.asarray(grad, dtype=np.float64),
    )


def toy_1d() -> LabProblem:
    """
    Y = {0, 1}, c(w, y) = w*y, f(y) = y. Forma cerrada:
    f_lambda(w) = 1 si w <= -lambda, -w/lambda en (-lambda, 0], 0 si w > 0.
    """
    solver = ExplicitSolver([[0], [1]])
    lin = _toy_linearization([1], 1.0, [1.0])
    return LabProblem(name="toy_1d", solver=solver, lin=lin, low=-25.0, high=5.0)


def toy_1d_closed_form(w: Any, lam: float) -> np.ndarray:
    w = np.asarray(w, dtype=np.float64)
    return np.where(w <= -lam, 1.0, np.where(w > 0, 0.0, -w / lam))


def toy_three_region() -> LabProblem:
    """
    w en R², Y = {(1,0), (0,1), (0,0)}: tres regiones de y(w) que se
    juntan en el origen, cada una con un valor distinto de f.
    """
    solver = ExplicitSolver([[1, 0], [0, 1], [0, 0]])
    lin = _toy_linearization([0, 0], 1.0, [1.0, -1.5])
    axes = (np.zeros(2), np.array([1.0, 0.0]), np.array([0.0, 1.0]))
    return LabProblem(
        name="toy_three_region",
        solver=solver,
        lin=lin,
        low=-40.0,
        high=40.0,
        extent=(-40.0, 40.0, -40.0, 40.0),
        slice_axes=axes,
    )


# Cajas de muestreo por familia (antes del corrimiento de camino mínimo)
_BOXES = {"sp": (1.0, 10.0), "tsp": (0.0, 10.0), "pm": (0.0, 100.0)}


def random_problem(family: str, k: int, lam: float = 20.0, seed: int = 0, connectivity: int = 8) -> LabProblem:
    """
    Instancia aleatoria de una familia con gradiente en [-1, 1]^N.

    En camino mínimo la caja se corre en `lam` para que w + lam*grad siga
    siendo positivo sin proyectar, así y_lambda resuelve exactamente el
    problema perturbado.
    """
    spec = InstanceSpec(family=family, k=k, connectivity=connectivity)
    solver = build_solver(spec)
    rng = np.random.default_rng(seed)
    low, high = _BOXES[family]
    if family == "sp":
        low, high = low + lam, high + lam

    w0 = rng.uniform(low, high, solver.size)
    base = solver.solve(w0)
    grad = rng.uniform(-1.0, 1.0, solver.size)
    base_loss = float(rng.integers(0, solver.size + 1))
    lin = Linearization(base=base, base_loss=base_loss, grad=grad)
    return LabProblem(name=f"{family}{k}", solver=solver, lin=lin, low=low, high=high)
