"""
Evaluación directa de la interpolación f_lambda y chequeos empíricos de
sus propiedades (continuidad, conjuntos monótonos en lambda, gradiente,
sándwich, desplazamiento acotado).

f_lambda(w) = f(y_lambda(w)) - (1/lambda) [c(w, y(w)) - c(w, y_lambda(w))]
con y(w) = solve(w) e y_lambda(w) = solve(w + lambda * grad).
"""
import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from combigrad import settings
from combigrad.core import Solution, SolverHandle, as_weights, backward, check_lambda, forward, objective, tie_mask
from combigrad.errors import InputError, InstanceError
from combigrad.lab.problems import LabProblem, Linearization

logger = logging.getLogger(__name__)

# Pertenencia a W_eq: |f_lambda(w) - f(y(w))| <= EQ_TOL
EQ_TOL = 1e-9


def _solve_rows(solver: SolverHandle, W: np.ndarray) -> np.ndarray:
    """solve_many repartido en COMBIGRAD_WORKERS hilos."""
    workers = settings.WORKERS
    if workers <= 1 or W.shape[0] < 2 * workers:
        return solver.solve_many(W)
    parts = np.array_split(W, workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return np.concatenate(list(pool.map(solver.solve_many, parts)))


def evaluate_many(solver: SolverHandle, lin: Linearization, W: np.ndarray, lam: Any):
    """
    f_lambda en cada fila de W. `lam` puede ser escalar o uno por fila.
    Devuelve (valores, Y, Y_lambda).
    """
    W = np.atleast_2d(np.asarray(W, dtype=np.float64))
    if W.shape[1] != solver.size:
        raise InstanceError("weights do not match the instance size", expected=solver.size, received=W.shape[1])
    lams = np.broadcast_to(np.asarray(lam, dtype=np.float64), (W.shape[0],))
    if not np.all(np.isfinite(lams)) or np.any(lams <= 0):
        raise InputError("lambda must be a positive finite number")

    Y = _solve_rows(solver, W)
    perturbed = solver.project(W + lams[:, None] * lin.grad[None, :])
    YL = _solve_rows(solver, perturbed)
    c_y = np.einsum("ij,ij->i", W, Y.astype(np.float64))
    c_yl = np.einsum("ij,ij->i", W, YL.astype(np.float64))
    values = lin.many(YL) - (c_y - c_yl) / lams
    return values, Y, YL


def eval_f_lambda(solver: SolverHandle, lin: Linearization, w: Any, lam: float) -> float:
    lam = check_lambda(lam)
    w = as_weights(w, solver.size)
    y = solver.solve(w)
    y_lam = solver.solve(solver.project(w + lam * lin.grad))
    return lin(y_lam) - (y.objective - objective(w, y_lam.indicator)) / lam


def perturbed_argmin(candidates: Iterable[Any], lin: Linearization, w: Any, lam: float) -> Solution:
    """
    argmin_y c(w, y) + lambda f(y) enumerando Y, sin pasar por el solver.
    Empates al indicador lexicográficamente mayor.
    """
    lam = check_lambda(lam)
    w = np.asarray(w, dtype=np.float64).reshape(-1)
    Y = np.asarray(list(candidates), dtype=np.int8)
    if Y.ndim != 2 or Y.shape[1] != w.shape[0]:
        raise InstanceError("candidates do not match the weight length", expected=int(w.shape[0]))
    costs = Y.astype(np.float64) @ w + lam * lin.many(Y)
    tied = Y[tie_mask(costs, costs.min())]
    best = np.array(max(tied, key=lambda r: tuple(int(v) for v in r)), dtype=np.int8)
    return Solution(indicator=best, objective=objective(w, best))


# === Reportes ===


@dataclass
class ContinuityReport:
    passed: bool
    target: str
    max_jump: float
    bound: float
    c_lip: float
    affine_residual: float
    violations: List[int] = field(default_factory=list)
    values: Optional[np.ndarray] = field(default=None, repr=False)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "passed": self.passed,
            "target": self.target,
            "max_jump": self.max_jump,
            "bound": self.bound,
            "c_lip": self.c_lip,
            "affine_residual": self.affine_residual,
            "violations": self.violations,
        }


def check_continuity(
    solver: SolverHandle,
    lin: Linearization,
    segment: Tuple[Any, Any],
    lam: float,
    steps: int = 200,
    target: str = "f_lambda",
) -> ContinuityReport:
    """
    Muestrea el segmento w_a -> w_b y compara cada salto entre muestras
    vecinas con C_lip * |w_b - w_a| / steps, donde C_lip es 1.5 veces la
    mayor pendiente direccional en las muestras.

    target="piecewise" aplica el mismo chequeo a f(y(w)) (pendiente cero
    casi en todo punto): es el control que debe detectar los saltos.
    """
    if steps < 100:
        raise InputError("continuity check needs at least 100 steps", steps=steps)
    if target not in ("f_lambda", "piecewise"):
        raise InputError("target must be 'f_lambda' or 'piecewise'", target=target)
    lam = check_lambda(lam)
    w_a = as_weights(segment[0], solver.size, name="w_a")
    w_b = as_weights(segment[1], solver.size, name="w_b")
    direction = w_b - w_a
    length = float(np.linalg.norm(direction))

    ts = np.linspace(0.0, 1.0, steps + 1)
    W = w_a[None, :] + ts[:, None] * direction[None, :]
    values, Y, YL = evaluate_many(solver, lin, W, lam)

    if target == "piecewise":
        values = lin.many(Y)
        slopes = np.zeros(len(ts))
    else:
        unit = direction / length if length > 0 else direction
        slopes = np.abs((YL.astype(np.float64) - Y.astype(np.float64)) @ unit) / lam

    c_lip = 1.5 * float(slopes.max())
    bound = c_lip * length / steps + EQ_TOL
    jumps = np.abs(np.diff(values))
    violations = [int(i) for i in np.flatnonzero(jumps > bound)]

    coeffs = np.polyfit(ts, values, 1)
    residual = float(np.max(np.abs(np.polyval(coeffs, ts) - values)))

    return ContinuityReport(
        passed=not violations,
        target=target,
        max_jump=float(jumps.max()),
        bound=bound,
        c_lip=c_lip,
        affine_residual=residual,
        violations=violations,
        values=values,
    )


@dataclass
class MonotoneReport:
    passed: bool
    lambdas: List[float]
    diff_fractions: List[float]
    violations: List[Tuple[int, float, float]]

    @property
    def fractions_monotone(self) -> bool:
        return all(a <= b for a, b in zip(self.diff_fractions, self.diff_fractions[1:]))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "passed": self.passed,
            "lambdas": self.lambdas,
            "diff_fractions": self.diff_fractions,
            "fractions_monotone": self.fractions_monotone,
            "violations": [list(v) for v in self.violations],
        }


def check_monotone_sets(
    solver: SolverHandle,
    lin: Linearization,
    samples: Any,
    lambdas: Sequence[float],
) -> MonotoneReport:
    """
    W_eq(lambda_2) ⊆ W_eq(lambda_1) para lambda_1 < lambda_2: si w está en
    W_eq para el lambda mayor, tiene que estarlo para el menor. Cada
    violación se reporta como (índice de muestra, lambda_1, lambda_2).
    """
    lambdas = [float(x) for x in lambdas]
    if not lambdas or any(x <= 0 for x in lambdas):
        raise InputError("lambdas must be positive")
    if any(b <= a for a, b in zip(lambdas, lambdas[1:])):
        raise InputError("lambdas must be strictly ascending", lambdas=lambdas)

    W = np.atleast_2d(np.asarray(samples, dtype=np.float64))
    in_eq = []
    piecewise = None
    for lam in lambdas:
        values, Y, _ = evaluate_many(solver, lin, W, lam)
        if piecewise is None:
            piecewise = lin.many(Y)
        in_eq.append(np.abs(values - piecewise) <= EQ_TOL)

    violations = []
    for (l1, eq1), (l2, eq2) in zip(zip(lambdas, in_eq), zip(lambdas[1:], in_eq[1:])):
        for i in np.flatnonzero(eq2 & ~eq1):
            violations.append((int(i), l1, l2))

    fractions = [float(1.0 - eq.mean()) for eq in in_eq]
    if violations:
        logger.warning("W_eq monotonicity violated at %d sample(s)", len(violations))
    return MonotoneReport(passed=not violations, lambdas=lambdas, diff_fractions=fractions, violations=violations)


@dataclass
class GradientReport:
    passed: bool
    gradient: np.ndarray
    finite_difference: np.ndarray
    max_deviation: float
    eps: float
    kink_adjacent: List[int]

    @property
    def flagged(self) -> bool:
        return bool(self.kink_adjacent)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "passed": self.passed,
            "gradient": self.gradient.tolist(),
            "finite_difference": self.finite_difference.tolist(),
            "max_deviation": self.max_deviation,
            "eps": self.eps,
            "kink_adjacent": self.kink_adjacent,
        }


def check_gradient(
    solver: SolverHandle,
    lin: Linearization,
    w: Any,
    lam: float,
    eps: Optional[float] = None,
    tol: float = 1e-6,
) -> GradientReport:
    """
    Compara el backward de la capa con diferencias centrales de f_lambda
    coordenada a coordenada. Las coordenadas cuyo stencil cambia y(w) o
    y_lambda(w) se marcan como vecinas de un quiebre y no cuentan.
    """
    lam = check_lambda(lam)
    w = as_weights(w, solver.size)
    if eps is None:
        eps = 1e-5 * max(float(np.max(np.abs(w))), 1.0)

    _, state = forward(solver, w, lam)
    grad = backward(solver, state, lin.grad)

    n = solver.size
    stencil = np.concatenate([w + eps * np.eye(n), w - eps * np.eye(n)])
    values, Y, YL = evaluate_many(solver, lin, np.vstack([w, stencil]), lam)
    y0, yl0 = Y[0], YL[0]
    plus, minus = values[1:n + 1], values[n + 1:]
    fd = (plus - minus) / (2.0 * eps)

    moved = np.any(Y[1:] != y0, axis=1) | np.any(YL[1:] != yl0, axis=1)
    kinks = sorted({int(i) % n for i in np.flatnonzero(moved)})
    clean = np.setdiff1d(np.arange(n), kinks)
    deviation = float(np.max(np.abs(grad[clean] - fd[clean]))) if clean.size else 0.0

    return GradientReport(
        passed=deviation <= tol,
        gradient=grad,
        finite_difference=fd,
        max_deviation=deviation,
        eps=eps,
        kink_adjacent=kinks,
    )


@dataclass
class SandwichReport:
    passed: bool
    samples: int
    violations: int
    max_excess: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "passed": self.passed,
            "samples": self.samples,
            "violations": self.violations,
            "max_excess": self.max_excess,
        }


def check_sandwich(solver: SolverHandle, lin: Linearization, samples: Any, lambdas: Any) -> SandwichReport:
    """f(y_lambda(w)) <= f_lambda(w) <= f(y(w)), con holgura EQ_TOL."""
    W = np.atleast_2d(np.asarray(samples, dtype=np.float64))
    values, Y, YL = evaluate_many(solver, lin, W, lambdas)
    lower = lin.many(YL) - EQ_TOL
    upper = lin.many(Y) + EQ_TOL
    excess = np.maximum(lower - values, values - upper)
    bad = int(np.count_nonzero(excess > 0))
    return SandwichReport(
        passed=bad == 0,
        samples=int(W.shape[0]),
        violations=bad,
        max_excess=float(max(excess.max(), 0.0)),
    )


# === Desplazamiento de los interpoladores ===


def bound_k(candidates: Iterable[Any], lin: Linearization) -> float:
    """K = max |f(y1) - f(y2)| / |y1 - y2| sobre pares distintos de Y."""
    Y = np.asarray(list(candidates), dtype=np.float64)
    fvals = lin.many(Y)
    best = 0.0
    for a, b in itertools.combinations(range(len(Y)), 2):
        dist = float(np.linalg.norm(Y[a] - Y[b]))
        if dist > 0:
            best = max(best, abs(fvals[a] - fvals[b]) / dist)
    return best


@dataclass
class DisplacementReport:
    passed: bool
    bound_k: float
    lambdas: List[float]
    displacements: List[float]
    ratios: List[float]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "passed": self.passed,
            "bound_k": self.bound_k,
            "lambdas": self.lambdas,
            "displacements": self.displacements,
            "ratios": self.ratios,
        }


def displacement_ratios(problem: LabProblem, lambdas: Sequence[float], steps: int = 20000) -> DisplacementReport:
    """
    Sólo para problemas de una dimensión: mide qué tan lejos del salto de
    y(w) llega la región donde f_lambda interpola (desplazamiento) y lo
    divide por lambda. Cada cociente debe quedar bajo K más un paso de
    grilla.
    """
    if problem.size != 1:
        raise InputError("displacement ratios are only defined for one-dimensional problems", size=problem.size)

    grid = np.linspace(problem.low, problem.high, steps + 1)
    step = float(grid[1] - grid[0])
    K = bound_k(problem.solver.enumerate(), problem.lin)

    displacements, ratios = [], []
    ok = True
    for lam in lambdas:
        lam = check_lambda(lam)
        values, Y, _ = evaluate_many(problem.solver, problem.lin, grid[:, None], lam)
        piecewise = problem.lin.many(Y)
        changes = np.flatnonzero(np.any(Y[1:] != Y[:-1], axis=1))
        jumps = (grid[changes] + grid[changes + 1]) / 2.0
        diff_points = grid[np.abs(values - piecewise) > EQ_TOL]
        if diff_points.size == 0 or jumps.size == 0:
            disp = 0.0
        else:
            disp = float(np.max(np.min(np.abs(diff_points[:, None] - jumps[None, :]), axis=1)))
        ratio = disp / lam
        ok = ok and ratio <= K * (1 + 1e-9) + step / lam
        displacements.append(disp)
        ratios.append(ratio)

    return DisplacementReport(
        passed=ok,
        bound_k=K,
        lambdas=[float(x) for x in lambdas],
        displacements=displacements,
        ratios=ratios,
    )
