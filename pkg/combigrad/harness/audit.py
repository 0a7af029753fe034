"""
Auditoría de etiquetas de un dataset.

El reporte sigue el layout de los chequeos de consistencia:
{"status": "ok"|"issues_found", "checks": {nombre: {"status", "count", "sample"}}}.
"""
import itertools
import logging
from typing import Any, Dict, List, Optional

import numpy as np

from combigrad import settings
from combigrad.core import SolverHandle, is_tie
from combigrad.errors import CapacityError
from combigrad.harness.datasets import SyntheticDataset
from combigrad.solvers import InstanceSpec, brute_force_oracle, build_solver

logger = logging.getLogger(__name__)

# Tolerancia absoluta al comparar costos de etiquetas
COST_TOL = 1e-9


def _check(issues: List[Dict[str, Any]], limit: int) -> Dict[str, Any]:
    return {
        "status": "ok" if not issues else "issues",
        "count": len(issues),
        "sample": issues[:limit],
    }


def _same_cost(a: float, b: float) -> bool:
    return abs(a - b) <= COST_TOL or is_tie(a, b)


def _oracle_candidates(solver: SolverHandle, budget: int) -> Optional[np.ndarray]:
    """Y enumerado completo, o None si el solver no enumera o supera el presupuesto."""
    try:
        rows = list(itertools.islice(solver.enumerate(), budget + 1))
    except (CapacityError, NotImplementedError):
        return None
    if len(rows) > budget:
        return None
    return np.asarray(rows, dtype=np.int8)


def audit_labels(
    dataset: SyntheticDataset,
    budget: Optional[int] = None,
    limit_issues: int = 50,
    solver: Optional[SolverHandle] = None,
) -> Dict[str, Any]:
    """
    Chequea cada etiqueta contra sus pesos verdaderos:

    1) label_feasible: la etiqueta pertenece a Y.
    2) label_optimal_solver: su costo iguala el del solver exacto.
    3) label_optimal_oracle: su costo iguala el de la fuerza bruta
       (status "skipped" si Y no es enumerable dentro del presupuesto).
    """
    budget = settings.ORACLE_BUDGET if budget is None else int(budget)
    if solver is None:
        connectivity = dataset.meta.get("connectivity", 8)
        solver = build_solver(InstanceSpec(family=dataset.family, k=dataset.k, connectivity=connectivity))

    infeasible, solver_mismatch, oracle_mismatch = [], [], []
    candidates = _oracle_candidates(solver, budget)

    for i, ex in enumerate(dataset):
        label_cost = float(np.dot(ex.true_weights, ex.label))
        if not solver.feasible(ex.label):
            infeasible.append({"example": i})
            continue
        best = solver.solve(ex.true_weights).objective
        if not _same_cost(label_cost, best):
            solver_mismatch.append({"example": i, "label_cost": label_cost, "solver_cost": best})
        if candidates is not None:
            oracle = brute_force_oracle(candidates, ex.true_weights, budget=budget).objective
            if not _same_cost(label_cost, oracle):
                oracle_mismatch.append({"example": i, "label_cost": label_cost, "oracle_cost": oracle})

    checks = {
        "label_feasible": _check(infeasible, limit_issues),
        "label_optimal_solver": _check(solver_mismatch, limit_issues),
    }
    if candidates is None:
        checks["label_optimal_oracle"] = {"status": "skipped", "count": 0, "sample": []}
    else:
        checks["label_optimal_oracle"] = _check(oracle_mismatch, limit_issues)

    status = "ok"
    if any(c["status"] == "issues" for c in checks.values()):
        status = "issues_found"
        logger.warning(
            "label audit found issues in %s(k=%d): %s",
            dataset.family,
            dataset.k,
            {name: c["count"] for name, c in checks.items()},
        )

    return {
        "status": status,
        "family": dataset.family,
        "k": dataset.k,
        "size": len(dataset),
        "limit_issues": limit_issues,
        "checks": checks,
    }
