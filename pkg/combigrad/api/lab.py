from typing import Optional

import numpy as np
from fastapi import APIRouter, Query

from combigrad.errors import CombigradError
from combigrad.lab import random_problem, render_landscape, toy_three_region
from combigrad.api.common import as_http, csv_attachment

router = APIRouter(prefix="/lab", tags=["lab"])


@router.get("/landscape")
def landscape(
    problem: str = Query(
        "toy", pattern="^(toy|sp|tsp|pm)$", description="toy (tres regiones) o una familia"
    ),
    k: Optional[int] = Query(None, ge=2, description="Tamaño de la instancia (familias)"),
    lam: float = Query(10.0, alias="lambda", gt=0),
    res: int = Query(64, ge=2),
    seed: int = Query(0),
    format: str = Query(
        "json", pattern="^(json|csv)$", description="Formato de salida: json o csv"
    ),
):
    """
    Paisaje de f_lambda sobre un corte 2D.

    - problem=toy usa el ejemplo de tres regiones con sus ejes fijos.
    - Las familias usan una instancia aleatoria (seed) y un corte aleatorio
      dentro de su caja de pesos.
    """
    try:
        if problem == "toy":
            prob = toy_three_region()
        else:
            prob = random_problem(problem, k if k is not None else 4, lam=lam, seed=seed)
        slice_axes = prob.default_slice(np.random.default_rng(seed))
        grid = render_landscape(prob.solver, prob.lin, slice_axes, lam, res, extent=prob.extent)
    except CombigradError as e:
        raise as_http(e)

    if format == "csv":
        return csv_attachment(grid.to_csv(), f"landscape_{prob.name}_lambda{lam:g}.csv")

    return {"problem": prob.name, **grid.to_dict()}
