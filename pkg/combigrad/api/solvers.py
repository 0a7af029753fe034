from typing import List

from fastapi import APIRouter
from pydantic import BaseModel, ConfigDict, Field

from combigrad.core import backward, forward, suggest_lambda
from combigrad.errors import CombigradError
from combigrad.solvers import InstanceSpec, build_solver
from combigrad.api.common import as_http

router = APIRouter(prefix="/solvers", tags=["solvers"])


# =========================
# Pydantic models
# =========================

class SolveRequest(BaseModel):
    instance: InstanceSpec
    weights: List[float]
    approximate: bool = False


class BackwardRequest(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    instance: InstanceSpec
    w_hat: List[float]
    grad_y: List[float]
    lam: float = Field(..., alias="lambda")
    approximate: bool = False


class SuggestLambdaRequest(BaseModel):
    w_sample: List[float]
    grad_sample: List[float]


# =========================
# Endpoints
# =========================

@router.post("/solve")
def solve(payload: SolveRequest):
    """
    Resuelve argmin w . phi(y) para la instancia dada.
    """
    try:
        solver = build_solver(payload.instance, approximate=payload.approximate)
        solution = solver.solve(payload.weights)
    except CombigradError as e:
        raise as_http(e)
    return {"solver": solver.describe(), **solution.to_dict()}


@router.post("/backward")
def solve_backward(payload: BackwardRequest):
    """
    Forward en w_hat y gradiente de f_lambda para el gradiente de entrada
    dL/dy (una llamada extra al solver).
    """
    try:
        solver = build_solver(payload.instance, approximate=payload.approximate)
        y_hat, state = forward(solver, payload.w_hat, payload.lam)
        grad = backward(solver, state, payload.grad_y)
    except CombigradError as e:
        raise as_http(e)
    return {
        "y_hat": y_hat.to_dict(),
        "lambda": state.lam,
        "gradient": grad.tolist(),
    }


@router.post("/suggest-lambda")
def suggest(payload: SuggestLambdaRequest):
    """
    Heurística lambda ~ <|w|> / <|dL/dy|>.
    """
    try:
        lam = suggest_lambda(payload.w_sample, payload.grad_sample)
    except CombigradError as e:
        raise as_http(e)
    return {"lambda": lam}
