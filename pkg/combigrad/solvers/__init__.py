"""
Solvers del repo y registro por familia.

Una instancia se describe con el JSON {"family": "sp"|"tsp"|"pm", "k": int,
"connectivity": 4|8}; `build_solver` arma el handle correspondiente.
"""
from typing import Literal

from pydantic import BaseModel, Field

from combigrad.core import SolverHandle
from combigrad.solvers.explicit import ExplicitSolver, brute_force_oracle
from combigrad.solvers.grid import GridGraph, GridShortestPath, dijkstra_grid
from combigrad.solvers.matching import MatchingInstance, PerfectMatching, matching_exact
from combigrad.solvers.tsp import TravelingSalesman, TspInstance, tsp_approx, tsp_exact

FAMILIES = ("sp", "tsp", "pm")


class InstanceSpec(BaseModel):
    family: Literal["sp", "tsp", "pm"]
    k: int = Field(..., ge=2)
    connectivity: Literal[4, 8] = 8


def build_solver(spec: InstanceSpec, approximate: bool = False, weight_floor: float = 1e-3) -> SolverHandle:
    """`approximate` sólo aplica a TSP (vecino más cercano + 2-opt)."""
    if spec.family == "sp":
        return GridShortestPath(GridGraph(spec.k, spec.connectivity), weight_floor=weight_floor)
    if spec.family == "tsp":
        return TravelingSalesman(TspInstance(spec.k), approximate=approximate)
    return PerfectMatching(MatchingInstance(spec.k))


__all__ = [
    "FAMILIES",
    "ExplicitSolver",
    "GridGraph",
    "GridShortestPath",
    "InstanceSpec",
    "MatchingInstance",
    "PerfectMatching",
    "TravelingSalesman",
    "TspInstance",
    "brute_force_oracle",
    "build_solver",
    "dijkstra_grid",
    "matching_exact",
    "tsp_approx",
    "tsp_exact",
]
