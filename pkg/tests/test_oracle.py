"""Solvers exactos contra fuerza bruta sobre instancias aleatorias chicas."""
import numpy as np
import pytest

from combigrad.solvers import GridGraph, GridShortestPath, MatchingInstance, PerfectMatching, TravelingSalesman, TspInstance, brute_force_oracle

N_INSTANCES = 200


@pytest.mark.parametrize(
    "solver, low, high",
    [
        (GridShortestPath(GridGraph(3, 8)), 0.1, 10.0),
        (GridShortestPath(GridGraph(4, 4)), 0.1, 10.0),
        (TravelingSalesman(TspInstance(5)), 0.0, 10.0),
        (PerfectMatching(MatchingInstance(4)), 0.0, 100.0),
    ],
    ids=["sp3-8", "sp4-4", "tsp5", "pm4"],
)
def test_exact_objective_equals_oracle(solver, low, high):
    rng = np.random.default_rng(7)
    candidates = np.array(list(solver.enumerate()), dtype=np.int8)
    for _ in range(N_INSTANCES):
        w = rng.uniform(low, high, solver.size)
        got = solver.solve(w)
        assert solver.feasible(got.indicator)
        assert got.objective == pytest.approx(brute_force_oracle(candidates, w).objective, abs=1e-9)
