import math

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from combigrad.errors import CapacityError, InputError, InstanceError
from combigrad.solvers import (
    ExplicitSolver,
    GridGraph,
    GridShortestPath,
    InstanceSpec,
    MatchingInstance,
    PerfectMatching,
    TravelingSalesman,
    TspInstance,
    brute_force_oracle,
    build_solver,
    dijkstra_grid,
    matching_exact,
    tsp_approx,
    tsp_exact,
)

SQRT2 = math.sqrt(2.0)


# =========================
# Camino mínimo
# =========================

def test_dijkstra_2x2_four_connected_detours_around_expensive_tile():
    sol = dijkstra_grid(GridGraph(2, 4), [1.0, 100.0, 1.0, 1.0])
    assert_array_equal(sol.indicator, [1, 0, 1, 1])
    assert sol.objective == pytest.approx(3.0)


def test_dijkstra_2x2_eight_connected_takes_diagonal():
    sol = dijkstra_grid(GridGraph(2, 8), [1.0, 100.0, 1.0, 1.0])
    assert_array_equal(sol.indicator, [1, 0, 0, 1])


def test_dijkstra_3x3_follows_cheap_corridor():
    sol = dijkstra_grid(GridGraph(3, 4), [1, 9, 9, 1, 9, 9, 1, 1, 1])
    assert_array_equal(np.flatnonzero(sol.indicator), [0, 3, 6, 7, 8])
    assert sol.objective == pytest.approx(5.0)


def test_dijkstra_rejects_non_positive_costs():
    with pytest.raises(InputError):
        dijkstra_grid(GridGraph(2, 4), [1.0, 0.0, 1.0, 1.0])


def test_grid_graph_validation():
    with pytest.raises(InstanceError):
        GridGraph(1)
    with pytest.raises(InstanceError):
        GridGraph(3, connectivity=6)


def test_shortest_path_projection_floors_weights():
    solver = GridShortestPath(GridGraph(2, 4), weight_floor=1e-3)
    assert_allclose(solver.project(np.array([-5.0, 0.0, 2.0, 1e-6])), [1e-3, 1e-3, 2.0, 1e-3])


def test_shortest_path_feasibility():
    solver = GridShortestPath(GridGraph(3, 4))
    assert solver.feasible([1, 0, 0, 1, 0, 0, 1, 1, 1])
    assert not solver.feasible([1, 0, 0, 0, 0, 0, 0, 0, 1])  # desconectado
    assert not solver.feasible([1, 1, 0, 1, 1, 0, 1, 1, 1])  # no inducido
    assert not solver.feasible([0, 0, 0, 1, 0, 0, 1, 1, 1])  # sin fuente


def test_shortest_path_enumeration_small_grids():
    four = [tuple(y) for y in GridShortestPath(GridGraph(2, 4)).enumerate()]
    assert sorted(four) == [(1, 0, 1, 1), (1, 1, 0, 1)]
    eight = [tuple(y) for y in GridShortestPath(GridGraph(2, 8)).enumerate()]
    assert eight == [(1, 0, 0, 1)]


def test_shortest_path_enumeration_guard_raises_at_call():
    with pytest.raises(CapacityError):
        GridShortestPath(GridGraph(5, 4)).enumerate()


def test_dijkstra_labels_are_feasible(rng):
    solver = GridShortestPath(GridGraph(6, 8))
    for _ in range(20):
        assert solver.feasible(solver.solve(rng.uniform(0.5, 10.0, 36)).indicator)


# =========================
# TSP
# =========================

UNIT_SQUARE = [1.0, SQRT2, 1.0, 1.0, SQRT2, 1.0]


def test_tsp_unit_square_exact_and_approx():
    inst = TspInstance(4)
    for solve in (tsp_exact, tsp_approx):
        sol = solve(inst, UNIT_SQUARE)
        assert_array_equal(sol.indicator, [1, 0, 1, 1, 0, 1])
        assert sol.objective == pytest.approx(4.0)


def test_tsp_triangle_is_unique_tour():
    sol = tsp_exact(TspInstance(3), [3.0, 1.0, 2.0])
    assert_array_equal(sol.indicator, [1, 1, 1])


def test_tsp_edge_layout_and_tour_roundtrip():
    inst = TspInstance(4)
    assert inst.edges == [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
    assert inst.index(3, 1) == 4
    assert inst.indicator_to_tour([1, 0, 1, 1, 0, 1]) == [0, 1, 2, 3]


def test_tsp_subtours_are_not_tours():
    inst = TspInstance(6)
    ind = inst.tour_to_indicator([0, 1, 2]) | inst.tour_to_indicator([3, 4, 5])
    assert not inst.is_tour(ind)
    assert inst.is_tour(inst.tour_to_indicator([0, 2, 4, 1, 3, 5]))


def test_tsp_exact_matches_brute_force(rng):
    for k in (4, 5, 6):
        solver = TravelingSalesman(TspInstance(k))
        candidates = list(solver.enumerate())
        for _ in range(10):
            pts = rng.uniform(0, 1, size=(k, 2))
            dist = solver.instance.chord_distances(pts)
            assert solver.solve(dist).objective == pytest.approx(
                brute_force_oracle(candidates, dist).objective, abs=1e-9
            )


def test_tsp_approx_is_never_better_than_exact(rng):
    inst = TspInstance(8)
    for _ in range(10):
        dist = inst.chord_distances(rng.uniform(0, 1, size=(8, 2)))
        approx = tsp_approx(inst, dist)
        assert inst.is_tour(approx.indicator)
        assert approx.objective >= tsp_exact(inst, dist).objective - 1e-9


def test_tsp_approx_equality_rate_k7(rng, record_property):
    inst = TspInstance(7)
    same = 0
    for _ in range(30):
        dist = inst.chord_distances(rng.uniform(0, 1, size=(7, 2)))
        approx, exact = tsp_approx(inst, dist), tsp_exact(inst, dist)
        assert approx.objective >= exact.objective - 1e-9
        same += bool(np.array_equal(approx.indicator, exact.indicator))
    record_property("tsp7_approx_equals_exact", same / 30)


def test_tsp_enumeration_counts_and_guard():
    assert len(list(TravelingSalesman(TspInstance(5)).enumerate())) == 12
    with pytest.raises(CapacityError):
        TravelingSalesman(TspInstance(10)).enumerate()


def test_tsp_exact_guard():
    with pytest.raises(CapacityError):
        tsp_exact(TspInstance(21), np.ones(210))
    with pytest.raises(CapacityError):
        TravelingSalesman(TspInstance(21))
    assert not TravelingSalesman(TspInstance(21), approximate=True).exact


def test_tsp_needs_three_cities():
    with pytest.raises(InstanceError):
        TspInstance(2)


# =========================
# Matching
# =========================

def test_matching_2x2_prefers_cheap_horizontals():
    sol = matching_exact(MatchingInstance(2), [1.0, 1.0, 5.0, 5.0])
    assert_array_equal(sol.indicator, [1, 1, 0, 0])
    assert sol.objective == pytest.approx(2.0)


def test_matching_digit_grid_cost_348():
    inst = MatchingInstance(4)
    digits = [[2, 6, 4, 3], [7, 7, 5, 3], [7, 4, 6, 4], [8, 1, 2, 0]]
    sol = matching_exact(inst, inst.edge_costs_from_digits(digits))
    assert sol.objective == pytest.approx(348.0)
    assert_array_equal(np.flatnonzero(sol.indicator), [7, 10, 12, 13, 14, 15, 20, 23])


def test_matching_two_digit_reading():
    inst = MatchingInstance(2)
    costs = inst.edge_costs_from_digits([4, 0, 6, 0])
    assert costs[inst.v_index(0, 0)] == 46.0
    assert_array_equal(inst.edge_costs_from_digits(np.zeros(4)), np.zeros(4))


def test_matching_ties_match_oracle_rule():
    solver = PerfectMatching(MatchingInstance(4))
    zeros = np.zeros(solver.size)
    oracle = brute_force_oracle(solver.enumerate(), zeros)
    assert_array_equal(solver.solve(zeros).indicator, oracle.indicator)


def test_matching_exact_matches_brute_force(rng):
    solver = PerfectMatching(MatchingInstance(4))
    candidates = list(solver.enumerate())
    assert len(candidates) == 36
    for _ in range(20):
        w = rng.integers(0, 100, solver.size).astype(float)
        sol = solver.solve(w)
        assert solver.feasible(sol.indicator)
        assert sol.objective == brute_force_oracle(candidates, w).objective


def test_matching_odd_side_rejected():
    with pytest.raises(InstanceError):
        MatchingInstance(3)


def test_matching_guards():
    with pytest.raises(CapacityError):
        PerfectMatching(MatchingInstance(10))
    with pytest.raises(CapacityError):
        PerfectMatching(MatchingInstance(8)).enumerate()


# =========================
# Explícito y registro
# =========================

def test_explicit_solver_vectorised_matches_single(rng):
    solver = ExplicitSolver([[1, 0], [0, 1], [0, 0]])
    W = rng.uniform(-1, 1, size=(50, 2))
    W[0] = [0.0, 0.0]
    many = solver.solve_many(W)
    for row, y in zip(W, many):
        assert_array_equal(solver.solve(row).indicator, y)
    assert_array_equal(many[0], [1, 0])


def test_oracle_budget_and_empty_set():
    with pytest.raises(CapacityError):
        brute_force_oracle([[1, 0], [0, 1], [1, 1]], [1.0, 1.0], budget=2)
    with pytest.raises(InstanceError):
        brute_force_oracle([], [1.0])


def test_build_solver_from_instance_spec():
    assert isinstance(build_solver(InstanceSpec(family="sp", k=3)), GridShortestPath)
    tsp = build_solver(InstanceSpec(family="tsp", k=5), approximate=True)
    assert isinstance(tsp, TravelingSalesman) and not tsp.exact
    assert build_solver(InstanceSpec(family="pm", k=4)).size == 24


@pytest.mark.parametrize("family, k", [("tsp", 6), ("pm", 4)])
def test_constant_shift_keeps_solution(family, k, rng):
    # todo tour tiene k aristas y todo matching k*k/2: el corrimiento suma lo mismo a cada candidato
    solver = build_solver(InstanceSpec(family=family, k=k))
    for _ in range(10):
        w = rng.uniform(1.0, 10.0, solver.size)
        assert_array_equal(solver.solve(w + 3.7).indicator, solver.solve(w).indicator)
