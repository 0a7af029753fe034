import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from combigrad.core import CountingSolver, as_weights, backward, forward, is_tie, suggest_lambda
from combigrad.errors import InputError, InstanceError, NoInformativeLambda
from combigrad.solvers import ExplicitSolver, InstanceSpec, build_solver


@pytest.fixture
def two_point():
    return ExplicitSolver([[1, 0], [0, 1]])


def test_tie_goes_to_lexicographically_greatest(two_point):
    assert_array_equal(two_point.solve([1.0, 1.0]).indicator, [1, 0])


def test_forward_returns_minimizer(two_point):
    y, state = forward(two_point, [3.0, 2.0], lam=1.0)
    assert_array_equal(y.indicator, [0, 1])
    assert y.objective == 2.0
    assert state.lam == 1.0


def test_backward_moves_toward_perturbed_solution(two_point):
    _, state = forward(two_point, [1.0, 1.0], lam=1.0)
    assert_allclose(backward(two_point, state, [1.0, -1.0]), [-1.0, 1.0])


def test_backward_small_lambda_scales_gradient(two_point):
    _, state = forward(two_point, [1.0, 1.0], lam=0.1)
    assert_allclose(backward(two_point, state, [0.01, -0.01]), [-10.0, 10.0])


def test_backward_zero_when_perturbation_keeps_solution(two_point):
    _, state = forward(two_point, [1.0, 5.0], lam=1.0)
    assert_allclose(backward(two_point, state, [0.5, -0.5]), [0.0, 0.0])


def test_backward_calls_solver_exactly_once(two_point):
    counting = CountingSolver(two_point)
    _, state = forward(counting, [1.0, 1.0], lam=2.0)
    assert counting.calls == 1
    backward(counting, state, [1.0, -1.0])
    assert counting.calls == 2


@pytest.mark.parametrize("lam", [0.0, -1.0, float("nan"), float("inf")])
def test_forward_rejects_bad_lambda(two_point, lam):
    with pytest.raises(InputError):
        forward(two_point, [1.0, 1.0], lam=lam)


def test_as_weights_validates_length_and_finiteness():
    with pytest.raises(InstanceError):
        as_weights([1.0, 2.0], 3)
    with pytest.raises(InputError):
        as_weights([1.0, np.nan], 2)


def test_backward_rejects_wrong_gradient_length(two_point):
    _, state = forward(two_point, [1.0, 1.0], lam=1.0)
    with pytest.raises(InstanceError):
        backward(two_point, state, [1.0, 1.0, 1.0])


def test_is_tie_is_relative():
    assert is_tie(1e6, 1e6 + 1e-7)
    assert not is_tie(1.0, 1.0 + 1e-9)


def test_suggest_lambda_ratio_of_mean_magnitudes():
    assert suggest_lambda([10.0], [1.0]) == pytest.approx(10.0)
    assert suggest_lambda([5.0, -5.0], [0.25, -0.25]) == pytest.approx(20.0)


def test_suggest_lambda_zero_gradient_is_uninformative():
    with pytest.raises(NoInformativeLambda):
        suggest_lambda([1.0, 2.0], [0.0, 0.0])


FAMILY_SPECS = [("sp", 4), ("tsp", 6), ("pm", 4)]


@pytest.mark.parametrize("family, k", FAMILY_SPECS)
def test_zero_incoming_gradient_gives_zero_gradient(family, k, rng):
    solver = build_solver(InstanceSpec(family=family, k=k))
    for _ in range(5):
        _, state = forward(solver, rng.uniform(1.0, 10.0, solver.size), lam=10.0)
        assert_array_equal(backward(solver, state, np.zeros(solver.size)), np.zeros(solver.size))


@pytest.mark.parametrize("family, k", FAMILY_SPECS)
def test_forward_backward_is_deterministic(family, k, rng):
    solver = build_solver(InstanceSpec(family=family, k=k))
    w = rng.uniform(1.0, 10.0, solver.size)
    g = rng.uniform(-1.0, 1.0, solver.size)
    y1, s1 = forward(solver, w, lam=5.0)
    y2, s2 = forward(solver, w, lam=5.0)
    assert_array_equal(y1.indicator, y2.indicator)
    assert np.array_equal(backward(solver, s1, g), backward(solver, s2, g))
