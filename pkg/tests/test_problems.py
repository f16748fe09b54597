import numpy as np
import pytest

from unigrad.oracles import NoiseSpec
from unigrad.problems import PROBLEM_BUILDERS, make_problem, project_simplex


def test_project_simplex():
    np.testing.assert_allclose(project_simplex([0.5, 0.5]), [0.5, 0.5])
    np.testing.assert_allclose(project_simplex([2.0, 0.0]), [1.0, 0.0])
    x = project_simplex(np.array([0.3, -0.1, 0.9, 0.2]))
    assert x.min() >= 0 and x.sum() == pytest.approx(1.0)
    # projection property: no simplex point is closer to the input
    rng = np.random.default_rng(4)
    v = rng.standard_normal(6)
    proj = project_simplex(v)
    for _ in range(200):
        u = rng.dirichlet(np.ones(6))
        assert np.linalg.norm(v - proj) <= np.linalg.norm(v - u) + 1e-12


@pytest.mark.parametrize("name", sorted(PROBLEM_BUILDERS))
def test_registered_optima_are_first_order_points(name):
    kwargs = {"n": 50} if name == "worstcase" else {}
    prob = make_problem(name, **kwargs)
    x_star = prob.x_star
    assert prob.setup.set.contains(x_star)
    F_star = prob.true_F(x_star)
    assert F_star == pytest.approx(prob.f_star, abs=1e-10)
    # nearby feasible points are no better
    rng = np.random.default_rng(8)
    for _ in range(50):
        pert = 1e-3 * rng.standard_normal(x_star.size)
        u = prob.setup.set.clip(x_star + pert)
        if prob.setup.set.kind == "simplex":
            u = np.maximum(x_star + pert, 0.0)
            u /= u.sum()
        assert prob.true_F(u) >= prob.f_star - 1e-12


def test_make_problem_unknown_name():
    with pytest.raises(KeyError):
        make_problem("nope")


def test_make_problem_noise_wrapping():
    prob = make_problem("quad10", noise=NoiseSpec(delta1_bar=1e-3,
                                                  mode="fixed_direction"))
    assert prob.oracle.delta_u == pytest.approx(1e-3)
    x = np.zeros(10)
    # reference stays noise-free, queried value is perturbed downward
    assert prob.oracle.reference(x) == pytest.approx(0.0)
    assert prob.oracle.query(x, 1e-6).value < 0.0


def test_worstcase_matvec_matches_dense():
    prob = make_problem("worstcase", n=40)
    T = (np.diag(2.0 * np.ones(40)) - np.diag(np.ones(39), 1)
         - np.diag(np.ones(39), -1))
    rng = np.random.default_rng(1)
    x = rng.standard_normal(40)
    e1 = np.zeros(40)
    e1[0] = 1.0
    reply = prob.oracle.query(x, 1e-9)
    np.testing.assert_allclose(reply.subgrad, T @ x - e1, atol=1e-12)
    assert reply.value == pytest.approx(0.5 * x @ T @ x - x[0])
