import math

import numpy as np
import pytest

from unigrad.core import SolverConfig
from unigrad.oracles import NoiseSpec, hoelder_constant
from unigrad.policy import PowerPolicy
from unigrad.problems import make_problem
from unigrad.solver import (
    ErrorBudget,
    accept_test,
    corollary1_bound,
    dual_stop,
    initialize,
    oracle_call_identity,
    run,
    step,
    theorem1_check,
    trace_from_csv,
    trace_to_csv,
)


def test_initialize_quad1d_closed_form():
    # f(t) = t^2/2 centered at 3: the first envelope test already passes at
    # the initial smoothness guess, giving unit weights and companion 0
    prob = make_problem("quad1d")
    state = initialize(prob, SolverConfig(epsilon=1e-3, L0=1.0))
    assert state.L == pytest.approx(1.0)
    assert state.A == state.B == pytest.approx(1.0)
    np.testing.assert_allclose(state.x, [3.0])
    np.testing.assert_allclose(state.y, [0.0], atol=1e-12)
    # the dual-averaging iterate starts at the companion point
    np.testing.assert_allclose(state.z, state.y)
    assert state.k == 0 and len(state.trace) == 1


def test_error_budget_formula():
    b = ErrorBudget(sum_B=3.0, delta_u=0.1, delta_pu=0.01, A=2.0,
                    epsilon=1e-2, k=4)
    assert b.E == pytest.approx(2 * 3.0 * 0.1 + 9 * 0.01 + 2.0 * 0.5e-2)


def test_accept_test_envelope():
    x = np.array([0.0])
    w = np.array([1.0])
    g = np.array([0.0])
    # f_w on the quadratic envelope boundary passes; above it fails
    assert accept_test(0.5, 0.0, g, w, x, scaled_L=1.0, delta_c=0.0, delta_u=0.0)
    assert not accept_test(0.51, 0.0, g, w, x, scaled_L=1.0,
                           delta_c=0.0, delta_u=0.0)
    assert accept_test(0.7, 0.0, g, w, x, scaled_L=1.0, delta_c=0.1, delta_u=0.0)


@pytest.mark.parametrize("name", ["quad10", "l1quad", "simplex_quad"])
@pytest.mark.parametrize("p", [1.0, 2.0])
def test_decrease_invariant_every_step(name, p):
    prob = make_problem(name)
    cfg = SolverConfig(epsilon=1e-4, L0=1.0, p=p, max_outer=60)
    state = initialize(prob, cfg)
    A_prev = state.A
    for _ in range(60):
        rec = step(state)
        chk = theorem1_check(state)
        assert chk["ok"], (name, p, rec.k, chk)
        assert state.A > A_prev
        assert state.B <= state.A + 1e-12 * max(1.0, state.A)
        A_prev = state.A
    assert oracle_call_identity(state.trace)


def test_smoothness_estimate_respects_envelope_constant():
    prob = make_problem("power05")
    info = prob.oracle.smoothness
    cfg = SolverConfig(epsilon=1e-4, L0=1.0, p=2.0, max_outer=80)
    state = initialize(prob, cfg)
    for _ in range(80):
        rec = step(state)
        assert state.L <= 2.0 * hoelder_constant(rec.delta_c, info)


def test_run_reaches_target_gap():
    prob = make_problem("quad10")
    cfg = SolverConfig(epsilon=1e-3, L0=1.0, p=2.0, max_outer=2000)
    d_star = prob.setup.d(prob.x_star)
    res = run(prob, cfg, d_bound=d_star)
    assert res.stopped_by == "bound_certificate"
    gap = prob.true_F(res.solution) - prob.f_star
    assert gap <= res.bound + 1e-15
    assert gap <= cfg.epsilon


def test_dual_stop_certifies_gap():
    prob = make_problem("quad10")
    D = prob.setup.d(prob.x_star)
    cfg = SolverConfig(epsilon=1e-3, L0=1.0, p=2.0, max_outer=5000, D=D)
    res = run(prob, cfg)
    assert res.stopped_by == "dual_stop"
    assert dual_stop(res.state, D)
    gap = prob.true_F(res.solution) - prob.f_star
    assert gap <= cfg.epsilon
    # the rule must fire no later than A_k >= 2 D / epsilon
    assert res.state.A <= 2.0 * D / cfg.epsilon * (1 + 1e-9)


def test_stop_at_A_threshold():
    prob = make_problem("quad10")
    cfg = SolverConfig(epsilon=1e-4, L0=1.0, p=2.0, max_outer=5000)
    res = run(prob, cfg, stop_at_A=50.0)
    assert res.stopped_by == "A_threshold"
    assert res.state.A >= 50.0


def test_corollary_bound_reduces_without_noise():
    prob = make_problem("quad10")
    cfg = SolverConfig(epsilon=1e-4, L0=1.0, p=2.0, max_outer=50)
    res = run(prob, cfg)
    d_star = prob.setup.d(prob.x_star)
    expected = d_star / res.state.A + cfg.epsilon / 2.0
    assert corollary1_bound(res.state, d_star) == pytest.approx(expected)


def test_noisy_run_keeps_invariant_and_bound():
    noise = NoiseSpec(delta1_bar=1e-4, delta2_bar=1e-4, diameter=8.0,
                      mode="adversarial_sign")
    prob = make_problem("quad10", noise=noise)
    cfg = SolverConfig(epsilon=1e-4, L0=1.0, p=2.0, max_outer=150)
    state = initialize(prob, cfg)
    for _ in range(150):
        step(state)
        assert theorem1_check(state)["ok"]
    d_star = prob.setup.d(prob.x_star)
    gap = prob.true_F(state.y) - prob.f_star
    assert gap <= corollary1_bound(state, d_star) + 1e-12


def test_uncontrolled_prox_error_run():
    prob = make_problem("quad10")
    cfg = SolverConfig(epsilon=1e-4, L0=1.0, p=2.0, max_outer=100,
                       delta_pu=1e-6)
    state = initialize(prob, cfg)
    for _ in range(100):
        step(state)
        assert theorem1_check(state)["ok"]
    d_star = prob.setup.d(prob.x_star)
    gap = prob.true_F(state.y) - prob.f_star
    assert gap <= corollary1_bound(state, d_star) + 1e-12


def test_oracle_call_identity_detects_mismatch():
    prob = make_problem("quad1d")
    cfg = SolverConfig(epsilon=1e-4, L0=1.0, p=2.0, max_outer=20)
    res = run(prob, cfg)
    assert oracle_call_identity(res.trace)
    res.trace[-1].oracle_calls_cum += 2
    assert not oracle_call_identity(res.trace)


def test_trace_csv_roundtrip_and_determinism(tmp_path):
    prob = make_problem("l1quad")
    cfg = SolverConfig(epsilon=1e-5, L0=1.0, p=1.5, max_outer=40)
    res = run(prob, cfg)
    path_a = tmp_path / "a.csv"
    path_b = tmp_path / "b.csv"
    trace_to_csv(res.trace, path_a)
    back = trace_from_csv(path_a)
    assert len(back) == len(res.trace)
    for rec, orig in zip(back, res.trace):
        assert rec.k == orig.k
        assert rec.L == orig.L  # .17g round-trips doubles exactly
        assert rec.A == orig.A
        assert rec.oracle_calls_cum == orig.oracle_calls_cum
    # reruns are byte-identical: no hidden randomness anywhere
    res2 = run(make_problem("l1quad"), cfg)
    trace_to_csv(res2.trace, path_b)
    assert path_a.read_bytes() == path_b.read_bytes()


def test_max_outer_stop_reason():
    prob = make_problem("quad10")
    cfg = SolverConfig(epsilon=1e-10, L0=1.0, p=1.0, max_outer=5)
    res = run(prob, cfg)
    assert res.stopped_by == "max_outer"
    assert res.state.k == 5
