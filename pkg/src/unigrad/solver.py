"""Adaptive intermediate gradient solver with inexact oracle and prox.

Each outer iteration runs a doubling line search over trial coefficients
(alpha, B): it forms the extrapolation point, queries the oracle there,
takes an (inexact) prox step against the accumulated linear model, and
accepts once the candidate satisfies a quadratic-envelope decrease test at
the current smoothness estimate.  The per-query accuracies are tied to the
target accuracy epsilon:

    delta_c  = (alpha / B) * epsilon / 8      (oracle)
    delta_pc = alpha * epsilon / 8            (prox)

Acceptance halves the smoothness estimate when the very first trial passes,
which is what lets the method adapt to unknown Hölder smoothness.

The accumulated lower model

    Psi_k(x) = d(x) + sum_j alpha_j [f~_j + <g~_j, x - x_j> + h(x)]

is tracked explicitly; its exact minimum certifies the decrease guarantee

    A_k F(y_k) - E_k <= min Psi_k,
    E_k = 2 (sum_i B_i) delta_u + (2k+1) delta_pu + A_k epsilon / 2,

which downstream code checks at every iteration and uses for the
computable stopping rule.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .core import (
    InitializationDivergenceError,
    LineSearchDivergenceError,
    Point,
    Problem,
    SolverConfig,
    dual_pairing,
)
from .policy import PolicyState, PowerPolicy, check_feasible
from .prox import ProxModel, exact_prox_minimizer, solve_prox

__all__ = [
    "ModelState",
    "ErrorBudget",
    "TraceRecord",
    "RunState",
    "RunResult",
    "initialize",
    "step",
    "run",
    "accept_test",
    "dual_stop",
    "theorem1_check",
    "oracle_call_identity",
    "trace_to_csv",
    "trace_from_csv",
    "TRACE_COLUMNS",
]

ACCEPT_TOL = 1e-12


@dataclass(frozen=True)
class ModelState:
    """Accumulated lower model: linear term, scalar offset, weight sum A."""

    linear: np.ndarray
    scalar: float
    A: float
    history_len: int = 0

    def with_term(self, alpha: float, f_val: float, g: np.ndarray,
                  x: Point) -> "ModelState":
        return ModelState(
            linear=self.linear + alpha * g,
            scalar=self.scalar + alpha * (f_val - dual_pairing(g, x)),
            A=self.A + alpha,
            history_len=self.history_len + 1,
        )

    def prox_model(self) -> ProxModel:
        return ProxModel(linear=self.linear, composite_weight=self.A,
                         constant=self.scalar)


@dataclass(frozen=True)
class ErrorBudget:
    """Total inexactness absorbed up to iterate k."""

    sum_B: float
    delta_u: float
    delta_pu: float
    A: float
    epsilon: float
    k: int

    @property
    def E(self) -> float:
        return (2.0 * self.sum_B * self.delta_u
                + (2 * self.k + 1) * self.delta_pu
                + self.A * self.epsilon / 2.0)


@dataclass
class TraceRecord:
    k: int
    inner_trials: int
    L: float
    A: float
    B: float
    F_y: Optional[float]
    psi_star: Optional[float]
    E: float
    oracle_calls_cum: int
    delta_c: float


TRACE_COLUMNS = ["k", "inner_trials", "L_k", "A_k", "B_k", "F_y",
                 "psi_star", "E_k", "oracle_calls_cum", "delta_c_k"]


@dataclass
class RunState:
    problem: Problem
    config: SolverConfig
    policy: PowerPolicy
    x: Point
    y: Point
    z: Point
    L: float
    A: float
    B: float
    k: int
    model: ModelState
    sum_B: float
    oracle_calls: int
    init_oracle_calls: int
    trace: list = field(default_factory=list)


@dataclass
class RunResult:
    solution: Point
    trace: list
    bound: float
    stopped_by: str
    state: RunState


def _true_or_reported_F(problem: Problem, y: Point, delta_c: float):
    F = problem.true_F(y)
    if F is not None:
        return F
    reply = problem.oracle.query(y, delta_c)
    return reply.value + problem.composite_value(y)


def psi_star_exact(problem: Problem, model: ModelState) -> float:
    """Exact minimum of the accumulated model over the feasible set."""
    return exact_prox_minimizer(problem.setup, model.prox_model()).objective_value


def _append_record(state: RunState, inner_trials: int, delta_c: float):
    cfg = state.config
    budget = ErrorBudget(state.sum_B, state.problem.oracle.delta_u,
                         cfg.delta_pu, state.A, cfg.epsilon, state.k)
    record = TraceRecord(
        k=state.k,
        inner_trials=inner_trials,
        L=state.L,
        A=state.A,
        B=state.B,
        F_y=_true_or_reported_F(state.problem, state.y, delta_c),
        psi_star=psi_star_exact(state.problem, state.model),
        E=budget.E,
        oracle_calls_cum=state.oracle_calls,
        delta_c=delta_c,
    )
    state.trace.append(record)
    return record


def initialize(problem: Problem, config: SolverConfig,
               policy: Optional[PowerPolicy] = None) -> RunState:
    """Line-search the starting smoothness estimate and seed the model.

    The starting point is the (inexact) minimizer of d; the companion point
    is the prox step against the first linearization with weight
    1 / (2^{i0} L).  The smallest i0 whose quadratic envelope holds with
    slack epsilon/8 + delta_u is accepted, after which the running
    smoothness constant is 2^{i0} L.
    """
    policy = policy or PowerPolicy(config.p)
    setup = problem.setup
    oracle = problem.oracle
    eps = config.epsilon
    L_guess = config.L0

    zero_model = ModelState(np.zeros(setup.set.dim), 0.0, 0.0)
    x0 = solve_prox(setup, zero_model.prox_model(),
                    delta_pc=eps / (4.0 * L_guess),
                    delta_pu_injection=config.delta_pu).point
    reply0 = oracle.query(x0, eps / 4.0)
    calls = 1

    for i0 in range(config.max_inner + 1):
        scale = math.ldexp(L_guess, i0)  # 2^{i0} * L
        alpha0 = 1.0 / scale
        model0 = zero_model.with_term(alpha0, reply0.value, reply0.subgrad, x0)
        y0 = solve_prox(setup, model0.prox_model(),
                        delta_pc=alpha0 * eps / 4.0,
                        delta_pu_injection=config.delta_pu).point
        f_y0 = oracle.query(y0, eps / 4.0).value
        calls += 1
        diff = y0 - x0
        rhs = (reply0.value + dual_pairing(reply0.subgrad, diff)
               + 0.5 * scale * float(diff @ diff)
               + eps / 8.0 + oracle.delta_u)
        if f_y0 <= rhs + ACCEPT_TOL * (1.0 + abs(rhs)):
            # z must start at the (inexact) minimizer of the seeded model,
            # which is the companion point, or the decrease guarantee breaks
            # on the very first outer iteration.
            state = RunState(
                problem=problem, config=config, policy=policy,
                x=x0.copy(), y=y0, z=y0.copy(),
                L=scale, A=alpha0, B=alpha0, k=0,
                model=model0, sum_B=alpha0,
                oracle_calls=0, init_oracle_calls=calls,
            )
            _append_record(state, inner_trials=i0 + 1, delta_c=eps / 4.0)
            return state
    raise InitializationDivergenceError(
        f"initialization line search failed after {config.max_inner} trials")


def accept_test(f_w: float, f_x: float, g_x: np.ndarray, w: Point, x: Point,
                scaled_L: float, delta_c: float, delta_u: float) -> bool:
    """Quadratic-envelope decrease test at smoothness estimate scaled_L."""
    diff = w - x
    rhs = (f_x + dual_pairing(g_x, diff) + 0.5 * scaled_L * float(diff @ diff)
           + 2.0 * delta_c + 2.0 * delta_u)
    return f_w <= rhs + ACCEPT_TOL * (1.0 + abs(rhs))


def step(state: RunState) -> TraceRecord:
    """One outer iteration: line search, commit, trace."""
    problem, cfg = state.problem, state.config
    setup, oracle = problem.setup, problem.oracle
    eps = cfg.epsilon
    policy_state = PolicyState(p=cfg.p, m=state.k, L_m=state.L, A_m=state.A)

    for i in range(cfg.max_inner + 1):
        tc = state.policy.trial(policy_state, i)
        # B shrinks as 2^{-i}, so larger trial indices are always feasible;
        # an infeasible small-i trial (possible when the smoothness estimate
        # has collapsed faster than the weights grew) is still queried -- the
        # call count per iteration stays two per trial -- but never accepted,
        # so the committed coefficients always satisfy alpha <= B <= A.
        feasible = check_feasible(tc, state.A)
        tau = tc.tau
        delta_c = tau * eps / 8.0
        delta_pc = tc.alpha * eps / 8.0
        x_trial = tau * state.z + (1.0 - tau) * state.y
        reply_x = oracle.query(x_trial, delta_c)
        trial_model = state.model.with_term(tc.alpha, reply_x.value,
                                            reply_x.subgrad, x_trial)
        z_trial = solve_prox(setup, trial_model.prox_model(), delta_pc,
                             cfg.delta_pu).point
        w = tau * z_trial + (1.0 - tau) * state.y
        f_w = oracle.query(w, delta_c).value
        scaled_L = math.ldexp(state.L, i - 1)  # 2^{i-1} * L_k
        if feasible and accept_test(f_w, reply_x.value, reply_x.subgrad, w,
                                    x_trial, math.ldexp(state.L, i), delta_c,
                                    oracle.delta_u):
            state.L = scaled_L
            state.x = x_trial
            state.z = z_trial
            state.A = tc.A_next
            state.B = tc.B
            state.y = ((state.A - tc.B) / state.A) * state.y + (tc.B / state.A) * w
            state.model = trial_model
            state.sum_B += tc.B
            state.oracle_calls += 2 * (i + 1)
            state.k += 1
            return _append_record(state, inner_trials=i + 1, delta_c=delta_c)
    raise LineSearchDivergenceError(
        f"inner line search exhausted {cfg.max_inner} trials at k={state.k}")


def dual_stop(state: RunState, D: float) -> bool:
    """Computable stopping rule from the model's lower bound.

    With D >= d(x*), (min Psi_k - D) / A_k lower-bounds the value attainable
    by the accumulated linearizations, so the gap at y_k is certified once

        F(y_k) - (min Psi_k - D)/A_k <= epsilon + (2 delta_u / A_k) sum B_i.
    """
    cfg = state.config
    psi_star = psi_star_exact(state.problem, state.model)
    F_tilde = (psi_star - D) / state.A
    F_y = _true_or_reported_F(state.problem, state.y, cfg.epsilon / 4.0)
    threshold = (cfg.epsilon
                 + 2.0 * state.problem.oracle.delta_u * state.sum_B / state.A)
    return F_y - F_tilde <= threshold


def theorem1_check(state: RunState, tol_scale: float = 1e-8) -> dict:
    """A_k F(y_k) - E_k <= min Psi_k, with F from the noise-free reference."""
    record = state.trace[-1]
    psi_star = psi_star_exact(state.problem, state.model)
    F_y = state.problem.true_F(state.y)
    if F_y is None:
        raise ValueError("theorem check needs a noise-free reference")
    lhs = state.A * F_y - record.E
    tol = tol_scale * (1.0 + abs(psi_star))
    return {"lhs": lhs, "rhs": psi_star, "ok": lhs <= psi_star + tol}


def corollary1_bound(state: RunState, d_star: float) -> float:
    """Right side of the convergence bound at the current iterate."""
    cfg = state.config
    du = state.problem.oracle.delta_u
    return (d_star / state.A
            + 2.0 * du * state.sum_B / state.A
            + (2 * state.k + 1) * cfg.delta_pu / state.A
            + cfg.epsilon / 2.0)


def oracle_call_identity(trace) -> bool:
    """Counted outer-loop calls must equal 4k + 2 log2(L_k / L_0) exactly."""
    if not trace:
        return True
    L0 = trace[0].L
    for rec in trace[1:]:
        ratio = rec.L / L0
        log2 = math.log2(ratio)
        if abs(log2 - round(log2)) > 1e-9:
            return False
        if rec.oracle_calls_cum != 4 * rec.k + 2 * round(log2):
            return False
    return True


def run(problem: Problem, config: SolverConfig,
        policy: Optional[PowerPolicy] = None,
        d_bound: Optional[float] = None,
        stop_at_A: Optional[float] = None) -> RunResult:
    """Drive the outer loop until a stopping condition fires.

    Stops on: the iteration cap; the computable dual stop (when config.D is
    set); the bound certificate d_bound / A_k <= epsilon / 2 (when d_bound
    >= d(x*) is supplied); or A_k reaching stop_at_A (used by restarts).
    """
    state = initialize(problem, config, policy)
    stopped = "max_outer"

    def should_stop() -> Optional[str]:
        if stop_at_A is not None and state.A >= stop_at_A:
            return "A_threshold"
        if d_bound is not None and d_bound / state.A <= config.epsilon / 2.0:
            return "bound_certificate"
        if config.D is not None and dual_stop(state, config.D):
            return "dual_stop"
        return None

    reason = should_stop()
    if reason is not None:
        stopped = reason
    else:
        for _ in range(config.max_outer):
            step(state)
            reason = should_stop()
            if reason is not None:
                stopped = reason
                break

    d_ref = d_bound if d_bound is not None else config.D
    if d_ref is None and problem.x_star is not None:
        d_ref = problem.setup.d(problem.x_star)
    bound = corollary1_bound(state, d_ref) if d_ref is not None else math.nan
    return RunResult(solution=state.y.copy(), trace=state.trace,
                     bound=bound, stopped_by=stopped, state=state)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def trace_to_csv(trace, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRACE_COLUMNS)
        for rec in trace:
            writer.writerow([_fmt(v) for v in (
                rec.k, rec.inner_trials, rec.L, rec.A, rec.B, rec.F_y,
                rec.psi_star, rec.E, rec.oracle_calls_cum, rec.delta_c)])


def trace_from_csv(path) -> list:
    records = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            records.append(TraceRecord(
                k=int(row["k"]),
                inner_trials=int(row["inner_trials"]),
                L=float(row["L_k"]),
                A=float(row["A_k"]),
                B=float(row["B_k"]),
                F_y=float(row["F_y"]) if row["F_y"] else None,
                psi_star=float(row["psi_star"]) if row["psi_star"] else None,
                E=float(row["E_k"]),
                oracle_calls_cum=int(row["oracle_calls_cum"]),
                delta_c=float(row["delta_c_k"]),
            ))
    return records
