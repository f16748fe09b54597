"""Adaptive intermediate gradient methods with inexact oracles.

A solver library for composite convex minimization

    min_{x in Q}  f(x) + h(x)

where f is known only through an inexact first-order oracle (controlled
accuracy delta_c, uncontrolled error delta_u) and may have merely
Hölder-continuous subgradients.  A single power parameter p in [1, 2]
interpolates between a robust (sub)gradient-type method (p = 1, errors do
not accumulate) and a fast gradient-type method (p = 2, fastest rate but
errors accumulate linearly), with a restart scheme for strongly convex
objectives and a benchmark harness on top.
"""

from .core import (
    DimensionMismatchError,
    InexactOracle,
    InitializationDivergenceError,
    L1_LINF_NORMS,
    L2_NORMS,
    LineSearchDivergenceError,
    NormPair,
    OracleReply,
    Problem,
    ProxFailureError,
    SolverConfig,
    UnsupportedSetupError,
    check_oracle_inequality,
)
from .oracles import (
    HoelderInfo,
    NoiseSpec,
    hoelder_constant,
    make_power_objective,
    make_quadratic_objective,
    with_noise,
)
from .policy import PowerPolicy, check_AB_dominance, check_feasible, power_trial
from .prox import (
    CompositeTerm,
    ProxModel,
    ProxResult,
    ProxSetup,
    SetDescriptor,
    entropy_simplex_setup,
    euclidean_setup,
    lemma1_gap,
    solve_prox,
    verify_certificate,
)
from .bench import error_floor, fit_rate, trace_gaps
from .problems import make_problem, project_simplex
from .restart import (
    RestartConfig,
    inner_iteration_bound,
    restart_count,
    restart_run,
    uncontrolled_floor,
)
from .solver import (
    RunResult,
    TraceRecord,
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

__version__ = "1.0.0"

__all__ = [
    "CompositeTerm",
    "DimensionMismatchError",
    "HoelderInfo",
    "InexactOracle",
    "InitializationDivergenceError",
    "L1_LINF_NORMS",
    "L2_NORMS",
    "LineSearchDivergenceError",
    "NoiseSpec",
    "NormPair",
    "OracleReply",
    "PowerPolicy",
    "Problem",
    "ProxFailureError",
    "ProxModel",
    "ProxResult",
    "ProxSetup",
    "RestartConfig",
    "RunResult",
    "SetDescriptor",
    "SolverConfig",
    "TraceRecord",
    "UnsupportedSetupError",
    "check_AB_dominance",
    "check_feasible",
    "check_oracle_inequality",
    "corollary1_bound",
    "dual_stop",
    "entropy_simplex_setup",
    "error_floor",
    "euclidean_setup",
    "fit_rate",
    "hoelder_constant",
    "initialize",
    "inner_iteration_bound",
    "lemma1_gap",
    "make_power_objective",
    "make_problem",
    "make_quadratic_objective",
    "oracle_call_identity",
    "power_trial",
    "project_simplex",
    "restart_count",
    "restart_run",
    "run",
    "solve_prox",
    "step",
    "theorem1_check",
    "trace_from_csv",
    "trace_gaps",
    "trace_to_csv",
    "uncontrolled_floor",
    "verify_certificate",
    "with_noise",
]
