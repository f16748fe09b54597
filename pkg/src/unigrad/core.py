"""Foundational types: points, norms, the inexact first-order oracle contract.

A point lives in a finite-dimensional primal space, a (sub)gradient in its
dual.  Both are plain 1-D float arrays.  An inexact oracle returns, for a
query point ``x`` and a controlled accuracy ``delta_c``, a value/subgradient
pair ``(f_val, g)`` such that for all feasible ``x``, ``y``

    0 <= f(x) - f_val(y) - <g(y), x - y>
      <= L(delta_c)/2 * ||x - y||^2 + delta_c + delta_u,

where ``delta_u`` is a known but uncontrolled error level.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

__all__ = [
    "Point",
    "DualVector",
    "DimensionMismatchError",
    "UnsupportedSetupError",
    "ProxFailureError",
    "LineSearchDivergenceError",
    "InitializationDivergenceError",
    "NormPair",
    "L2_NORMS",
    "L1_LINF_NORMS",
    "OracleReply",
    "InexactOracle",
    "SolverConfig",
    "Problem",
    "dual_pairing",
    "check_oracle_inequality",
    "as_point",
]

Point = np.ndarray
DualVector = np.ndarray

# Default comparison tolerance: absolute + relative, far below any epsilon
# used in practice but above double-precision rounding of the compared sums.
ABS_TOL = 1e-9
REL_TOL = 1e-9


class DimensionMismatchError(ValueError):
    """Primal/dual vectors of incompatible dimensions were combined."""


class UnsupportedSetupError(ValueError):
    """The requested prox setup / composite combination has no solver."""


class ProxFailureError(RuntimeError):
    """Inexact prox-mapping could not certify the requested slack."""

    def __init__(self, msg, residual=None):
        super().__init__(msg)
        self.residual = residual


class LineSearchDivergenceError(RuntimeError):
    """The inner backtracking loop exhausted its trial budget."""


class InitializationDivergenceError(LineSearchDivergenceError):
    """The initialization line search exhausted its trial budget."""


def as_point(x) -> Point:
    """Coerce to a 1-D float array and reject non-finite entries."""
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    if not np.all(np.isfinite(arr)):
        raise ValueError("point has non-finite entries")
    return arr


def dual_pairing(s: DualVector, x: Point) -> float:
    """Value <s, x> of the linear functional s at x."""
    s = np.asarray(s, dtype=float)
    x = np.asarray(x, dtype=float)
    if s.shape != x.shape:
        raise DimensionMismatchError(
            f"pairing of shapes {s.shape} and {x.shape}"
        )
    return float(np.dot(s, x))


@dataclass(frozen=True)
class NormPair:
    """A primal norm together with its dual norm."""

    name: str
    primal: Callable[[Point], float]
    dual: Callable[[DualVector], float]

    def pairing(self, s: DualVector, x: Point) -> float:
        return dual_pairing(s, x)


L2_NORMS = NormPair(
    "l2",
    primal=lambda x: float(np.linalg.norm(x)),
    dual=lambda s: float(np.linalg.norm(s)),
)

# l1 primal norm; its dual is the max norm.
L1_LINF_NORMS = NormPair(
    "l1",
    primal=lambda x: float(np.sum(np.abs(x))),
    dual=lambda s: float(np.max(np.abs(s))) if np.size(s) else 0.0,
)


@dataclass(frozen=True)
class OracleReply:
    """Approximate value and subgradient returned by an inexact oracle."""

    value: float
    subgrad: DualVector

    def __post_init__(self):
        if not np.isfinite(self.value):
            raise ValueError("oracle value is non-finite")
        if not np.all(np.isfinite(self.subgrad)):
            raise ValueError("oracle subgradient has non-finite entries")


class InexactOracle:
    """Contract for inexact first-order oracles.

    Subclasses implement :meth:`query`.  ``delta_u`` is the uncontrolled
    error bound (0 for exact oracles).  ``smoothness`` optionally carries
    the smoothness level/constant of the underlying function, used by
    verification helpers, never by the solver itself.  ``reference`` is the
    noise-free value of the underlying function, available for all analytic
    test objectives.
    """

    delta_u: float = 0.0
    smoothness = None  # Optional[HoelderInfo], set by subclasses
    dim: int = 0

    def query(self, x: Point, delta_c: float) -> OracleReply:
        raise NotImplementedError

    def reference(self, x: Point) -> float:
        """Noise-free function value, when the test objective provides one."""
        raise NotImplementedError


@dataclass
class SolverConfig:
    """Run parameters for the adaptive intermediate gradient solver.

    epsilon   -- target accuracy (also drives internal oracle/prox slacks)
    L0        -- initial guess for the local smoothness constant
    p         -- interpolation parameter in [1, 2]; 1 behaves like a plain
                 (mirror) gradient method, 2 like a fast gradient method
    delta_pu  -- uncontrolled prox-mapping error injected per prox solve
    D         -- optional upper bound on d(x*) enabling the computable stop
    """

    epsilon: float
    L0: float = 1.0
    p: float = 2.0
    delta_pu: float = 0.0
    max_outer: int = 1000
    max_inner: int = 60
    D: Optional[float] = None
    mu: Optional[float] = None
    Omega: Optional[float] = None
    R0_sq: Optional[float] = None

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.L0 <= 0:
            raise ValueError("L0 must be positive")
        if not (1.0 <= self.p <= 2.0):
            raise ValueError("p must lie in [1, 2]")
        if self.delta_pu < 0:
            raise ValueError("delta_pu must be nonnegative")
        if self.max_outer < 1 or self.max_inner < 1:
            raise ValueError("iteration caps must be positive")


@dataclass
class Problem:
    """A composite problem: oracle for f plus a prox setup carrying Q and h.

    ``f_star`` / ``x_star`` are analytic references used by tests and by the
    benchmark harness to report true gaps; the solver never reads them.
    """

    oracle: InexactOracle
    setup: "unigrad.prox.ProxSetup"  # noqa: F821 - forward ref, see prox.py
    name: str = ""
    f_star: Optional[float] = None
    x_star: Optional[Point] = None

    def composite_value(self, x: Point) -> float:
        return self.setup.composite.evaluate(x)

    def true_F(self, x: Point) -> Optional[float]:
        """Noise-free F(x) = f(x) + h(x), when a reference is available."""
        try:
            fx = self.oracle.reference(x)
        except NotImplementedError:
            return None
        return fx + self.composite_value(x)


def _tol(*values: float) -> float:
    scale = max(abs(v) for v in values) if values else 0.0
    return ABS_TOL + REL_TOL * scale


def check_oracle_inequality(oracle: InexactOracle, x: Point, y: Point,
                            delta_c: float, L: float) -> dict:
    """Check both sides of the inexact-oracle envelope at the pair (x, y).

    The reference value f(x) comes from the oracle's noise-free evaluator;
    the model side uses the (possibly noisy) reply at y.  Returns flags for
    the lower and upper inequality plus the worst margin (negative when one
    side is violated beyond tolerance).
    """
    x = as_point(x)
    y = as_point(y)
    fx = oracle.reference(x)
    reply = oracle.query(y, delta_c)
    gap = fx - reply.value - dual_pairing(reply.subgrad, x - y)
    rhs = 0.5 * L * _primal_norm_sq(oracle, x - y) + delta_c + oracle.delta_u
    tol = _tol(fx, reply.value, rhs)
    return {
        "lower_ok": gap >= -tol,
        "upper_ok": gap <= rhs + tol,
        "slack": min(gap, rhs - gap),
    }


def _primal_norm_sq(oracle, v):
    norms = getattr(oracle, "norms", L2_NORMS)
    n = norms.primal(v)
    return n * n
