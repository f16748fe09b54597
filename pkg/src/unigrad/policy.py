"""Coefficient-sequence policies for the solver's inner line search.

A policy produces, for outer iteration index m and trial index i, a pair
(alpha, B) that must satisfy 0 < alpha <= B <= A_m + alpha together with the
identity B = alpha^2 * 2^i * L_m.  The shipped power policy interpolates,
via its parameter p in [1, 2], between gradient-method coefficients (p = 1,
alpha = B) and fast-gradient coefficients (p = 2).
"""

from __future__ import annotations

from dataclasses import dataclass

import math

from .core import LineSearchDivergenceError

__all__ = [
    "TrialCoefficients",
    "PolicyState",
    "PowerPolicy",
    "power_trial",
    "check_feasible",
    "check_AB_dominance",
]

FEAS_TOL = 1e-12
MAX_DOUBLING = 60  # 2^60 exceeds any useful double-precision rescaling


@dataclass(frozen=True)
class TrialCoefficients:
    alpha: float
    B: float
    A_next: float
    tau: float


@dataclass(frozen=True)
class PolicyState:
    """Snapshot of the solver state a policy needs to produce a trial."""

    p: float
    m: int
    L_m: float
    A_m: float


class PowerPolicy:
    """alpha = r^(p-1) / (2^i L), B = r^(2p-2) / (2^i L), r = (m+1+2p)/(2p)."""

    def __init__(self, p: float):
        if not (1.0 <= p <= 2.0):
            raise ValueError("p must lie in [1, 2]")
        self.p = p

    def trial(self, state: PolicyState, i: int) -> TrialCoefficients:
        return power_trial(state, i)


def power_trial(state: PolicyState, i: int) -> TrialCoefficients:
    if i < 0:
        raise ValueError("trial index must be nonnegative")
    if i > MAX_DOUBLING:
        raise LineSearchDivergenceError(
            f"line-search scaling 2^{i} beyond representable range")
    p = state.p
    ratio = (state.m + 1.0 + 2.0 * p) / (2.0 * p)
    denom = math.ldexp(state.L_m, i)  # 2^i * L_m, exact scaling
    alpha = ratio ** (p - 1.0) / denom
    B = ratio ** (2.0 * p - 2.0) / denom
    # The closed form must reproduce B = alpha^2 * 2^i * L_m; a mismatch
    # means the m/i bookkeeping drifted.
    ident = alpha * alpha * denom
    if not math.isfinite(B) or abs(ident - B) > 1e-12 * max(abs(B), 1e-300):
        raise LineSearchDivergenceError("trial coefficient identity failed")
    return TrialCoefficients(alpha=alpha, B=B, A_next=state.A_m + alpha,
                             tau=alpha / B)


def check_feasible(tc: TrialCoefficients, A_k: float,
                   tol: float = FEAS_TOL) -> bool:
    """0 < alpha <= B <= A_k + alpha, up to tolerance."""
    return (tc.alpha > 0.0
            and tc.alpha <= tc.B + tol * max(1.0, tc.B)
            and tc.B <= A_k + tc.alpha + tol * max(1.0, A_k + tc.alpha))


def check_AB_dominance(A_values, B_values, tol: float = FEAS_TOL) -> bool:
    """A_k >= B_k along a run, which keeps the y-update a convex combination."""
    return all(a >= b - tol * max(1.0, abs(b))
               for a, b in zip(A_values, B_values))
