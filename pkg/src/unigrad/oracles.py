"""Analytic test objectives and deterministic noise wrappers.

The objectives here have known Hölder data (level ``nu`` and constant
``M_nu``), which makes the envelope inequality of the oracle contract
verifiable: given a controlled accuracy ``delta_c``, the effective
quadratic-envelope constant is

    L(delta_c) = [ (1-nu)/(1+nu) * 1/(2*delta_c) ]^((1-nu)/(1+nu))
                 * M_nu^(2/(1+nu)),

which is constant (= M_1) in the smooth case nu = 1 and grows as delta_c
shrinks for nu < 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    DualVector,
    InexactOracle,
    L2_NORMS,
    NormPair,
    OracleReply,
    Point,
    as_point,
    dual_pairing,
)

__all__ = [
    "HoelderInfo",
    "NoiseSpec",
    "hoelder_constant",
    "make_power_objective",
    "make_quadratic_objective",
    "with_noise",
    "PowerObjective",
    "QuadraticObjective",
    "NoisyOracle",
]


@dataclass(frozen=True)
class HoelderInfo:
    """Hölder level nu in [0, 1] and constant M_nu of a subgradient map."""

    nu: float
    M_nu: float

    def __post_init__(self):
        if not (0.0 <= self.nu <= 1.0):
            raise ValueError("nu must lie in [0, 1]")
        if self.M_nu <= 0:
            raise ValueError("M_nu must be positive")


def hoelder_constant(delta_c: float, info: HoelderInfo) -> float:
    """Envelope constant L(delta_c) for a Hölder-smooth objective.

    At nu = 1 the leading factor is 0^0-shaped; we take its continuous
    limit, 1, so that L(delta_c) == M_1 for any delta_c.
    """
    if delta_c <= 0:
        raise ValueError("delta_c must be positive")
    nu, m = info.nu, info.M_nu
    expo = (1.0 - nu) / (1.0 + nu)
    if expo == 0.0:
        factor = 1.0
    else:
        factor = (expo / (2.0 * delta_c)) ** expo
    return factor * m ** (2.0 / (1.0 + nu))


@dataclass(frozen=True)
class NoiseSpec:
    """Deterministic perturbation applied to an exact oracle.

    delta1_bar -- bound on the value perturbation
    delta2_bar -- bound on the subgradient perturbation (dual norm)
    diameter   -- declared bound on ||x - y|| over the working set; the
                  resulting uncontrolled error is delta1_bar +
                  delta2_bar * diameter
    mode       -- "zero" (no perturbation), "fixed_direction" (constant
                  worst-case drift) or "adversarial_sign" (perturbation
                  alternates with the call parity, opposing the accept test)
    """

    delta1_bar: float = 0.0
    delta2_bar: float = 0.0
    diameter: float = 1.0
    mode: str = "zero"

    def __post_init__(self):
        if self.delta1_bar < 0 or self.delta2_bar < 0:
            raise ValueError("noise bounds must be nonnegative")
        if self.diameter <= 0:
            raise ValueError("diameter must be positive")
        if self.mode not in ("zero", "fixed_direction", "adversarial_sign"):
            raise ValueError(f"unknown noise mode {self.mode!r}")

    @property
    def delta_u(self) -> float:
        return self.delta1_bar + self.delta2_bar * self.diameter


class PowerObjective(InexactOracle):
    """f(x) = |<a, x> - b|^(1+nu) / (1+nu), exact oracle.

    Subgradient sign(t)|t|^nu * a with t = <a, x> - b; at the kink (nu = 0,
    t = 0) we return 0, a valid subgradient.  The reported Hölder constant
    is M_nu = 2^(1-nu) ||a||_*^(1+nu).
    """

    def __init__(self, a, b: float, nu: float, norms: NormPair = L2_NORMS):
        if not (0.0 <= nu <= 1.0):
            raise ValueError("nu must lie in [0, 1]")
        self.a = as_point(a)
        if not np.any(self.a):
            raise ValueError("a must be nonzero")
        self.b = float(b)
        self.nu = float(nu)
        self.norms = norms
        self.dim = self.a.size
        a_dual = norms.dual(self.a)
        self.smoothness = HoelderInfo(nu, 2.0 ** (1.0 - nu) * a_dual ** (1.0 + nu))
        self.delta_u = 0.0

    def _t(self, x):
        return dual_pairing(self.a, x) - self.b

    def reference(self, x: Point) -> float:
        t = self._t(as_point(x))
        return abs(t) ** (1.0 + self.nu) / (1.0 + self.nu)

    def query(self, x: Point, delta_c: float) -> OracleReply:
        x = as_point(x)
        t = self._t(x)
        if t == 0.0:
            scale = 0.0
        else:
            scale = np.sign(t) * abs(t) ** self.nu
        return OracleReply(self.reference(x), scale * self.a)


class QuadraticObjective(InexactOracle):
    """f(x) = 1/2 <Qx, x> + <c, x> with symmetric PSD Q, exact oracle."""

    def __init__(self, Q, c=None):
        Q = np.atleast_2d(np.asarray(Q, dtype=float))
        if Q.shape[0] != Q.shape[1]:
            raise ValueError("Q must be square")
        if not np.allclose(Q, Q.T, atol=1e-12):
            raise ValueError("Q must be symmetric")
        eigs = np.linalg.eigvalsh(Q)
        if eigs[0] < -1e-10 * max(1.0, abs(eigs[-1])):
            raise ValueError("Q must be positive semidefinite")
        self.Q = Q
        self.c = np.zeros(Q.shape[0]) if c is None else as_point(c)
        if self.c.size != Q.shape[0]:
            raise ValueError("c has wrong dimension")
        self.dim = Q.shape[0]
        self.norms = L2_NORMS
        self.smoothness = HoelderInfo(1.0, float(max(eigs[-1], 1e-300)))
        self.delta_u = 0.0

    def reference(self, x: Point) -> float:
        x = as_point(x)
        return 0.5 * float(x @ self.Q @ x) + float(self.c @ x)

    def query(self, x: Point, delta_c: float) -> OracleReply:
        x = as_point(x)
        return OracleReply(self.reference(x), self.Q @ x + self.c)


class NoisyOracle(InexactOracle):
    """Deterministically perturbed wrapper around an exact oracle.

    The perturbation keeps the wrapper a valid inexact oracle with
    uncontrolled error delta_u = delta1_bar + delta2_bar * diameter on any
    pair of points within the declared diameter.  To that end the value
    channel is only ever shifted downward (by at most delta1_bar, plus a
    constant delta2_bar * diameter / 2 that pays for the subgradient error)
    and the subgradient perturbation uses half the nominal radius:

      value    f~(x) = f(x) + eta(x) - delta2_bar * diameter / 2,
               eta(x) in [-delta1_bar, 0]
      subgrad  g~(x) = g(x) + e(x),  ||e(x)||_* <= delta2_bar / 2

    so the lower envelope inequality survives the worst-case gradient tilt
    and the upper one stays within delta_c + delta_u.
    """

    def __init__(self, base: InexactOracle, spec: NoiseSpec):
        if base.delta_u != 0.0:
            raise ValueError("noise wrapper requires a noise-free base")
        self.base = base
        self.spec = spec
        self.dim = base.dim
        self.norms = getattr(base, "norms", L2_NORMS)
        self.smoothness = base.smoothness
        self.delta_u = spec.delta_u
        self._calls = 0
        n = max(base.dim, 1)
        self._direction = np.ones(n) / self.norms.dual(np.ones(n))

    def reference(self, x: Point) -> float:
        return self.base.reference(x)

    def query(self, x: Point, delta_c: float) -> OracleReply:
        reply = self.base.query(x, delta_c)
        spec = self.spec
        parity = self._calls % 2
        self._calls += 1
        if spec.mode == "zero":
            return reply
        if spec.mode == "fixed_direction":
            eta = -spec.delta1_bar
            tilt = 0.5 * spec.delta2_bar * self._direction
        else:  # adversarial_sign: even calls hit trial/model points
            eta = -spec.delta1_bar if parity == 0 else 0.0
            sign = 1.0 if parity == 0 else -1.0
            tilt = 0.5 * spec.delta2_bar * sign * self._direction
        shift = 0.5 * spec.delta2_bar * spec.diameter
        return OracleReply(reply.value + eta - shift, reply.subgrad + tilt)


def make_power_objective(a, b: float, nu: float,
                         norms: NormPair = L2_NORMS) -> PowerObjective:
    return PowerObjective(a, b, nu, norms)


def make_quadratic_objective(Q, c=None) -> QuadraticObjective:
    return QuadraticObjective(Q, c)


def with_noise(base: InexactOracle, spec: NoiseSpec) -> NoisyOracle:
    return NoisyOracle(base, spec)
