"""Proximal setups and the inexact composite prox-mapping.

A setup bundles a norm pair, a distance-generating function ``d`` (strongly
convex, minimum 0 at its center), the induced Bregman divergence, the
feasible set and the simple composite term ``h``.  The prox subproblem is

    min_{x in Q}  d(x) + <g, x> + const + weight * h(x)

and an inexact solution is certified through the variational inequality

    <g + grad_d(x~) + weight * p, u - x~> >= -(delta_pc + delta_pu)
        for all probes u,  some p in the subdifferential of h at x~.

Every setup shipped here admits an exact closed-form minimizer; uncontrolled
prox error is simulated by a deterministic perturbation of that minimizer.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .core import (
    ABS_TOL,
    DualVector,
    L1_LINF_NORMS,
    L2_NORMS,
    NormPair,
    Point,
    ProxFailureError,
    UnsupportedSetupError,
    as_point,
    dual_pairing,
)

__all__ = [
    "SetDescriptor",
    "CompositeTerm",
    "ProxSetup",
    "ProxModel",
    "ProxResult",
    "euclidean_setup",
    "entropy_simplex_setup",
    "euclidean_prox",
    "entropy_prox_simplex",
    "solve_prox",
    "verify_certificate",
    "lemma1_gap",
    "prox_objective",
    "exact_prox_minimizer",
    "soft_threshold",
]


@dataclass(frozen=True)
class SetDescriptor:
    """Feasible set: all of R^n, a box, or the standard simplex."""

    kind: str  # "all" | "box" | "simplex"
    dim: int
    lo: Point = None
    hi: Point = None

    def __post_init__(self):
        if self.kind not in ("all", "box", "simplex"):
            raise ValueError(f"unknown set kind {self.kind!r}")
        if self.kind == "box":
            lo, hi = as_point(self.lo), as_point(self.hi)
            if lo.size != self.dim or hi.size != self.dim or np.any(lo > hi):
                raise ValueError("invalid box bounds")
            object.__setattr__(self, "lo", lo)
            object.__setattr__(self, "hi", hi)

    def contains(self, x: Point, tol: float = 1e-9) -> bool:
        x = as_point(x)
        if x.size != self.dim:
            return False
        if self.kind == "all":
            return True
        if self.kind == "box":
            return bool(np.all(x >= self.lo - tol) and np.all(x <= self.hi + tol))
        return bool(np.all(x >= -tol) and abs(x.sum() - 1.0) <= tol)

    def clip(self, x: Point) -> Point:
        """Cheap feasibility repair (exact for box; renormalization for simplex)."""
        x = as_point(x)
        if self.kind == "box":
            return np.clip(x, self.lo, self.hi)
        if self.kind == "simplex":
            y = np.maximum(x, 0.0)
            s = y.sum()
            return y / s if s > 0 else np.full(self.dim, 1.0 / self.dim)
        return x

    def sample(self, rng: np.random.Generator, scale: float = 1.0) -> Point:
        if self.kind == "all":
            return scale * rng.standard_normal(self.dim)
        if self.kind == "box":
            return self.lo + (self.hi - self.lo) * rng.random(self.dim)
        return rng.dirichlet(np.ones(self.dim))


@dataclass(frozen=True)
class CompositeTerm:
    """Simple closed convex term h: zero, lam * ||x||_1, or a set indicator.

    The indicator evaluates to 0; feasibility is the prox solver's job.
    """

    kind: str = "zero"  # "zero" | "l1" | "indicator"
    lam: float = 0.0

    def __post_init__(self):
        if self.kind not in ("zero", "l1", "indicator"):
            raise ValueError(f"unknown composite kind {self.kind!r}")
        if self.kind == "l1" and self.lam < 0:
            raise ValueError("l1 weight must be nonnegative")

    def evaluate(self, x: Point) -> float:
        if self.kind == "l1":
            return self.lam * float(np.sum(np.abs(x)))
        return 0.0


ZERO_COMPOSITE = CompositeTerm("zero")


@dataclass(frozen=True)
class ProxSetup:
    """Norms + distance-generating function + feasible set + composite term."""

    kind: str  # "euclidean" | "entropy"
    norms: NormPair
    set: SetDescriptor
    center: Point
    composite: CompositeTerm = ZERO_COMPOSITE

    def d(self, x: Point) -> float:
        x = as_point(x)
        if self.kind == "euclidean":
            diff = x - self.center
            return 0.5 * float(diff @ diff)
        return float(np.log(self.set.dim) + np.sum(_xlogx(x)))

    def grad_d(self, x: Point) -> DualVector:
        x = as_point(x)
        if self.kind == "euclidean":
            return x - self.center
        if np.any(x <= 0):
            raise ValueError("entropy gradient requires an interior point")
        return np.log(x) + 1.0

    def bregman(self, x: Point, y: Point) -> float:
        """V[x](y) = d(y) - d(x) - <grad_d(x), y - x>."""
        x, y = as_point(x), as_point(y)
        if self.kind == "euclidean":
            diff = y - x
            return 0.5 * float(diff @ diff)
        if np.any(x <= 0):
            raise ValueError("entropy Bregman divergence requires interior x")
        return float(np.sum(_xlogx(y)) - np.sum(y * np.log(x)) + x.sum() - y.sum())

    def recentered(self, new_center: Point) -> "ProxSetup":
        if self.kind != "euclidean":
            raise UnsupportedSetupError("only the euclidean setup recenters")
        return replace(self, center=as_point(new_center))


def _xlogx(x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = x[pos] * np.log(x[pos])
    if np.any(x < -1e-12):
        raise ValueError("entropy term requires nonnegative input")
    return out


def euclidean_setup(set_descr: SetDescriptor, center,
                    composite: CompositeTerm = ZERO_COMPOSITE) -> ProxSetup:
    center = as_point(center)
    if center.size != set_descr.dim:
        raise ValueError("center has wrong dimension")
    if not set_descr.contains(center):
        raise ValueError("center must be feasible")
    if set_descr.kind == "simplex":
        raise UnsupportedSetupError("use the entropy setup on the simplex")
    return ProxSetup("euclidean", L2_NORMS, set_descr, center, composite)


def entropy_simplex_setup(dim: int,
                          composite: CompositeTerm = ZERO_COMPOSITE) -> ProxSetup:
    if composite.kind == "l1":
        raise UnsupportedSetupError("l1 composite is constant on the simplex")
    set_descr = SetDescriptor("simplex", dim)
    center = np.full(dim, 1.0 / dim)
    return ProxSetup("entropy", L1_LINF_NORMS, set_descr, center, composite)


@dataclass(frozen=True)
class ProxModel:
    """Accumulated linear term, composite weight and affine offset."""

    linear: DualVector
    composite_weight: float = 0.0
    constant: float = 0.0

    def __post_init__(self):
        if self.composite_weight < 0:
            raise ValueError("composite weight must be nonnegative")
        object.__setattr__(self, "linear", as_point(self.linear))


@dataclass(frozen=True)
class ProxResult:
    point: Point
    delta_pc: float
    delta_pu: float
    objective_value: float


def prox_objective(setup: ProxSetup, model: ProxModel, x: Point) -> float:
    """d(x) + <linear, x> + constant + weight * h(x)."""
    x = as_point(x)
    return (setup.d(x) + dual_pairing(model.linear, x) + model.constant
            + model.composite_weight * setup.composite.evaluate(x))


def soft_threshold(u: Point, level: float) -> Point:
    return np.sign(u) * np.maximum(np.abs(u) - level, 0.0)


def euclidean_prox(setup: ProxSetup, model: ProxModel) -> ProxResult:
    """Exact minimizer for the euclidean setup on all-space or a box.

    The objective is separable, so soft-thresholding followed by clipping to
    the box is the exact coordinatewise minimizer.
    """
    if setup.kind != "euclidean":
        raise UnsupportedSetupError("euclidean_prox needs a euclidean setup")
    if setup.set.kind not in ("all", "box"):
        raise UnsupportedSetupError(f"euclidean prox on {setup.set.kind!r}")
    h = setup.composite
    if h.kind not in ("zero", "l1", "indicator"):
        raise UnsupportedSetupError(f"composite {h.kind!r}")
    u = setup.center - model.linear
    if h.kind == "l1":
        u = soft_threshold(u, model.composite_weight * h.lam)
    if setup.set.kind == "box":
        u = np.clip(u, setup.set.lo, setup.set.hi)
    return ProxResult(u, 0.0, 0.0, prox_objective(setup, model, u))


def entropy_prox_simplex(setup: ProxSetup, model: ProxModel) -> ProxResult:
    """Exact entropy prox on the simplex: x_i proportional to exp(-g_i)."""
    if setup.kind != "entropy":
        raise UnsupportedSetupError("entropy prox needs the entropy setup")
    z = -model.linear
    z = z - z.max()  # overflow-safe
    w = np.exp(z)
    x = w / w.sum()
    return ProxResult(x, 0.0, 0.0, prox_objective(setup, model, x))


def exact_prox_minimizer(setup: ProxSetup, model: ProxModel) -> ProxResult:
    """Dispatch to the closed-form solver for the given setup."""
    if setup.kind == "euclidean":
        return euclidean_prox(setup, model)
    return entropy_prox_simplex(setup, model)


def _certificate_subgradient(setup: ProxSetup, model: ProxModel,
                             x_tilde: Point) -> DualVector:
    """weight * p with p a subgradient of h at x~ chosen from optimality.

    For the l1 term the coordinatewise first-order condition of the
    unclipped minimizer pins p on the support and yields a valid selection
    in [-1, 1] off it.  For zero/indicator terms p = 0 works: the
    indicator's normal-cone element is absorbed by probing only feasible u.
    """
    h = setup.composite
    w = model.composite_weight
    if h.kind != "l1" or w * h.lam == 0.0:
        return np.zeros(x_tilde.size)
    level = w * h.lam
    p = np.sign(x_tilde)
    off = x_tilde == 0.0
    p[off] = np.clip((setup.center - model.linear)[off] / level, -1.0, 1.0)
    return level * p


def verify_certificate(setup: ProxSetup, model: ProxModel, x_tilde: Point,
                       slack: float, probes, tol: float = ABS_TOL) -> dict:
    """Probe the variational-inequality certificate at x~.

    ok is True when every probe u satisfies
    <linear + grad_d(x~) + weight*p, u - x~> >= -slack - tol.
    """
    x_tilde = as_point(x_tilde)
    s = model.linear + setup.grad_d(x_tilde) + _certificate_subgradient(
        setup, model, x_tilde)
    worst = 0.0
    for u in probes:
        worst = min(worst, dual_pairing(s, as_point(u) - x_tilde))
    scale = tol * (1.0 + float(np.max(np.abs(s), initial=0.0)))
    return {"ok": worst >= -slack - scale, "worst_violation": worst}


def lemma1_gap(setup: ProxSetup, model: ProxModel, x_tilde: Point,
               y: Point, slack: float) -> float:
    """Psi(y) - Psi(x~) - V[x~](y) + slack; nonnegative under the certificate."""
    return (prox_objective(setup, model, y)
            - prox_objective(setup, model, x_tilde)
            - setup.bregman(x_tilde, y) + slack)


def _default_probes(setup: ProxSetup, x_exact: Point) -> list:
    probes = [setup.center.copy(), x_exact.copy()]
    n = setup.set.dim
    if setup.set.kind == "simplex":
        eye = np.eye(n)
        probes.extend(0.9 * x_exact + 0.1 * eye[j] for j in range(min(n, 16)))
    elif setup.set.kind == "box":
        probes.append(setup.set.lo.copy())
        probes.append(setup.set.hi.copy())
    else:
        for j in range(min(n, 8)):
            e = np.zeros(n)
            e[j] = 1.0
            probes.append(x_exact + e)
            probes.append(x_exact - e)
    return probes


def _inject_uncontrolled_error(setup: ProxSetup, model: ProxModel,
                               exact: Point, delta_pu: float) -> Point:
    """Deterministically degrade an exact prox solution by about delta_pu.

    Moves the point toward (or away from) probe directions and scales the
    step so the worst certificate violation over the probe set lands in
    (0, delta_pu].  Directions and step search are deterministic.
    """
    probes = _default_probes(setup, exact)

    def violation(pt):
        return -verify_certificate(setup, model, pt, 0.0, probes)["worst_violation"]

    candidates = []
    for u in probes:
        dvec = as_point(u) - exact
        nrm = float(np.linalg.norm(dvec))
        if nrm < 1e-14:
            continue
        candidates.append(dvec / nrm)
        if setup.set.kind == "all":
            candidates.append(-dvec / nrm)
    if not candidates:
        return exact

    def feasible(pt):
        if setup.set.kind == "simplex":
            pt = np.maximum(pt, 1e-300)
            return pt / pt.sum()
        return setup.set.clip(pt)

    best = exact
    best_v = 0.0
    for dvec in candidates:
        # geometric scan for a bracketing step, then bisection
        t = delta_pu
        t_hi = None
        for _ in range(80):
            v = violation(feasible(exact + t * dvec))
            if v > delta_pu:
                t_hi = t
                break
            if v > best_v:
                best, best_v = feasible(exact + t * dvec), v
            t *= 2.0
            if t > 1e12:
                break
        if t_hi is not None:
            t_lo = t_hi / 2.0
            for _ in range(60):
                tm = 0.5 * (t_lo + t_hi)
                v = violation(feasible(exact + tm * dvec))
                if v > delta_pu:
                    t_hi = tm
                else:
                    t_lo = tm
                    if v > best_v:
                        best, best_v = feasible(exact + tm * dvec), v
        if best_v >= 0.5 * delta_pu:
            break
    return best


def solve_prox(setup: ProxSetup, model: ProxModel, delta_pc: float,
               delta_pu_injection: float = 0.0) -> ProxResult:
    """Inexact composite prox-mapping.

    All shipped setups admit an exact closed-form minimizer, so the
    controlled error actually achieved is 0 <= delta_pc.  A positive
    ``delta_pu_injection`` deterministically perturbs the exact solution so
    the certificate degrades by about that amount, simulating an
    uncontrolled prox error.
    """
    if delta_pc <= 0:
        raise ValueError("delta_pc must be positive")
    exact = exact_prox_minimizer(setup, model)
    point = exact.point
    if delta_pu_injection > 0.0:
        point = _inject_uncontrolled_error(setup, model, exact.point,
                                           delta_pu_injection)
        cert = verify_certificate(setup, model, point,
                                  delta_pc + delta_pu_injection,
                                  _default_probes(setup, exact.point))
        if not cert["ok"]:
            raise ProxFailureError(
                "injected error exceeds the certified slack",
                residual=cert["worst_violation"])
    return ProxResult(point, delta_pc, delta_pu_injection,
                      prox_objective(setup, model, point))
