"""Registered analytic test problems with known optima.

Every problem here carries a noise-free reference evaluator and, where the
optimum is available in closed form, the optimal value / point, so that
true gaps can be reported by the benchmark harness and checked by tests.
"""

from __future__ import annotations

import numpy as np

from .core import (
    InexactOracle,
    L1_LINF_NORMS,
    L2_NORMS,
    OracleReply,
    Point,
    Problem,
    as_point,
)
from .oracles import (
    HoelderInfo,
    NoiseSpec,
    PowerObjective,
    QuadraticObjective,
    with_noise,
)
from .prox import (
    CompositeTerm,
    SetDescriptor,
    entropy_simplex_setup,
    euclidean_setup,
    soft_threshold,
)

__all__ = ["make_problem", "project_simplex", "PROBLEM_BUILDERS"]


def project_simplex(v) -> np.ndarray:
    """Euclidean projection onto the standard simplex (sort-based, exact)."""
    v = np.asarray(v, dtype=float)
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    idx = np.arange(1, v.size + 1)
    rho = np.nonzero(u - css / idx > 0)[0][-1]
    theta = css[rho] / (rho + 1.0)
    return np.maximum(v - theta, 0.0)


def _quad1d() -> Problem:
    """f(t) = t^2 / 2 on the line, prox centered at 3."""
    oracle = QuadraticObjective(np.array([[1.0]]))
    setup = euclidean_setup(SetDescriptor("all", 1), center=[3.0])
    return Problem(oracle, setup, name="quad1d",
                   f_star=0.0, x_star=np.zeros(1))


def _quad10() -> Problem:
    """10-D quadratic with spread spectrum and a known minimizer."""
    diag = np.linspace(1.0, 10.0, 10)
    x_star = np.cos(np.arange(10))
    Q = np.diag(diag)
    c = -Q @ x_star
    oracle = QuadraticObjective(Q, c)
    setup = euclidean_setup(SetDescriptor("all", 10), center=np.zeros(10))
    return Problem(oracle, setup, name="quad10",
                   f_star=oracle.reference(x_star), x_star=x_star)


def _power(nu: float) -> Problem:
    """|<a, x> - b|^(1+nu)/(1+nu) in 2-D; optimum is the nearest hyperplane point."""
    a = np.array([1.0, 0.5])
    b = 0.25
    oracle = PowerObjective(a, b, nu)
    center = np.array([1.0, -0.5])
    setup = euclidean_setup(SetDescriptor("all", 2), center=center)
    # projection of the prox center onto the solution hyperplane: the optimum
    # minimizing d among all minimizers of f
    t = (b - a @ center) / (a @ a)
    x_star = center + t * a
    return Problem(oracle, setup, name=f"power{nu:g}",
                   f_star=0.0, x_star=x_star)


def _l1quad(lam: float = 0.1) -> Problem:
    """Separable quadratic plus lam * ||x||_1; optimum by soft-thresholding."""
    q = np.array([1.0, 2.0, 0.5, 4.0])
    v = np.array([0.8, -0.05, 0.6, -0.3])
    Q = np.diag(q)
    c = -q * v
    oracle = QuadraticObjective(Q, c)
    comp = CompositeTerm("l1", lam)
    setup = euclidean_setup(SetDescriptor("all", 4), center=np.zeros(4),
                            composite=comp)
    x_star = soft_threshold(v, lam / q)
    f_star = oracle.reference(x_star) + comp.evaluate(x_star)
    prob = Problem(oracle, setup, name="l1quad", f_star=f_star, x_star=x_star)
    return prob


def _simplex_quad() -> Problem:
    """Linear-plus-smooth objective on the simplex with the entropy setup."""
    n = 5
    v = np.array([0.9, -0.2, 0.4, 0.1, -0.5])
    c = np.array([0.3, 0.0, -0.1, 0.2, 0.4])
    # f(x) = <c, x> + 1/2 ||x - v||^2 = 1/2 ||x - (v - c)||^2 + const
    Q = np.eye(n)
    lin = c - v
    oracle = QuadraticObjective(Q, lin)
    oracle.norms = L1_LINF_NORMS
    const = 0.5 * float(v @ v)
    setup = entropy_simplex_setup(n)
    x_star = project_simplex(v - c)
    f_star = oracle.reference(x_star)
    prob = Problem(oracle, setup, name="simplex_quad",
                   f_star=f_star, x_star=x_star)
    return prob


class _TridiagonalObjective(InexactOracle):
    """f(x) = 1/2 x^T T x - x_1 with T = tridiag(-1, 2, -1), exact oracle.

    The classic hard smooth instance: any first-order method needs on the
    order of n iterations to beat the k^{-2} rate, which makes the problem
    exhibit the theoretical convergence exponent over a long window.  The
    matrix-vector product is computed bandwise in O(n).
    """

    def __init__(self, n: int):
        self.dim = n
        self.norms = L2_NORMS
        # largest eigenvalue of T is 2(1 - cos(n pi / (n+1))) < 4
        lam_max = 2.0 * (1.0 - np.cos(np.pi * n / (n + 1.0)))
        self.smoothness = HoelderInfo(1.0, lam_max)
        self.delta_u = 0.0

    def _Tx(self, x):
        y = 2.0 * x
        y[:-1] -= x[1:]
        y[1:] -= x[:-1]
        return y

    def reference(self, x: Point) -> float:
        x = as_point(x)
        return 0.5 * float(x @ self._Tx(x)) - float(x[0])

    def query(self, x: Point, delta_c: float) -> OracleReply:
        x = as_point(x)
        g = self._Tx(x)
        g[0] -= 1.0
        return OracleReply(0.5 * float(x @ g) - 0.5 * float(x[0]), g)


def _worstcase(n: int = 2000) -> Problem:
    """Tridiagonal worst-case smooth quadratic; slow to solve by design.

    The minimizer is x*_i = 1 - i/(n+1) and f* = -n / (2 (n+1)).
    """
    oracle = _TridiagonalObjective(n)
    setup = euclidean_setup(SetDescriptor("all", n), center=np.zeros(n))
    x_star = 1.0 - np.arange(1, n + 1) / (n + 1.0)
    return Problem(oracle, setup, name=f"worstcase{n}",
                   f_star=-n / (2.0 * (n + 1.0)), x_star=x_star)


def _specquad(lam_min: float = 1e-8, per_decade: int = 12,
              scale: float = 1.0) -> Problem:
    """Diagonal quadratic with geometrically spaced eigenvalues.

    Starting with unit energy in every mode, a first-order method damps the
    mode at eigenvalue lam only after about (1/lam)^(1/p) iterations, so the
    surviving energy -- and hence the true gap -- decays like k^(-p).  This
    makes the problem a clean probe of the convergence exponent.
    """
    ndec = int(np.ceil(-np.log10(lam_min)))
    n = ndec * per_decade + 1
    lam = np.logspace(0.0, np.log10(lam_min), n)
    oracle = QuadraticObjective(np.diag(lam))
    setup = euclidean_setup(SetDescriptor("all", n),
                            center=scale * np.ones(n))
    return Problem(oracle, setup, name="specquad",
                   f_star=0.0, x_star=np.zeros(n))


def _scale1d(d_star: float = 0.02, nu: float = 0.0) -> Problem:
    """1-D nonsmooth |t|^(1+nu) objective with a small starting distance.

    The prox center sits at distance sqrt(2 * d_star) from the kink, so
    runs at several target accuracies stay short enough to measure
    iteration-count scaling.
    """
    oracle = PowerObjective(np.array([1.0]), 0.0, nu)
    center = float(np.sqrt(2.0 * d_star))
    setup = euclidean_setup(SetDescriptor("all", 1), center=[center])
    return Problem(oracle, setup, name=f"scale1d{nu:g}",
                   f_star=0.0, x_star=np.zeros(1))


def _boxquad() -> Problem:
    """Well-conditioned quadratic on a small box (for noise experiments)."""
    n = 2
    x_star = np.array([0.1, -0.05])
    Q = np.eye(n)
    c = -x_star
    oracle = QuadraticObjective(Q, c)
    lo = x_star - 0.25
    hi = x_star + 0.25
    setup = euclidean_setup(SetDescriptor("box", n, lo=lo, hi=hi),
                            center=x_star + 0.2)
    return Problem(oracle, setup, name="boxquad",
                   f_star=oracle.reference(x_star), x_star=x_star)


def _strongquad(cond: float = 50.0) -> Problem:
    """1-strongly convex anisotropic quadratic for the restart scheme."""
    n = 8
    diag = np.linspace(1.0, cond, n)
    x_star = np.sin(1.0 + np.arange(n))
    Q = np.diag(diag)
    c = -diag * x_star
    oracle = QuadraticObjective(Q, c)
    setup = euclidean_setup(SetDescriptor("all", n), center=np.zeros(n))
    return Problem(oracle, setup, name="strongquad",
                   f_star=oracle.reference(x_star), x_star=x_star)


def _abs1d(center: float = 1.0) -> Problem:
    """f(t) = |t| on the line, prox centered away from the kink."""
    oracle = PowerObjective(np.array([1.0]), 0.0, 0.0)
    setup = euclidean_setup(SetDescriptor("all", 1), center=[center])
    return Problem(oracle, setup, name="abs1d",
                   f_star=0.0, x_star=np.zeros(1))


PROBLEM_BUILDERS = {
    "quad1d": _quad1d,
    "quad10": _quad10,
    "power0": lambda: _power(0.0),
    "power05": lambda: _power(0.5),
    "l1quad": _l1quad,
    "simplex_quad": _simplex_quad,
    "worstcase": _worstcase,
    "specquad": _specquad,
    "scale1d": _scale1d,
    "boxquad": _boxquad,
    "strongquad": _strongquad,
    "abs1d": _abs1d,
}


def make_problem(name: str, noise: NoiseSpec = None, **kwargs) -> Problem:
    """Instantiate a registered problem, optionally wrapping its oracle in noise."""
    if name not in PROBLEM_BUILDERS:
        raise KeyError(f"unknown problem {name!r}; "
                       f"known: {sorted(PROBLEM_BUILDERS)}")
    prob = PROBLEM_BUILDERS[name](**kwargs)
    if noise is not None and noise.delta_u > 0:
        prob.oracle = with_noise(prob.oracle, noise)
    return prob
