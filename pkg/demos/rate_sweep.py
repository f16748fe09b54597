"""Measure how the convergence exponent follows the policy parameter p.

On a quadratic whose eigenvalues are spread geometrically over eight
decades, the true gap decays like k^(-p): each mode at eigenvalue lam is
damped only after about lam^(-1/p) iterations, so the surviving energy
traces out the interpolated rate.  The script runs p = 1, 1.5, 2 and fits
the log-log slope of the gap series.
"""

from unigrad import SolverConfig, fit_rate, make_problem, run

print(f"{'p':>4} {'fitted slope':>13} {'expected':>9} {'r^2':>8} {'calls':>7}")
for p in (1.0, 1.25, 1.5, 1.75, 2.0):
    problem = make_problem("specquad")
    config = SolverConfig(epsilon=1e-10, L0=1.0, p=p, max_outer=2100)
    result = run(problem, config)
    fit = fit_rate(result.trace, window=(20, 2000), f_star=problem.f_star)
    calls = result.state.oracle_calls + result.state.init_oracle_calls
    print(f"{p:>4.2f} {fit.slope:>13.3f} {-p:>9.2f} {fit.r_squared:>8.4f} "
          f"{calls:>7}")
