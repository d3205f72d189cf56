"""Tour of the iterative least-squares solver.

Builds a few dense systems, solves them with the Golub-Kahan recurrence,
and checks each answer against the factorization-based route.  Run it
from the repository root:

    python3 demos/iterative_solver_tour.py
"""

import numpy as np

from admmnet.linalg import solve_least_squares_direct
from admmnet.lsmr import LsmrParams, lsmr_solve, lsmr_solve_multi

rng = np.random.default_rng(0)

# A tall, well-conditioned 12 x 5 system.  The iterative route never forms
# a^T a; it walks a bidiagonalization of `a` one matrix-vector product at
# a time.
a = rng.normal(size=(12, 5))
b = rng.normal(size=12)

x_iter, report = lsmr_solve(a, b, LsmrParams(), log_progress=True)
x_direct = solve_least_squares_direct(a, b)

print("tall 12x5 system")
print("  stop reason:", report.stop_reason.name)
print("  iterations: ", report.iterations)
print("  agreement:  ", np.linalg.norm(x_iter - x_direct))

# The residual estimate never increases from one iteration to the next.
print("  residual trace:", np.array2string(report.residual_norms, precision=4))

# An inconsistent system: more equations than unknowns, no exact solution.
# Both routes land on the same least-squares minimizer, and the final
# residual matches the true distance from b to the column space.
a = rng.normal(size=(30, 4))
b = rng.normal(size=30)
x_iter, report = lsmr_solve(a, b, LsmrParams())
true_residual = np.linalg.norm(a @ x_iter - b)
print("inconsistent 30x4 system")
print("  estimated residual:", report.final_residual_norm)
print("  recomputed residual:", true_residual)

# The trainer's inner loop solves many right-hand sides against one
# matrix.  The batched entry point runs every column's recurrence in
# lockstep and freezes the ones that converge early.
want = rng.normal(size=(6, 4))          # six solution rows to recover
stacked = want @ a.T                     # six right-hand sides, one per row
solutions = lsmr_solve_multi(a, stacked, LsmrParams())
print("batched solve, 6 right-hand sides")
print("  worst recovery error:", np.abs(solutions - want).max())
