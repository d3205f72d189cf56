"""Walk each alternating-update rule through a scalar example.

The network trainer never takes a gradient step; every variable block is
moved to the exact minimizer of its own subproblem while the others stay
fixed.  At scalar size each rule can be checked by hand, which is what
this script does.

    python3 demos/update_rules_by_hand.py
"""

import numpy as np

from admmnet.admm import (
    ActivationKind,
    DirectSolver,
    LossKind,
    activation_update,
    lagrangian_update,
    last_output_update,
    output_update,
    relu,
    weight_update,
)

RELU = ActivationKind.RELU
solver = DirectSolver()

# Weight update: minimize ||w * x - z||^2 over w.  With x = 2 and z = 6
# the answer is just the ratio.
w = weight_update(np.array([[6.0]]), np.array([[2.0]]), solver)
print("weight_update: target 6 / input 2 ->", w[0, 0])

# Hidden activation update: gamma pulls x toward relu(z_l), beta pulls it
# toward explaining the next layer's pre-activation.  With w_next = 1,
# z_next = a, relu(z_l) = c the minimizer is the penalty-weighted blend
# (beta a + gamma c) / (beta + gamma).
x = activation_update(
    np.array([[1.0]]),      # next layer's weight
    np.array([[0.6]]),      # next layer's pre-activation target
    np.array([[-2.0]]),     # this layer's pre-activation (relu gives 0)
    gamma_l=10.0,
    beta_next=1.0,
    activation=RELU,
    solver=solver,
)
print("activation_update: blend (1*0.6 + 10*0) / 11 ->", x[0, 0])

# Hidden pre-activation update: piecewise objective
# gamma (a - relu(z))^2 + beta (z - w)^2 with one candidate per branch.
# A grid scan agrees with the closed form.
a, wterm, gamma, beta = 1.0, -1.0, 10.0, 1.0
z = output_update(np.array([[a]]), np.array([[wterm]]), gamma, beta, RELU)
grid = np.linspace(-10, 10, 200001)
objective = gamma * (a - relu(grid)) ** 2 + beta * (grid - wterm) ** 2
print("output_update: closed form", z[0, 0], "grid argmin", grid[np.argmin(objective)])

# Final-layer output update: (z - y)^2 + beta (z - w)^2 + lam z has the
# stationary point (2y + 2 beta w - lam) / (2 + 2 beta).
y, wterm, lam, beta = 1.0, 0.4, 0.2, 1.0
z_last = last_output_update(
    np.array([[y]]), np.array([[wterm]]), np.array([[lam]]), beta, LossKind.SQUARED
)
by_hand = (2 * y + 2 * beta * wterm - lam) / (2 + 2 * beta)
print("last_output_update: closed form", z_last[0, 0], "by hand", by_hand)

# Multiplier ascent: lam moves by beta times the remaining gap between
# the output variable and the linear prediction.
lam_next = lagrangian_update(
    np.array([[0.2]]), np.array([[0.9]]), np.array([[0.4]]), 2.0
)
print("lagrangian_update: 0.2 + 2*(0.9-0.4) ->", lam_next[0, 0])
