"""Iterative least-squares solver built on Golub-Kahan bidiagonalization.

This is the LSMR recurrence of Fong and Saunders: one Golub-Kahan step per
iteration, two QR rotations folding the lower bidiagonal into the solution
update, and cheap running estimates of ``||r||``, ``||A^T r||``, ``||A||``.
It minimizes ``||a x - b||_2`` for any rectangular ``a`` without forming
``a^T a`` or any inverse, which is the whole point: the same recurrence is
what replaces direct matrix inversion inside the ADMM weight and activation
updates.

Two deliberate departures from the full reference algorithm, both because
the training code never needs them:

* no damping term (plain least squares only);
* no condition-number stop (``atol``/``btol`` plus the iteration cap
  suffice at the problem sizes this package targets).

The core runs a whole batch of right-hand sides through the recurrence at
once (each column carries its own scalar state), so solving ``k`` systems
against one matrix costs two matrix-matrix products per iteration instead
of ``2k`` matrix-vector products.  A column drops out of the batch as soon
as it meets its stopping test; its solution then includes the update of the
iteration that converged it, exactly as in the single-vector algorithm.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .linalg import DimensionMismatchError

__all__ = ["LsmrParams", "LsmrReport", "StopReason", "lsmr_solve", "lsmr_solve_multi"]


class StopReason(enum.Enum):
    """Why an LSMR solve terminated."""

    CONVERGED_RESIDUAL = "converged_residual"
    CONVERGED_NORMAL_RESIDUAL = "converged_normal_residual"
    ITERATION_CAP = "iteration_cap"


@dataclass(frozen=True)
class LsmrParams:
    """Stopping controls for :func:`lsmr_solve`.

    ``atol`` bounds the relative normal-equation residual ``||a^T r||``,
    ``btol`` the relative residual ``||r||``.  ``max_iters=None`` means
    "auto": ``min(m, n)`` iterations for an ``m x n`` system, the point at
    which exact arithmetic would have explored the full Krylov space.
    """

    atol: float = 1e-8
    btol: float = 1e-8
    max_iters: int | None = None

    def __post_init__(self):
        if self.atol < 0 or self.btol < 0:
            raise ValueError(f"tolerances must be nonnegative, got {self.atol}, {self.btol}")
        if self.max_iters is not None and self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")

    def resolve_max_iters(self, m: int, n: int) -> int:
        return min(m, n) if self.max_iters is None else self.max_iters


@dataclass
class LsmrReport:
    """Outcome of a single-vector solve.

    ``final_residual_norm`` is the recurrence's running estimate of
    ``||a x - b||`` at termination (not a recomputed product).  When the
    solve was run with ``log_progress=True``, ``residual_norms`` holds that
    estimate after each iteration and ``iterates`` the corresponding
    solution vectors, one row per iteration.
    """

    iterations: int
    stop_reason: StopReason
    final_residual_norm: float
    residual_norms: np.ndarray | None = None
    iterates: np.ndarray | None = None


_REASON_CODES = {
    1: StopReason.CONVERGED_RESIDUAL,
    2: StopReason.CONVERGED_NORMAL_RESIDUAL,
    3: StopReason.ITERATION_CAP,
}


def _safe_div(num, den):
    """Element-wise num/den with 0 where den == 0 (frozen or degenerate columns)."""
    with np.errstate(divide="ignore", invalid="ignore"):
        out = num / den
    return np.where(den != 0.0, out, 0.0)


def _sym_ortho(a, b):
    """Vectorized stable Givens rotation: returns (c, s, r) with r = hypot(a, b).

    Follows the reference algorithm's sign conventions; (0, 0) maps to
    (0, 0, 0) and downstream divisions guard against the zero radius.
    """
    r = np.hypot(a, b)
    c = _safe_div(a, r)
    s = _safe_div(b, r)
    # b == 0 with a != 0 must give the identity rotation carrying a's sign.
    only_a = (b == 0.0) & (a != 0.0)
    c = np.where(only_a, np.sign(a), c)
    s = np.where(only_a, 0.0, s)
    return c, s, r


def _lsmr_batch(a: np.ndarray, b: np.ndarray, params: LsmrParams, log_progress: bool):
    """Run the LSMR recurrence on all columns of ``b`` simultaneously.

    Returns ``(x, iterations, reason_codes, final_normr, residual_log,
    iterate_log)`` where the per-column arrays have length ``k``.
    """
    m, n = a.shape
    k = b.shape[1]
    maxiter = params.resolve_max_iters(m, n)
    eps = np.finfo(np.float64).eps

    x = np.zeros((n, k))
    iterations = np.zeros(k, dtype=np.int64)
    reason = np.zeros(k, dtype=np.int8)

    normb = np.linalg.norm(b, axis=0)
    beta = normb.copy()
    u = np.where(beta > 0.0, _safe_div(b, beta), b)
    v = a.T @ u
    alpha = np.linalg.norm(v, axis=0)
    v = np.where(alpha > 0.0, _safe_div(v, alpha), v)

    # b = 0: x = 0 is exact.  alpha = 0 with b != 0: a^T b = 0, so x = 0
    # already zeroes the normal-equation residual.
    reason[normb == 0.0] = 1
    reason[(normb > 0.0) & (alpha == 0.0)] = 2
    active = reason == 0
    normr = normb.copy()

    residual_log: list[np.ndarray] = []
    iterate_log: list[np.ndarray] = []

    if not active.any():
        return x, iterations, reason, normr, residual_log, iterate_log

    zetabar = alpha * beta
    alphabar = alpha.copy()
    rho = np.ones(k)
    rhobar = np.ones(k)
    cbar = np.ones(k)
    sbar = np.zeros(k)
    zeta = np.zeros(k)

    h = v.copy()
    hbar = np.zeros((n, k))

    # Running estimates for ||r||, per the reference recurrence (undamped).
    betadd = beta.copy()
    betad = np.zeros(k)
    rhodold = np.ones(k)
    tautildeold = np.zeros(k)
    thetatilde = np.zeros(k)
    normA2 = alpha**2

    for itn in range(1, maxiter + 1):
        # Next Golub-Kahan step: beta u = a v - alpha u; alpha v = a^T u - beta v.
        u_new = a @ v - alpha * u
        beta_new = np.linalg.norm(u_new, axis=0)
        has_beta = beta_new > 0.0
        u_new = np.where(has_beta, _safe_div(u_new, beta_new), u_new)
        v_new = a.T @ u_new - beta_new * v
        alpha_new = np.linalg.norm(v_new, axis=0)
        v_new = np.where(alpha_new > 0.0, _safe_div(v_new, alpha_new), v_new)
        # On exact breakdown (beta = 0) the reference keeps the previous v, alpha.
        v_new = np.where(has_beta, v_new, v)
        alpha_new = np.where(has_beta, alpha_new, alpha)

        # Rotation Q_i folds the new subdiagonal into the bidiagonal factor.
        rhoold = rho
        c, s, rho = _sym_ortho(alphabar, beta_new)
        thetanew = s * alpha_new
        alphabar = c * alpha_new

        # Rotation Qbar_i updates the second-level factorization.
        rhobarold = rhobar
        zetaold = zeta
        thetabar = sbar * rho
        cbar, sbar, rhobar = _sym_ortho(cbar * rho, thetanew)
        zeta = cbar * zetabar
        zetabar = -sbar * zetabar

        # Solution update through h and hbar.
        hbar = h - _safe_div(thetabar * rho, rhoold * rhobarold) * hbar
        x_step = x + _safe_div(zeta, rho * rhobar) * hbar
        h = v_new - _safe_div(thetanew, rho) * h

        # ||r|| estimate.
        betahat = c * betadd
        betadd = -s * betadd
        thetatildeold = thetatilde
        ctildeold, stildeold, rhotildeold = _sym_ortho(rhodold, thetabar)
        thetatilde = stildeold * rhobar
        rhodold = ctildeold * rhobar
        betad = -stildeold * betad + ctildeold * betahat
        tautildeold = _safe_div(zetaold - thetatildeold * tautildeold, rhotildeold)
        taud = _safe_div(zeta - thetatilde * tautildeold, rhodold)
        normr_new = np.hypot(betad - taud, betadd)

        normA2 = normA2 + beta_new**2
        normA = np.sqrt(normA2)
        normA2 = normA2 + alpha_new**2
        normar = np.abs(zetabar)
        normx = np.linalg.norm(x_step, axis=0)

        # Commit this iteration's state only on still-active columns.
        write = active
        colmask = write[None, :]
        x = np.where(colmask, x_step, x)
        u = np.where(colmask, u_new, u)
        v = np.where(colmask, v_new, v)
        alpha = np.where(write, alpha_new, alpha)
        beta = np.where(write, beta_new, beta)
        normr = np.where(write, normr_new, normr)
        iterations = np.where(write, itn, iterations)

        if log_progress:
            residual_log.append(normr.copy())
            iterate_log.append(x.copy())

        # Stopping tests of the reference algorithm, minus the conlim test.
        test1 = _safe_div(normr, normb)
        denom = normA * normr
        test2 = np.where(denom > 0.0, _safe_div(normar, denom), 0.0)
        scale = 1.0 + _safe_div(normA * normx, normb)
        t1 = test1 / scale
        rtol = params.btol + params.atol * _safe_div(normA * normx, normb)

        conv_resid = (test1 <= rtol) | (1.0 + t1 <= 1.0)
        conv_normal = (test2 <= params.atol) | (1.0 + test2 <= 1.0) | (normar <= eps * normA.clip(min=1.0))
        newly_resid = active & conv_resid
        newly_normal = active & conv_normal & ~newly_resid
        reason[newly_resid] = 1
        reason[newly_normal] = 2
        active = active & ~(conv_resid | conv_normal)
        if not active.any():
            break

    reason[reason == 0] = 3
    return x, iterations, reason, normr, residual_log, iterate_log


def _check_system(a, b_cols):
    a = np.asarray(a, dtype=np.float64)
    b_cols = np.asarray(b_cols, dtype=np.float64)
    if a.ndim != 2:
        raise DimensionMismatchError(f"matrix must be 2-D, got shape {a.shape}")
    if b_cols.shape[0] != a.shape[0]:
        raise DimensionMismatchError(
            f"right-hand side length {b_cols.shape[0]} does not match matrix rows {a.shape[0]}"
        )
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b_cols))):
        raise ValueError("lsmr inputs must be finite")
    return a, b_cols


def lsmr_solve(
    a: np.ndarray,
    b: np.ndarray,
    params: LsmrParams = LsmrParams(),
    *,
    log_progress: bool = False,
) -> tuple[np.ndarray, LsmrReport]:
    """Approximately minimize ``||a x - b||_2`` for one right-hand side.

    Parameters
    ----------
    a : (m, n) array
    b : (m,) array
    params : LsmrParams
        Tolerances and iteration cap; see :class:`LsmrParams`.
    log_progress : bool
        When true, the report carries the per-iteration residual-norm
        estimates and solution iterates (test/diagnostic use; allocates
        one solution copy per iteration).

    Returns
    -------
    (x, report) : ((n,) array, LsmrReport)

    The solve is deterministic: identical inputs and parameters produce
    bitwise identical outputs.
    """
    b = np.asarray(b, dtype=np.float64)
    if b.ndim != 1:
        raise DimensionMismatchError(f"b must be a vector, got shape {b.shape}")
    a, b_cols = _check_system(a, b[:, None])
    x, iters, reason, normr, res_log, it_log = _lsmr_batch(a, b_cols, params, log_progress)
    report = LsmrReport(
        iterations=int(iters[0]),
        stop_reason=_REASON_CODES[int(reason[0])],
        final_residual_norm=float(normr[0]),
        residual_norms=np.array([r[0] for r in res_log]) if log_progress else None,
        iterates=np.array([xk[:, 0] for xk in it_log]) if log_progress else None,
    )
    return x[:, 0], report


def lsmr_solve_multi(
    a: np.ndarray,
    b_set,
    params: LsmrParams = LsmrParams(),
) -> np.ndarray:
    """Solve ``min ||a x - b||`` for many right-hand sides against one matrix.

    ``b_set`` is a sequence of k length-m vectors (any array-like of shape
    ``(k, m)``).  Row ``i`` of the returned ``(k, n)`` array solves row
    ``i`` of ``b_set`` under the same stopping rules as :func:`lsmr_solve`.
    The solves are independent (each stops on its own test) but vectorized
    over the batch, so a row may differ from a one-at-a-time solve by BLAS
    rounding only.
    """
    b_arr = np.asarray(b_set, dtype=np.float64)
    if b_arr.ndim != 2:
        raise DimensionMismatchError(
            f"b_set must be a sequence of equal-length vectors, got shape {b_arr.shape}"
        )
    if b_arr.shape[0] == 0:
        return np.zeros((0, np.asarray(a).shape[1]))
    a, b_cols = _check_system(a, b_arr.T)
    x, _, _, _, _, _ = _lsmr_batch(a, b_cols, params, log_progress=False)
    return x.T
