"""Dense linear algebra primitives and seeded Gaussian initialization.

All matrices in this package are plain ``numpy.ndarray`` objects with dtype
float64 and C (row-major) memory layout; a matrix of shape ``(rows, cols)``
stores samples column-wise throughout the training code.  The helpers here
add the shape checking, the explicit error types, and the reproducible
random initialization that the rest of the package relies on.

Operations never mutate their array arguments.  Random streams advance when
drawn from; that is their purpose.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

__all__ = [
    "DimensionMismatchError",
    "SingularMatrixError",
    "SeededRng",
    "as_matrix",
    "matmul",
    "transpose",
    "solve_least_squares_direct",
    "solve_normal_equations",
    "solve_spd",
    "gaussian_matrix",
]


class DimensionMismatchError(ValueError):
    """Raised when operand shapes are incompatible."""


class SingularMatrixError(np.linalg.LinAlgError):
    """Raised when a direct factorization detects a (numerically) singular system.

    Callers that can tolerate rank deficiency should fall back to the
    iterative solver in :mod:`admmnet.lsmr`, which always returns.
    """


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce ``a`` to a 2-D float64 C-contiguous array, validating finiteness."""
    out = np.ascontiguousarray(a, dtype=np.float64)
    if out.ndim != 2:
        raise DimensionMismatchError(f"{name} must be 2-D, got shape {out.shape}")
    if not np.all(np.isfinite(out)):
        raise ValueError(f"{name} contains non-finite entries")
    return out


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix product ``a @ b`` with an explicit shape check.

    Raises
    ------
    DimensionMismatchError
        If the inner dimensions disagree; the message names both shapes.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 2 or b.ndim != 2:
        raise DimensionMismatchError(
            f"matmul expects 2-D operands, got {a.shape} and {b.shape}"
        )
    if a.shape[1] != b.shape[0]:
        raise DimensionMismatchError(
            f"matmul inner dimensions disagree: {a.shape} x {b.shape}"
        )
    return a @ b


def transpose(a: np.ndarray) -> np.ndarray:
    """Transpose returned as a fresh row-major array (never a view)."""
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2:
        raise DimensionMismatchError(f"transpose expects a 2-D array, got {a.shape}")
    return np.ascontiguousarray(a.T)


def solve_normal_equations(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Least-squares solve via the normal equations and a Cholesky factorization.

    Minimizes ``||a @ x - b||_2`` column-wise for a matrix right-hand side
    ``b`` of shape ``(m, k)``, returning ``x`` of shape ``(n, k)``.  This is
    the direct, inversion-style path; the iterative alternative lives in
    :mod:`admmnet.lsmr`.

    Raises
    ------
    SingularMatrixError
        If ``a.T @ a`` is not positive definite, i.e. ``a`` is rank deficient
        (or numerically so).
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 2 or b.ndim != 2:
        raise DimensionMismatchError(
            f"expected 2-D operands, got {a.shape} and {b.shape}"
        )
    if b.shape[0] != a.shape[0]:
        raise DimensionMismatchError(
            f"right-hand side has {b.shape[0]} rows, matrix has {a.shape[0]}"
        )
    try:
        return solve_spd(a.T @ a, a.T @ b)
    except SingularMatrixError as exc:
        raise SingularMatrixError(
            f"normal equations are singular for matrix of shape {a.shape}"
        ) from exc


def solve_spd(g: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve ``g @ x = b`` for symmetric positive definite ``g`` by Cholesky.

    ``b`` may be a matrix of stacked right-hand-side columns.  Raises
    :class:`SingularMatrixError` when the factorization fails, i.e. ``g``
    is not (numerically) positive definite.
    """
    g = np.asarray(g, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {g.shape}")
    if b.shape[0] != g.shape[0]:
        raise DimensionMismatchError(
            f"right-hand side has {b.shape[0]} rows, matrix has {g.shape[0]}"
        )
    try:
        factor = scipy.linalg.cho_factor(g, lower=True, check_finite=False)
    except scipy.linalg.LinAlgError as exc:
        raise SingularMatrixError(
            f"matrix of shape {g.shape} is not positive definite"
        ) from exc
    return scipy.linalg.cho_solve(factor, b, check_finite=False)


def solve_least_squares_direct(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve ``argmin_x ||a @ x - b||_2`` for a single right-hand side vector.

    ``a`` must have full column rank (n <= m) or be square nonsingular; a
    rank-deficient system raises :class:`SingularMatrixError`.  On success
    the residual is orthogonal to the column space of ``a``.
    """
    b = np.asarray(b, dtype=np.float64)
    if b.ndim != 1:
        raise DimensionMismatchError(f"b must be a vector, got shape {b.shape}")
    return solve_normal_equations(a, b[:, None])[:, 0]


class SeededRng:
    """PCG64-backed random stream with an explicit 64-bit seed.

    The generator algorithm is numpy's PCG64; the uniform doubles it emits
    are a pure function of the seed, so identical seeds reproduce identical
    streams on every platform.  ``split`` derives child seeds from the seed
    alone (not from the stream position), so it is safe to call at any time.
    """

    def __init__(self, seed: int):
        if not (0 <= int(seed) < 2**64):
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
        self.seed = int(seed)
        self._gen = np.random.Generator(np.random.PCG64(self.seed))

    def uniform(self, n: int) -> np.ndarray:
        """Draw ``n`` uniform doubles in [0, 1), advancing the stream."""
        return self._gen.random(n)

    def split(self, count: int) -> list["SeededRng"]:
        """Derive ``count`` independent child streams.

        Child ``i`` is seeded with the ``i``-th 64-bit word of the seed's
        ``SeedSequence`` expansion; the word at index ``i`` does not depend
        on ``count``, so requesting more children later extends the same
        family.
        """
        words = np.random.SeedSequence(self.seed).generate_state(count, np.uint64)
        return [SeededRng(int(w)) for w in words]

    def __repr__(self) -> str:
        return f"SeededRng(seed={self.seed})"


def gaussian_matrix(rng: SeededRng, rows: int, cols: int, std: float) -> np.ndarray:
    """Matrix with i.i.d. N(0, std^2) entries drawn from ``rng``.

    Sampling uses the Box-Muller transform over the PCG64 uniform stream and
    consumes exactly ``2 * ceil(rows * cols / 2)`` uniform draws, so the
    stream position after a call depends only on the requested shape.
    """
    if std <= 0:
        raise ValueError(f"std must be positive, got {std}")
    if rows < 1 or cols < 1:
        raise ValueError(f"matrix shape must be positive, got {rows}x{cols}")
    n = rows * cols
    pairs = (n + 1) // 2
    # 1 - u keeps the argument of log strictly positive.
    u1 = 1.0 - rng.uniform(pairs)
    u2 = rng.uniform(pairs)
    radius = np.sqrt(-2.0 * np.log(u1))
    angle = 2.0 * np.pi * u2
    samples = np.concatenate([radius * np.cos(angle), radius * np.sin(angle)])[:n]
    return std * samples.reshape(rows, cols)
