"""Linear-algebra kernel: LU solves with loud singularity detection.

Newton steps near the solvability boundary run into nearly singular
Jacobians; the solver must report that deterministically instead of
returning garbage.  A factorization is declared singular when its smallest
pivot magnitude drops below ``SINGULARITY_RTOL`` times the largest one.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.linalg import get_lapack_funcs
from scipy.sparse import linalg as sparse_linalg

__all__ = [
    "LinearSolveReport",
    "solve_linear",
    "condition_estimate",
    "SINGULARITY_RTOL",
]

#: Relative pivot threshold below which a factorization counts as singular.
SINGULARITY_RTOL = 1e-12

# LAPACK LU routines bound once; the scipy wrappers add per-call overhead
# that dominates on the tiny systems Newton hammers on.
_GETRF, _GETRS = get_lapack_funcs(("getrf", "getrs"), (np.empty((1, 1)),))


@dataclass(frozen=True)
class LinearSolveReport:
    """Result of one LU solve.

    ``solution`` is None when ``singular_flag`` is set.  ``log_abs_det`` is
    the natural log of |det| from the pivot magnitudes (-inf when a pivot is
    exactly zero); it is exposed as a cheap proximity diagnostic for the
    solvability boundary.
    """

    solution: np.ndarray | None
    log_abs_det: float
    singular_flag: bool


def _log_abs_det(pivots: np.ndarray) -> float:
    if pivots.size and pivots.min() > 0.0:
        return float(np.log(pivots).sum())
    return float("-inf")


def solve_linear(a, b) -> LinearSolveReport:
    """Solve ``a @ x = b`` by LU with partial pivoting.

    Accepts dense arrays or scipy sparse matrices.  Never raises on a
    singular matrix; the report's ``singular_flag`` carries that outcome.
    """
    b = np.asarray(b, dtype=float)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError(f"matrix must be square, got shape {a.shape}")
    if b.shape != (n,):
        raise ValueError(f"rhs has shape {b.shape}, expected ({n},)")

    if sparse.issparse(a):
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                lu = sparse_linalg.splu(sparse.csc_matrix(a))
        except RuntimeError:
            return LinearSolveReport(None, float("-inf"), True)
        pivots = np.abs(lu.U.diagonal())
        logdet = _log_abs_det(pivots)
        if pivots.max() == 0.0 or pivots.min() < SINGULARITY_RTOL * pivots.max():
            return LinearSolveReport(None, logdet, True)
        return LinearSolveReport(lu.solve(b), logdet, False)

    a = np.asarray(a, dtype=float)
    lu, piv, info = _GETRF(a)
    if info < 0:
        raise ValueError(f"illegal value in LU factorization (arg {-info})")
    pivots = np.abs(lu.diagonal())
    logdet = _log_abs_det(pivots)
    pmax = pivots.max() if n else 0.0
    if n and (
        info > 0 or pmax == 0.0 or pivots.min() < SINGULARITY_RTOL * pmax
    ):
        return LinearSolveReport(None, logdet, True)
    x, info = _GETRS(lu, piv, b)
    if info != 0:
        raise ValueError(f"LU back-substitution failed (info {info})")
    return LinearSolveReport(x, logdet, False)


def condition_estimate(a) -> float:
    """Condition number estimate, ``inf`` for (near-)singular input.

    Dense matrices get the exact 2-norm condition number from singular
    values; sparse ones a 1-norm estimate via ``onenormest`` on the inverse
    operator.  Either way the result is within a factor of a few of the
    truth, which is all the diagnostics need: near the solvability boundary
    the value blows up by orders of magnitude.
    """
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError(f"matrix must be square, got shape {a.shape}")

    if sparse.issparse(a) and n > 4:
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                lu = sparse_linalg.splu(sparse.csc_matrix(a))
        except RuntimeError:
            return float("inf")
        pivots = np.abs(lu.U.diagonal())
        if pivots.max() == 0.0 or pivots.min() < SINGULARITY_RTOL * pivots.max():
            return float("inf")
        op = sparse_linalg.LinearOperator(
            (n, n),
            matvec=lu.solve,
            rmatvec=lambda v: lu.solve(v, trans="T"),
        )
        norm_a = float(np.max(np.abs(a).sum(axis=0)))
        norm_inv = float(sparse_linalg.onenormest(op))
        return max(norm_a * norm_inv, 1.0)

    dense = a.toarray() if sparse.issparse(a) else np.asarray(a, dtype=float)
    try:
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            cond = float(np.linalg.cond(dense, 2))
    except np.linalg.LinAlgError:
        return float("inf")
    if not np.isfinite(cond):
        return float("inf")
    return max(cond, 1.0)
