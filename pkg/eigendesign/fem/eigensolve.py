"""
Smallest eigenpair of the symmetric-definite pencil A u = lambda B u.

Shift-invert subspace iteration at shift 0: A is factorized once per call,
each sweep solves A Y = B X and a Rayleigh-Ritz step on the block keeps the
iterates B-orthonormal. Convergence is declared on the relative residual
||A u - lambda B u|| / ||A u|| of the lowest Ritz pair.
"""
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from eigendesign.exceptions import EigenSolveError, FactorizationError

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 500
BLOCK_SIZE = 4


@dataclass(frozen=True, eq=False)
class EigenPair:
    """
    Lowest eigenpair with u^T B u = 1.

    Attributes:
        lambda1: smallest eigenvalue
        u: eigenvector over the free dofs
        residual_norm: ||A u - lambda1 B u|| / ||A u||
        iterations: subspace sweeps performed
        lambda2_estimate: second Ritz value of the final block (nan for 1x1 problems)
    """

    lambda1: float
    u: np.ndarray
    residual_norm: float
    iterations: int = 0
    lambda2_estimate: float = float("nan")


def _factorize_spd(A: sp.spmatrix):
    """Sparse LU with diagonal pivoting; a symmetric matrix is SPD iff every pivot is positive."""
    try:
        lu = splu(
            sp.csc_matrix(A),
            permc_spec="MMD_AT_PLUS_A",
            diag_pivot_thresh=0.0,
            options={"SymmetricMode": True},
        )
    except RuntimeError as exc:
        raise FactorizationError(f"Factorization failed: {exc}", error=exc) from exc
    if np.any(lu.U.diagonal() <= 0.0):
        raise FactorizationError("Stiffness matrix is not positive definite")
    return lu


def _initial_block(n: int, k: int, x0: Optional[np.ndarray]) -> np.ndarray:
    # deterministic start: smooth modes over the dof index, warm start in column 0
    idx = (np.arange(n) + 0.5) / n
    block = np.column_stack([np.ones(n)] + [np.cos(np.pi * j * idx) + 0.1 * j * idx for j in range(1, k)])
    if x0 is not None:
        block[:, 0] = x0
    return block


def smallest_eigenpair(
    A: sp.spmatrix,
    B: sp.spmatrix,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    x0: Optional[np.ndarray] = None,
) -> EigenPair:
    """
    Minimal eigenvalue of A u = lambda B u with a B-normalized eigenvector.

    Args:
        A: symmetric positive definite matrix
        B: symmetric positive definite matrix of the same size
        tol: relative residual at which to stop
        max_iter: maximum number of subspace sweeps
        x0: optional warm start vector

    Returns:
        EigenPair; the eigenvector sign is fixed so its largest entry is positive
    """
    n = A.shape[0]
    if A.shape != (n, n) or B.shape != (n, n):
        raise EigenSolveError(f"Pencil dimensions differ: A {A.shape}, B {B.shape}")
    if n == 0:
        raise EigenSolveError("Empty pencil")

    A = sp.csr_matrix(A)
    B = sp.csr_matrix(B)
    lu = _factorize_spd(A)
    k = min(BLOCK_SIZE, n)
    X = _initial_block(n, k, x0)

    residual = np.inf
    for iteration in range(1, max_iter + 1):
        Y = lu.solve(np.asarray(B @ X))
        AY = np.asarray(A @ Y)
        BY = np.asarray(B @ Y)
        try:
            ritz, S = sla.eigh(Y.T @ AY, Y.T @ BY)
        except (sla.LinAlgError, ValueError) as exc:
            raise FactorizationError("Mass matrix is not positive definite on the iteration block", error=exc) from exc
        X = Y @ S
        AX = AY @ S
        BX = BY @ S

        lam = float(ritz[0])
        if lam <= 0.0:
            raise FactorizationError(f"Pencil is not positive definite (Ritz value {lam:.3e})")
        u = X[:, 0]
        Au = AX[:, 0]
        residual = float(np.linalg.norm(Au - lam * BX[:, 0]) / np.linalg.norm(Au))
        if residual <= tol:
            # largest entry positive
            if u[np.argmax(np.abs(u))] < 0:
                u = -u
            logger.debug("Eigensolve converged in %d sweeps, lambda1=%.12g, residual=%.2e", iteration, lam, residual)
            return EigenPair(
                lambda1=lam,
                u=u,
                residual_norm=residual,
                iterations=iteration,
                lambda2_estimate=float(ritz[1]) if k > 1 else float("nan"),
            )

    raise EigenSolveError(
        f"Eigensolver did not converge in {max_iter} sweeps (last residual {residual:.3e})",
        residual=residual,
        iterations=max_iter,
    )


def rayleigh_quotient(A: sp.spmatrix, B: sp.spmatrix, u: np.ndarray) -> float:
    """u^T A u / u^T B u."""
    u = np.asarray(u, dtype=float)
    if not np.any(u):
        raise EigenSolveError("Rayleigh quotient of the zero vector")
    return float(u @ (A @ u)) / float(u @ (B @ u))
