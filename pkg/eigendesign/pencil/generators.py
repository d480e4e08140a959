"""
Random test pencils.

Coefficient matrices are symmetric with entries uniform in [-0.2, 0.2];
A0 and B0 are the identity plus a small positive definite bump. Draws that are
not positive definite over the feasible set are rejected.
"""
import logging

import numpy as np

from eigendesign.exceptions import PencilError
from eigendesign.pencil.pencil import MatrixPencil, QuadraticMassPencil, pencil_lambda1

logger = logging.getLogger(__name__)

ENTRY_RANGE = 0.2
BUMP_SCALE = 0.1
MAX_ATTEMPTS = 1000


def _random_symmetric(rng: np.random.Generator, n: int, count: int) -> np.ndarray:
    raw = rng.uniform(-ENTRY_RANGE, ENTRY_RANGE, size=(count, n, n))
    upper = np.triu(raw)
    return upper + np.swapaxes(np.triu(raw, 1), -1, -2)


def _identity_bump(rng: np.random.Generator, n: int) -> np.ndarray:
    G = rng.standard_normal((n, n))
    return np.eye(n) + BUMP_SCALE * (G @ G.T) / n


def _constraint(p: int, equality: bool):
    if not equality:
        return None, None
    return np.ones(p), 0.5 * p


def random_affine_pencil(rng: np.random.Generator, n: int, p: int, equality: bool = False, name: str = "affine") -> MatrixPencil:
    """Affine pencil over [0, 1]^p, cut by sum(theta) = p/2 when `equality` is set."""
    weights, target = _constraint(p, equality)
    for attempt in range(1, MAX_ATTEMPTS + 1):
        try:
            pencil = MatrixPencil(
                A0=_identity_bump(rng, n),
                A=_random_symmetric(rng, n, p),
                B0=_identity_bump(rng, n),
                B=_random_symmetric(rng, n, p),
                lower=np.zeros(p),
                upper=np.ones(p),
                weights=weights,
                target=target,
                name=name,
            )
            pencil.verify(rng)
        except PencilError:
            continue
        logger.debug("%s: n=%d p=%d accepted after %d draws", name, n, p, attempt)
        return pencil
    raise PencilError(f"No positive definite pencil with n={n}, p={p} after {MAX_ATTEMPTS} draws")


def multiplicity_two_pencil(rng: np.random.Generator, n: int, p: int, equality: bool = False, name: str = "double") -> MatrixPencil:
    """
    Affine pencil whose first eigenvalue is double at the centre of the feasible set.

    With B* = B(theta*) = L L^T and a random orthogonal Q, the matrix
    A* = L Q diag(mu) Q^T L^T has generalized eigenvalues mu against B*;
    mu starts with a repeated 1. A0 is shifted so that A(theta*) = A*.
    """
    if n < 2:
        raise PencilError("A double eigenvalue needs n >= 2")
    weights, target = _constraint(p, equality)
    for attempt in range(1, MAX_ATTEMPTS + 1):
        try:
            draft = random_affine_pencil(rng, n, p, equality, name)
            centre = draft.vertices().mean(axis=0)
            _, B_star = draft.matrices(centre)
            L = np.linalg.cholesky(B_star)
            Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
            mu = np.concatenate([[1.0, 1.0], np.sort(rng.uniform(1.5, 3.0, size=n - 2))])
            A_star = L @ Q @ np.diag(mu) @ Q.T @ L.T
            A_star = 0.5 * (A_star + A_star.T)
            pencil = MatrixPencil(
                A0=A_star - np.einsum("p,pij->ij", centre, draft.A),
                A=draft.A,
                B0=draft.B0,
                B=draft.B,
                lower=draft.lower,
                upper=draft.upper,
                weights=weights,
                target=target,
                degenerate_point=centre,
                name=name,
            )
            pencil.verify(rng)
            _, basis = pencil_lambda1(pencil, centre)
        except (PencilError, np.linalg.LinAlgError):
            continue
        if basis.shape[1] == 2:
            logger.debug("%s: n=%d p=%d accepted after %d draws", name, n, p, attempt)
            return pencil
    raise PencilError(f"No double-eigenvalue pencil with n={n}, p={p} after {MAX_ATTEMPTS} draws")


def quadratic_control_pencil(rng: np.random.Generator, n: int = 4, name: str = "quadratic-control") -> QuadraticMassPencil:
    """
    One-parameter control pencil on [-1, 1] with B(theta) = I - theta^2 * b b^T / 2.

    A has eigenvalue 1 on b and eigenvalues of at least 3 elsewhere, so
    lambda1 = 1 / (1 - theta^2 / 2) on the whole interval: an even function
    growing with |theta|. A pair (theta, theta') of opposite signs with
    |theta| < |theta'| breaks the subgradient inequality.
    """
    Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    spectrum = np.concatenate([[1.0], 3.0 + np.sort(rng.uniform(0.0, 1.0, size=n - 1))])
    A0 = Q @ np.diag(spectrum) @ Q.T
    A0 = 0.5 * (A0 + A0.T)
    b = Q[:, :1]
    return QuadraticMassPencil(
        A0=A0,
        A=np.zeros((1, n, n)),
        B0=np.eye(n),
        B=0.5 * (b @ b.T)[None],
        lower=-np.ones(1),
        upper=np.ones(1),
        name=name,
    )
