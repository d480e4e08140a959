"""
Parametrized symmetric-definite matrix pencils A(theta) u = lambda B(theta) u.

The parameter ranges over a box, optionally cut by one hyperplane
sum_i w_i theta_i = target with positive weights. For p <= 3 the feasible
polytope is small enough to enumerate its vertices and to grid it densely.
"""
import itertools
import logging
from dataclasses import dataclass, field, replace
from typing import Optional, Tuple

import numpy as np
import scipy.linalg as sla

from eigendesign.exceptions import PencilError

logger = logging.getLogger(__name__)

MULT_TOL = 1e-8
GRID_POINT_CAP = 2_000_000
BATCH_CHUNK = 65_536
_BISECTION_STEPS = 80


def _symmetric(matrix: np.ndarray, what: str) -> np.ndarray:
    matrix = np.array(matrix, dtype=float)
    scale = max(1.0, float(np.max(np.abs(matrix), initial=0.0)))
    if np.max(np.abs(matrix - np.swapaxes(matrix, -1, -2)), initial=0.0) > 1e-12 * scale:
        raise PencilError(f"{what} is not symmetric")
    return 0.5 * (matrix + np.swapaxes(matrix, -1, -2))


@dataclass(frozen=True, eq=False)
class MatrixPencil:
    """
    Affine pencil A(theta) = A0 + sum_i theta_i A_i, B(theta) = B0 + sum_i theta_i B_i.

    Attributes:
        A0, B0: (n, n) symmetric matrices
        A, B: (p, n, n) symmetric coefficient matrices
        lower, upper: (p,) box bounds
        weights, target: optional equality sum_i weights_i theta_i = target
        degenerate_point: optional feasible point where lambda1 is known to be multiple
        name: label used in reports
    """

    A0: np.ndarray
    A: np.ndarray
    B0: np.ndarray
    B: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    weights: Optional[np.ndarray] = None
    target: Optional[float] = None
    degenerate_point: Optional[np.ndarray] = None
    name: str = field(default="pencil")

    def __post_init__(self):
        A0 = _symmetric(self.A0, "A0")
        B0 = _symmetric(self.B0, "B0")
        n = A0.shape[0]
        A = _symmetric(np.reshape(self.A, (-1, n, n)), "A_i")
        B = _symmetric(np.reshape(self.B, (-1, n, n)), "B_i")
        if A0.shape != (n, n) or B0.shape != (n, n) or A.shape != B.shape:
            raise PencilError(f"Inconsistent pencil shapes: A0 {A0.shape}, B0 {B0.shape}, A {A.shape}, B {B.shape}")
        p = A.shape[0]
        lower = np.asarray(self.lower, dtype=float).reshape(p)
        upper = np.asarray(self.upper, dtype=float).reshape(p)
        if np.any(lower > upper):
            raise PencilError("Box has lower > upper")
        for name, value in (("A0", A0), ("B0", B0), ("A", A), ("B", B), ("lower", lower), ("upper", upper)):
            object.__setattr__(self, name, value)

        if (self.weights is None) != (self.target is None):
            raise PencilError("weights and target must be given together")
        if self.weights is not None:
            weights = np.asarray(self.weights, dtype=float).reshape(p)
            if np.any(weights <= 0):
                raise PencilError("Equality weights must be positive")
            target = float(self.target)
            if not weights @ lower - 1e-12 <= target <= weights @ upper + 1e-12:
                raise PencilError(f"Feasible set is empty: target {target!r} outside [{weights @ lower!r}, {weights @ upper!r}]")
            object.__setattr__(self, "weights", weights)
            object.__setattr__(self, "target", target)
        if self.degenerate_point is not None:
            object.__setattr__(self, "degenerate_point", np.asarray(self.degenerate_point, dtype=float).reshape(p))

    @property
    def n(self) -> int:
        return self.A0.shape[0]

    @property
    def p(self) -> int:
        return self.A.shape[0]

    @property
    def free_dims(self) -> int:
        return self.p - (0 if self.weights is None else 1)

    # matrices

    def matrices(self, theta) -> Tuple[np.ndarray, np.ndarray]:
        A, B = self.batch_matrices(np.reshape(theta, (1, self.p)))
        return A[0], B[0]

    def batch_matrices(self, thetas: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        thetas = np.asarray(thetas, dtype=float)
        A = self.A0 + np.einsum("kp,pij->kij", thetas, self.A)
        B = self.B0 + np.einsum("kp,pij->kij", thetas, self.B)
        return A, B

    def derivative_matrices(self, theta) -> Tuple[np.ndarray, np.ndarray]:
        """Partial derivatives dA/dtheta_i and dB/dtheta_i at theta, each (p, n, n)."""
        return self.A, self.B

    def subgradients(self, thetas: np.ndarray, vectors: np.ndarray, lambdas: np.ndarray) -> np.ndarray:
        """g_i = v^T (dA_i - lambda dB_i) v for one B-unit vector per point, shape (k, p)."""
        qa = np.einsum("ki,pij,kj->kp", vectors, self.A, vectors)
        qb = np.einsum("ki,pij,kj->kp", vectors, self.B, vectors)
        return qa - lambdas[:, None] * qb

    def scaled(self, factor: float) -> "MatrixPencil":
        """Same pencil with A replaced by factor * A."""
        return replace(self, A0=factor * self.A0, A=factor * self.A, name=f"{self.name}*{factor:g}")

    # feasible set

    def contains(self, theta, tol: float = 1e-9) -> bool:
        theta = np.asarray(theta, dtype=float)
        inside = bool(np.all(theta >= self.lower - tol) and np.all(theta <= self.upper + tol))
        if self.weights is not None:
            inside = inside and abs(self.weights @ theta - self.target) <= tol
        return inside

    def vertices(self) -> np.ndarray:
        """Vertices of the feasible polytope."""
        bounds = list(zip(self.lower, self.upper))
        if self.weights is None:
            return np.array(list(itertools.product(*bounds)), dtype=float).reshape(-1, self.p)

        points = []
        for i in range(self.p):
            others = [j for j in range(self.p) if j != i]
            for combo in itertools.product(*(bounds[j] for j in others)):
                theta = np.empty(self.p)
                theta[others] = combo
                theta[i] = (self.target - self.weights[others] @ theta[others]) / self.weights[i]
                if self.lower[i] - 1e-12 <= theta[i] <= self.upper[i] + 1e-12:
                    theta[i] = min(max(theta[i], self.lower[i]), self.upper[i])
                    points.append(theta)
        if not points:
            raise PencilError("Feasible set is empty")
        return np.unique(np.round(np.array(points), 12), axis=0)

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        """Random feasible points as Dirichlet combinations of the vertices."""
        vertices = self.vertices()
        mix = rng.dirichlet(np.full(len(vertices), 0.5), size=count)
        return self.project(mix @ vertices)

    def project(self, points: np.ndarray) -> np.ndarray:
        """Euclidean projection of each row onto the feasible set."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if self.weights is None:
            return np.clip(points, self.lower, self.upper)

        w = self.weights
        lo = np.min((points - self.upper) / w, axis=1)
        hi = np.max((points - self.lower) / w, axis=1)
        # sum_i w_i clip(y_i - mu w_i) is nonincreasing in mu
        for _ in range(_BISECTION_STEPS):
            mid = 0.5 * (lo + hi)
            above = np.clip(points - mid[:, None] * w, self.lower, self.upper) @ w > self.target
            lo = np.where(above, mid, lo)
            hi = np.where(above, hi, mid)
        mu = 0.5 * (lo + hi)
        return np.clip(points - mu[:, None] * w, self.lower, self.upper)

    def grid(self, density: int, lower: Optional[np.ndarray] = None, upper: Optional[np.ndarray] = None) -> np.ndarray:
        """
        Feasible points of a regular grid over the free coordinates.

        With an equality the last coordinate is solved for and points leaving
        its bounds are dropped. `lower`/`upper` restrict the free coordinates
        to a sub-box.
        """
        d = self.free_dims
        if d == 0:
            return self.vertices()
        lo = self.lower[:d] if lower is None else np.maximum(lower, self.lower[:d])
        hi = self.upper[:d] if upper is None else np.minimum(upper, self.upper[:d])
        per_axis = min(density, int(GRID_POINT_CAP ** (1.0 / d)))
        if per_axis < density:
            logger.debug("Grid density reduced from %d to %d per axis", density, per_axis)
        axes = [np.linspace(lo[i], hi[i], per_axis) for i in range(d)]
        free = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d)
        if self.weights is None:
            return free
        last = (self.target - free @ self.weights[:-1]) / self.weights[-1]
        keep = (last >= self.lower[-1] - 1e-12) & (last <= self.upper[-1] + 1e-12)
        return np.column_stack([free[keep], np.clip(last[keep], self.lower[-1], self.upper[-1])])

    def verify(self, rng: np.random.Generator, n_samples: int = 64) -> None:
        """Positive definiteness of A and B at every vertex and at random feasible points."""
        points = np.vstack([self.vertices(), self.sample(rng, n_samples)])
        batch_lambda1(self, points)


@dataclass(frozen=True, eq=False)
class QuadraticMassPencil(MatrixPencil):
    """
    Control family with B(theta) = B0 - sum_i theta_i^2 B_i.

    For positive semidefinite B_i the mass is concave in theta, so the first
    eigenvalue need not be pseudo-concave.
    """

    def batch_matrices(self, thetas: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        thetas = np.asarray(thetas, dtype=float)
        A = self.A0 + np.einsum("kp,pij->kij", thetas, self.A)
        B = self.B0 - np.einsum("kp,pij->kij", thetas**2, self.B)
        return A, B

    def derivative_matrices(self, theta) -> Tuple[np.ndarray, np.ndarray]:
        theta = np.asarray(theta, dtype=float).reshape(self.p)
        return self.A, -2.0 * theta[:, None, None] * self.B

    def subgradients(self, thetas: np.ndarray, vectors: np.ndarray, lambdas: np.ndarray) -> np.ndarray:
        qa = np.einsum("ki,pij,kj->kp", vectors, self.A, vectors)
        qb = np.einsum("ki,pij,kj->kp", vectors, self.B, vectors)
        return qa + 2.0 * lambdas[:, None] * thetas * qb


@dataclass(frozen=True, eq=False)
class SubgradientSample:
    """
    Sampled Clarke subgradients of lambda1 at theta.

    Rows of `subgradients`: the m1 eigenbasis gradients, their mean, then one
    row per random B-unit vector of the first eigenspace.
    """

    theta: np.ndarray
    lambda1: float
    multiplicity: int
    basis: np.ndarray
    subgradients: np.ndarray


def pencil_lambda1(pencil: MatrixPencil, theta, mult_tol: float = MULT_TOL) -> Tuple[float, np.ndarray]:
    """
    Smallest generalized eigenvalue at theta and a B-orthonormal basis of its eigenspace.

    Eigenvalues within mult_tol * |lambda1| of lambda1 count as the same eigenvalue.

    Returns:
        Tuple of (lambda1, basis of shape (n, m1))
    """
    A, B = pencil.matrices(theta)
    try:
        sla.cholesky(B)
        eigenvalues, vectors = sla.eigh(A, B)
    except sla.LinAlgError as exc:
        raise PencilError(f"B(theta) is not positive definite at {np.asarray(theta).tolist()}", error=exc) from exc
    lam = float(eigenvalues[0])
    if lam <= 0.0:
        raise PencilError(f"A(theta) is not positive definite at {np.asarray(theta).tolist()}")
    cluster = eigenvalues <= lam + mult_tol * abs(lam)
    return lam, vectors[:, cluster]


def batch_lambda1(pencil: MatrixPencil, thetas: np.ndarray, with_vectors: bool = False):
    """
    lambda1 at many points through batched Cholesky reduction to standard form.

    Returns:
        lambda1 array of shape (k,), plus a (k, n) array of B-unit
        eigenvectors when `with_vectors` is set
    """
    thetas = np.atleast_2d(np.asarray(thetas, dtype=float))
    lambdas = np.empty(len(thetas))
    vectors = np.empty((len(thetas), pencil.n)) if with_vectors else None
    for start in range(0, len(thetas), BATCH_CHUNK):
        chunk = slice(start, start + BATCH_CHUNK)
        A, B = pencil.batch_matrices(thetas[chunk])
        try:
            L = np.linalg.cholesky(B)
        except np.linalg.LinAlgError as exc:
            raise PencilError("B(theta) is not positive definite on the batch", error=exc) from exc
        half = np.linalg.solve(L, A)
        C = np.linalg.solve(L, np.swapaxes(half, -1, -2))
        C = 0.5 * (C + np.swapaxes(C, -1, -2))
        if with_vectors:
            w, Y = np.linalg.eigh(C)
            vectors[chunk] = np.linalg.solve(np.swapaxes(L, -1, -2), Y[:, :, :1])[:, :, 0]
        else:
            w = np.linalg.eigvalsh(C)
        lambdas[chunk] = w[:, 0]
    if np.any(lambdas <= 0.0):
        raise PencilError("A(theta) is not positive definite on the batch")
    return (lambdas, vectors) if with_vectors else lambdas


def sample_clarke_subgradients(
    pencil: MatrixPencil,
    theta,
    n_samples: int,
    rng: Optional[np.random.Generator] = None,
    mult_tol: float = MULT_TOL,
) -> SubgradientSample:
    """
    Subgradients g_j(v) = v^T (A_j - lambda1 B_j) v for B-unit v in the first eigenspace.

    Includes the basis-vector subgradients, their uniform convex combination
    and n_samples random unit vectors of the eigenspace.
    """
    rng = rng if rng is not None else np.random.default_rng(0)
    theta = np.asarray(theta, dtype=float).reshape(pencil.p)
    lam, U = pencil_lambda1(pencil, theta, mult_tol)
    dA, dB = pencil.derivative_matrices(theta)
    # quadratic forms restricted to the eigenspace, (p, m, m)
    forms = np.einsum("ia,pij,jb->pab", U, dA - lam * dB, U)

    basis = np.einsum("paa->ap", forms)
    coords = rng.standard_normal((n_samples, U.shape[1]))
    coords /= np.linalg.norm(coords, axis=1, keepdims=True)
    random = np.einsum("ka,pab,kb->kp", coords, forms, coords)
    samples = np.vstack([basis, basis.mean(axis=0, keepdims=True), random])
    return SubgradientSample(theta=theta, lambda1=lam, multiplicity=U.shape[1], basis=U, subgradients=samples)
