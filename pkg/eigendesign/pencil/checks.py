"""
Brute-force checks of the first eigenvalue of a pencil over its feasible set.

check_pseudoconcavity   lambda1(theta) < lambda1(theta') forces <g, theta' - theta> > 0
                        for every sampled subgradient g at theta
check_extreme_point_minimizer
                        the minimum over the polytope is attained at a vertex
check_stationary_is_global
                        projected ascent from random starts reaches the grid maximum
"""
import logging
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from eigendesign.exceptions import PencilError
from eigendesign.pencil.pencil import (
    MatrixPencil,
    batch_lambda1,
    pencil_lambda1,
    sample_clarke_subgradients,
)
from eigendesign.schemas.schema import ExtremePointReport, PseudoConcavityReport, StationaryReport

logger = logging.getLogger(__name__)

TIE_TOL = 1e-9
EXTREME_POINT_TOL = 1e-9
STATIONARY_REL_TOL = 1e-4
MAX_BRUTE_FORCE_DIM = 3


@dataclass(frozen=True)
class TrialRecord:
    pencil: str
    trial: int
    lambda_low: float
    lambda_high: float
    margin: float
    status: str


def check_pseudoconcavity(
    pencil: MatrixPencil,
    n_trials: int,
    seed: int,
    n_samples: int = 16,
    records: Optional[List[TrialRecord]] = None,
) -> PseudoConcavityReport:
    """
    Sample pairs theta, theta' and test the subgradient inequality at the lower one.

    When the pencil carries a degenerate point it is the first point of every
    other trial. Pairs with equal points or eigenvalues within TIE_TOL
    (relative) are skipped. Per-trial margins are the smallest pairing over
    the sampled subgradients.
    """
    rng = np.random.default_rng(seed)
    points = pencil.sample(rng, 2 * n_trials).reshape(n_trials, 2, pencil.p)
    if pencil.degenerate_point is not None:
        points[::2, 0] = pencil.degenerate_point

    tested = skipped = violations = 0
    margins: List[float] = []
    for trial, (theta, theta_prime) in enumerate(points):
        lam, _ = pencil_lambda1(pencil, theta)
        lam_prime, _ = pencil_lambda1(pencil, theta_prime)
        if np.allclose(theta, theta_prime, rtol=0.0, atol=1e-12) or abs(lam - lam_prime) <= TIE_TOL * max(abs(lam), abs(lam_prime)):
            skipped += 1
            if records is not None:
                records.append(TrialRecord(pencil.name, trial, min(lam, lam_prime), max(lam, lam_prime), float("nan"), "skipped"))
            continue
        if lam > lam_prime:
            theta, theta_prime = theta_prime, theta
            lam, lam_prime = lam_prime, lam

        sample = sample_clarke_subgradients(pencil, theta, n_samples, rng)
        margin = float(np.min(sample.subgradients @ (theta_prime - theta)))
        tested += 1
        margins.append(margin)
        violated = margin <= 0.0
        violations += violated
        if records is not None:
            records.append(TrialRecord(pencil.name, trial, lam, lam_prime, margin, "violation" if violated else "ok"))

    report = PseudoConcavityReport(
        pencil=pencil.name,
        tested=tested,
        skipped=skipped,
        violations=violations,
        min_margin=min(margins) if margins else None,
        margins=margins,
    )
    logger.info(
        "%s: %d trials tested, %d skipped, %d violations, min margin %s",
        pencil.name, tested, skipped, violations, report.min_margin,
    )
    return report


def _require_brute_force(pencil: MatrixPencil) -> None:
    if pencil.p > MAX_BRUTE_FORCE_DIM:
        raise PencilError(f"Brute force needs p <= {MAX_BRUTE_FORCE_DIM}, got {pencil.p}")


def check_extreme_point_minimizer(pencil: MatrixPencil, grid_density: int = 1001) -> ExtremePointReport:
    """Minimum of lambda1 over the polytope vertices against the minimum over a dense grid."""
    _require_brute_force(pencil)
    vertices = pencil.vertices()
    vertex_values = batch_lambda1(pencil, vertices)
    grid = pencil.grid(grid_density)
    grid_min = float(np.min(batch_lambda1(pencil, grid))) if len(grid) else float("inf")
    best = int(np.argmin(vertex_values))
    vertex_min = float(vertex_values[best])
    report = ExtremePointReport(
        pencil=pencil.name,
        n_vertices=len(vertices),
        n_grid=len(grid),
        vertex_min=vertex_min,
        grid_min=grid_min,
        argmin_vertex=vertices[best].tolist(),
        passed=vertex_min <= grid_min + EXTREME_POINT_TOL,
    )
    logger.info("%s: vertex min %.12g, grid min %.12g", pencil.name, vertex_min, grid_min)
    return report


def grid_maximum(pencil: MatrixPencil, grid_density: int = 201, zoom_rounds: int = 3, zoom_density: int = 21) -> float:
    """Maximum of lambda1 over a grid, refined by re-gridding around the best point."""
    _require_brute_force(pencil)
    grid = np.vstack([pencil.grid(grid_density), pencil.vertices()])
    values = batch_lambda1(pencil, grid)
    best = int(np.argmax(values))
    best_value, best_point = float(values[best]), grid[best]

    d = pencil.free_dims
    half_width = (pencil.upper[:d] - pencil.lower[:d]) / max(grid_density - 1, 1)
    for _ in range(zoom_rounds if d else 0):
        centre = best_point[:d]
        local = pencil.grid(zoom_density, centre - half_width, centre + half_width)
        if len(local):
            local_values = batch_lambda1(pencil, local)
            i = int(np.argmax(local_values))
            if local_values[i] > best_value:
                best_value, best_point = float(local_values[i]), local[i]
        half_width = 2.0 * half_width / max(zoom_density - 1, 1)
    return best_value


def projected_ascent(
    pencil: MatrixPencil,
    starts: np.ndarray,
    n_iter: int = 6000,
    step: float = 0.1,
    decay: float = 5.0,
    tail: float = 0.2,
) -> np.ndarray:
    """
    Normalized projected subgradient ascent from each start, advanced in lockstep.

    With an equality constraint the subgradient is first restricted to the
    constraint plane, so the projection only clips at the box. The step at
    iteration k is step / (1 + k / decay). Returns the best lambda1 seen by
    each start over the last `tail` share of the iterations.
    """
    normal = None if pencil.weights is None else pencil.weights / np.linalg.norm(pencil.weights)
    theta = pencil.project(starts)
    best = np.full(len(theta), -np.inf)
    tail_start = int((1.0 - tail) * n_iter)
    for k in range(n_iter):
        lambdas, vectors = batch_lambda1(pencil, theta, with_vectors=True)
        if k >= tail_start:
            best = np.maximum(best, lambdas)
        g = pencil.subgradients(theta, vectors, lambdas)
        if normal is not None:
            g = g - np.outer(g @ normal, normal)
        norms = np.linalg.norm(g, axis=1, keepdims=True)
        direction = np.divide(g, norms, out=np.zeros_like(g), where=norms > 0)
        theta = pencil.project(theta + step / (1.0 + k / decay) * direction)
    return np.maximum(best, batch_lambda1(pencil, theta))


def check_stationary_is_global(
    pencil: MatrixPencil,
    n_starts: int = 20,
    seed: int = 0,
    grid_density: int = 201,
    n_iter: int = 6000,
) -> StationaryReport:
    """Terminal values of projected ascent from random starts against the grid maximum."""
    _require_brute_force(pencil)
    rng = np.random.default_rng(seed)
    terminal = projected_ascent(pencil, pencil.sample(rng, n_starts), n_iter=n_iter)
    grid_max = grid_maximum(pencil, grid_density)
    gaps = np.abs(grid_max - terminal) / abs(grid_max)
    worst = int(np.argmax(gaps))
    report = StationaryReport(
        pencil=pencil.name,
        n_starts=n_starts,
        grid_max=grid_max,
        worst_terminal=float(terminal[worst]),
        max_relative_gap=float(gaps[worst]),
        passed=bool(gaps[worst] <= STATIONARY_REL_TOL),
        terminal_values=terminal.tolist(),
    )
    logger.info("%s: grid max %.12g, worst start %.12g", pencil.name, grid_max, terminal[worst])
    return report
