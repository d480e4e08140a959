"""
Projected gradient method for the relaxed eigenvalue design problems.

    theta_{k+1} = P(theta_k + s * stepsize * g_k),   s = +1 (max) or -1 (min)

where P is the projection onto the volume-constrained box and g_k the
gradient of lambda1 at theta_k. The loop runs a fixed number of iterations
unless a stationarity threshold is configured.
"""
import logging
import time
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from eigendesign.design.density import (
    DensityField,
    GradientField,
    VolumeConstraint,
    initial_density,
    project_to_admissible,
)
from eigendesign.design.gradient import gradient_lambda1
from eigendesign.exceptions import EigenDesignException, EigenSolveError, OptimizationError
from eigendesign.fem.assembly import assemble_mass, assemble_stiffness, coefficients_from_density
from eigendesign.fem.eigensolve import EigenPair, smallest_eigenpair
from eigendesign.fem.mesh import TriMesh
from eigendesign.fem.spaces import DofMap, build_dofmap
from eigendesign.schemas.schema import IterationRecord, ProblemSpec, RunSummary, SolverSettings

logger = logging.getLogger(__name__)


class ProgressHandler:
    """Optimizer callback; the default logs every iteration and counts eigensolves."""

    def __init__(self):
        self.eigen_solves = 0
        self.sweeps = 0
        self.iterations = 0

    def on_eigensolve(self, pair: EigenPair) -> None:
        self.eigen_solves += 1
        self.sweeps += pair.iterations

    def on_iteration(self, record: IterationRecord) -> None:
        self.iterations += 1
        logger.info("Iter. %d, lambda1 = %.10g", record.iteration, record.lambda1)
        logger.debug(
            "Iter. %d, volume error = %.3e, stationarity = %.3e",
            record.iteration, record.volume_error, record.stationarity,
        )

    def on_finish(self, history: "RunHistory") -> None:
        logger.info(
            "Finished after %d iterations, lambda1 = %.10g (%d eigensolves, %d sweeps, %.1fs)",
            len(history.records), history.final_lambda1, self.eigen_solves, self.sweeps, history.wall_time,
        )


@dataclass
class RunHistory:
    """
    Outcome of one projected-gradient run.

    records[k] holds lambda1 at theta_k, the volume error of theta_{k+1} and
    the stationarity ||theta_k - theta_{k+1}|| / stepsize. final_lambda1 is
    lambda1 at final_theta.
    """

    spec: ProblemSpec
    records: List[IterationRecord]
    initial_theta: DensityField
    final_theta: DensityField
    final_lambda1: float
    final_pair: Optional[EigenPair] = None
    dofmap: Optional[DofMap] = None
    wall_time: float = 0.0
    eigen_solves: int = 0
    interrupted: bool = False

    def lambdas(self) -> np.ndarray:
        return np.array([record.lambda1 for record in self.records])

    def summary(self, gray_fraction: float) -> RunSummary:
        return RunSummary(
            variant=self.spec.variant,
            iterations=len(self.records),
            initial_lambda1=self.records[0].lambda1 if self.records else None,
            final_lambda1=self.final_lambda1,
            max_volume_error=max((abs(r.volume_error) for r in self.records), default=0.0),
            final_stationarity=self.records[-1].stationarity if self.records else None,
            gray_fraction=gray_fraction,
            wall_time=self.wall_time,
            eigen_solves=self.eigen_solves,
            interrupted=self.interrupted,
        )


def solve_state(
    dofmap: DofMap,
    theta: DensityField,
    spec,
    solver: Optional[SolverSettings] = None,
    x0: Optional[np.ndarray] = None,
) -> EigenPair:
    """Assemble A(theta), B(theta) on the free dofs and return their smallest eigenpair."""
    solver = solver or SolverSettings()
    coeffs = coefficients_from_density(theta, spec)
    A = assemble_stiffness(theta.mesh, dofmap, coeffs)
    B = assemble_mass(theta.mesh, dofmap, coeffs)
    return smallest_eigenpair(A, B, tol=solver.eig_tol, max_iter=solver.eig_max_iter, x0=x0)


def stationarity_measure(theta: DensityField, g: GradientField, vc: VolumeConstraint, probe_step: float, vol_tol: float = 1e-7) -> float:
    """
    ||theta - P(theta + probe_step * g)|| / probe_step in the area-weighted norm.

    Zero exactly when theta is a fixed point of the projected step along g;
    pass the signed gradient (-g) for minimization.
    """
    if probe_step <= 0:
        raise OptimizationError(f"probe_step must be positive, got {probe_step!r}", iteration=0)
    stepped = DensityField(theta.values + probe_step * g.values, theta.mesh)
    projected = project_to_admissible(stepped, vc, vol_tol)
    return vc.norm(theta.values - projected.values) / probe_step


def run_projected_gradient(
    mesh: TriMesh,
    spec: ProblemSpec,
    solver: Optional[SolverSettings] = None,
    handler: Optional[ProgressHandler] = None,
    initial_theta: Optional[DensityField] = None,
) -> RunHistory:
    """
    Run the projected gradient method for spec.variant on `mesh`.

    Args:
        mesh: design domain
        spec: problem definition and optimizer parameters
        solver: eigensolver settings and element space
        handler: progress callback, a logging ProgressHandler by default
        initial_theta: explicit starting density overriding spec.initial_design

    Returns:
        RunHistory with one record per completed iteration
    """
    solver = solver or SolverSettings()
    handler = handler or ProgressHandler()
    start = time.perf_counter()

    dofmap = build_dofmap(mesh, solver.element)
    vc = VolumeConstraint.from_fraction(mesh, spec.volume_fraction)
    sign = spec.variant.sign
    logger.info(
        "Projected gradient: %s, %d triangles, %d free dofs, stepsize %g, %d iterations",
        spec.variant.value, mesh.n_triangles, dofmap.n_free, spec.stepsize, spec.max_iter,
    )

    if initial_theta is None:
        initial_theta = initial_density(mesh, spec.initial_design, spec.volume_fraction)
    theta = project_to_admissible(initial_theta, vc, spec.vol_tol)
    first_theta = theta

    records: List[IterationRecord] = []
    pair: Optional[EigenPair] = None
    interrupted = False

    def solve(iteration: int) -> EigenPair:
        try:
            result = solve_state(dofmap, theta, spec, solver, x0=pair.u if pair is not None else None)
        except EigenSolveError as exc:
            raise OptimizationError(
                f"Eigensolve failed at iteration {iteration}: {exc.message}",
                iteration=iteration,
                error=exc,
            ) from exc
        handler.on_eigensolve(result)
        return result

    try:
        for iteration in range(1, spec.max_iter + 1):
            pair = solve(iteration)
            g = gradient_lambda1(theta, pair, spec, dofmap)
            stepped = DensityField(theta.values + sign * spec.stepsize * g.values, mesh)
            updated = project_to_admissible(stepped, vc, spec.vol_tol)

            record = IterationRecord(
                iteration=iteration,
                lambda1=pair.lambda1,
                volume_error=vc.volume_error(updated.values),
                stationarity=vc.norm(theta.values - updated.values) / spec.stepsize,
            )
            records.append(record)
            handler.on_iteration(record)
            theta = updated

            if spec.stationarity_tol is not None and record.stationarity <= spec.stationarity_tol:
                logger.info("Stationarity %.3e below %.1e, stopping", record.stationarity, spec.stationarity_tol)
                break
    except KeyboardInterrupt:
        interrupted = True
        logger.warning("Interrupted after %d iterations, returning the partial history", len(records))
    except EigenDesignException:
        raise
    except Exception as e:
        raise OptimizationError(
            f"Iteration {len(records) + 1} failed: {e}",
            iteration=len(records) + 1,
            error=e,
        ) from e

    pair = solve(len(records) + 1)
    history = RunHistory(
        spec=spec,
        records=records,
        initial_theta=first_theta,
        final_theta=theta,
        final_lambda1=pair.lambda1,
        final_pair=pair,
        dofmap=dofmap,
        wall_time=time.perf_counter() - start,
        eigen_solves=handler.eigen_solves,
        interrupted=interrupted,
    )
    handler.on_finish(history)
    return history
