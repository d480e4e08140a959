import logging
from typing import List, Optional, Tuple

import numpy as np

from eigendesign.pencil.checks import (
    TrialRecord,
    check_extreme_point_minimizer,
    check_pseudoconcavity,
    check_stationary_is_global,
)
from eigendesign.pencil.generators import multiplicity_two_pencil, quadratic_control_pencil, random_affine_pencil
from eigendesign.pencil.pencil import MatrixPencil
from eigendesign.schemas.schema import PencilSuiteReport

logger = logging.getLogger(__name__)

# (n, p, equality) per pencil
AFFINE_SHAPES = [(3, 1, False), (4, 2, False), (5, 2, True), (6, 3, False), (8, 2, True), (6, 3, True), (7, 1, False), (5, 3, True)]
DOUBLE_SHAPES = [(4, 2, False), (6, 2, True), (5, 3, True)]
STATIONARY_SHAPES = [(3, 1, False), (4, 2, False), (5, 2, True), (6, 3, True), (8, 2, True)]


class PencilSuite:
    """Random pencils and the three checks run over them."""

    def __init__(
        self,
        seed: int = 42,
        trials: int = 1000,
        n_extreme: int = 10,
        n_stationary: int = 10,
        n_starts: int = 20,
        grid_density: int = 1001,
        ascent_iterations: int = 6000,
    ):
        self.seed = seed
        self.trials = trials
        self.n_extreme = n_extreme
        self.n_stationary = n_stationary
        self.n_starts = n_starts
        self.grid_density = grid_density
        self.ascent_iterations = ascent_iterations
        self.rng = np.random.default_rng(seed)

    def pseudoconcavity_pencils(self) -> List[MatrixPencil]:
        pencils = [
            random_affine_pencil(self.rng, n, p, equality, name=f"affine-{i}")
            for i, (n, p, equality) in enumerate(AFFINE_SHAPES)
        ]
        pencils += [
            multiplicity_two_pencil(self.rng, n, p, equality, name=f"double-{i}")
            for i, (n, p, equality) in enumerate(DOUBLE_SHAPES)
        ]
        return pencils

    def extreme_point_pencils(self) -> List[MatrixPencil]:
        return [random_affine_pencil(self.rng, 2 + i % 7, 2, True, name=f"segment-{i}") for i in range(self.n_extreme)]

    def stationary_pencils(self) -> List[MatrixPencil]:
        shapes = [STATIONARY_SHAPES[i % len(STATIONARY_SHAPES)] for i in range(self.n_stationary)]
        return [random_affine_pencil(self.rng, n, p, equality, name=f"ascent-{i}") for i, (n, p, equality) in enumerate(shapes)]

    def pencils(self) -> Tuple[List[MatrixPencil], MatrixPencil, List[MatrixPencil], List[MatrixPencil]]:
        """Every pencil of the suite, drawn from the seeded generator in a fixed order."""
        pseudo = self.pseudoconcavity_pencils()
        control = quadratic_control_pencil(self.rng)
        return pseudo, control, self.extreme_point_pencils(), self.stationary_pencils()

    def run(self) -> Tuple[PencilSuiteReport, List[TrialRecord]]:
        records: List[TrialRecord] = []
        pseudo_pencils, control_pencil, extreme_pencils, stationary_pencils = self.pencils()
        pseudo = [
            check_pseudoconcavity(pencil, self.trials, self.seed + i, records=records)
            for i, pencil in enumerate(pseudo_pencils)
        ]
        control = check_pseudoconcavity(control_pencil, self.trials, self.seed, records=records)
        if control.violations == 0:
            logger.warning("Control pencil showed no violation in %d trials, result inconclusive", self.trials)

        extreme = [check_extreme_point_minimizer(pencil, self.grid_density) for pencil in extreme_pencils]
        stationary = [
            check_stationary_is_global(pencil, self.n_starts, self.seed + i, n_iter=self.ascent_iterations)
            for i, pencil in enumerate(stationary_pencils)
        ]

        violations = sum(report.violations for report in pseudo)
        report = PencilSuiteReport(
            seed=self.seed,
            trials=self.trials,
            pseudoconcavity=pseudo,
            extreme_point=extreme,
            stationary=stationary,
            control=control,
            violations=violations,
            passed=violations == 0 and all(r.passed for r in extreme) and all(r.passed for r in stationary),
        )
        logger.info("Pencil suite: violations: %d, passed: %s", violations, report.passed)
        return report, records


def run_pencil_suite(seed: int = 42, trials: int = 1000, suite: Optional[PencilSuite] = None) -> Tuple[PencilSuiteReport, List[TrialRecord]]:
    """Run the given suite, or the default suite for seed and trials."""
    return (suite or PencilSuite(seed=seed, trials=trials)).run()
