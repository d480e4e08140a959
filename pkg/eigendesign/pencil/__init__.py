from eigendesign.pencil.checks import (
    TrialRecord,
    check_extreme_point_minimizer,
    check_pseudoconcavity,
    check_stationary_is_global,
    grid_maximum,
    projected_ascent,
)
from eigendesign.pencil.generators import multiplicity_two_pencil, quadratic_control_pencil, random_affine_pencil
from eigendesign.pencil.pencil import (
    MatrixPencil,
    QuadraticMassPencil,
    SubgradientSample,
    batch_lambda1,
    pencil_lambda1,
    sample_clarke_subgradients,
)
from eigendesign.pencil.suite import PencilSuite, run_pencil_suite
