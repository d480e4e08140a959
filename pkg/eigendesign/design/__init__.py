from eigendesign.design.density import (
    DensityField,
    GradientField,
    VolumeConstraint,
    initial_density,
    project_to_admissible,
)
from eigendesign.design.gradient import gradient_lambda1
from eigendesign.design.krein import gray_area_fraction, krein_design, krein_radius, mismatch_area_fraction
from eigendesign.design.optimizer import (
    ProgressHandler,
    RunHistory,
    run_projected_gradient,
    solve_state,
    stationarity_measure,
)
