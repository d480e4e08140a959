import logging
from typing import Optional

import numpy as np

from eigendesign.design.density import DensityField, GradientField
from eigendesign.exceptions import GradientError
from eigendesign.fem.assembly import coefficients_from_density, element_averages
from eigendesign.fem.eigensolve import EigenPair
from eigendesign.fem.spaces import DofMap, build_dofmap

logger = logging.getLogger(__name__)

NORMALIZATION_TOL = 1e-8


def gradient_lambda1(theta: DensityField, pair: EigenPair, spec, dofmap: Optional[DofMap] = None) -> GradientField:
    """
    Derivative of the simple eigenvalue lambda1 with respect to the element densities.

    g_e = (c2 - c1) * mean_e |grad u|^2 - lambda1 * (rho2 - rho1) * mean_e u^2,
    with element means taken by the assembly quadrature rule. The eigenvector
    must satisfy u^T B(theta) u = 1.

    Args:
        theta: density the eigenpair was computed at
        pair: eigenpair over the free dofs of `dofmap`
        spec: ProblemSpec providing c1, c2, rho1, rho2
        dofmap: dof map of the eigenvector (P2 on theta.mesh when omitted)

    Returns:
        GradientField, one value per triangle
    """
    if dofmap is None:
        dofmap = build_dofmap(theta.mesh)
    mean_u2, mean_grad2 = element_averages(dofmap, dofmap.extend(pair.u))

    areas = theta.mesh.signed_areas
    rho = coefficients_from_density(theta, spec).rho_per_element
    norm = float(np.sum(rho * areas * mean_u2))
    if abs(norm - 1.0) > NORMALIZATION_TOL:
        raise GradientError(f"Eigenvector is not B-normalized (u^T B u = {norm!r})")

    values = (spec.c2 - spec.c1) * mean_grad2 - pair.lambda1 * (spec.rho2 - spec.rho1) * mean_u2
    return GradientField(values)
