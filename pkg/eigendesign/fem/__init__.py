from eigendesign.fem.assembly import (
    CoefficientPair,
    assemble_mass,
    assemble_stiffness,
    coefficients_from_density,
    element_averages,
    restrict_to_free,
)
from eigendesign.fem.eigensolve import EigenPair, rayleigh_quotient, smallest_eigenpair
from eigendesign.fem.mesh import (
    DIRICHLET_LABEL,
    DiskDomain,
    MeshFactory,
    SquareDomain,
    TriMesh,
    build_disk_mesh,
    build_square_mesh,
    element_areas,
    polygon_area,
    validate_mesh,
)
from eigendesign.fem.spaces import DofMap, Space, build_dofmap, triangle_rule_degree5
