"""
Explicit radially symmetric 0-1 designs of the denominator-only problems on a disk.

With c1 = c2 the minimizer puts all of material 2 in a centred disk and the
maximizer puts it in the outer annulus. Radii are chosen so the heavy part has
volume gamma on the polygonal domain the mesh covers.
"""
import logging
import math

import numpy as np

from eigendesign.design.density import DensityField
from eigendesign.exceptions import EigenDesignException, MeshError
from eigendesign.fem.mesh import DiskDomain, TriMesh
from eigendesign.schemas.schema import Variant

logger = logging.getLogger(__name__)


def krein_radius(mesh: TriMesh, variant: Variant, gamma: float) -> float:
    """Radius of the interface between the two phases."""
    if not isinstance(mesh.domain, DiskDomain):
        raise MeshError("Analytic designs are defined on disk meshes only")
    area = mesh.total_area
    if not 0.0 < gamma < area:
        raise EigenDesignException(f"gamma must lie in (0, {area!r}), got {gamma!r}", err_code="INVALID_VOLUME")
    if variant is Variant.MIN_DENOMINATOR_ONLY:
        return math.sqrt(gamma / math.pi)
    if variant is Variant.MAX_DENOMINATOR_ONLY:
        return math.sqrt((area - gamma) / math.pi)
    raise EigenDesignException(
        f"No analytic design for {Variant(variant).value}", err_code="UNSUPPORTED_VARIANT"
    )


def krein_design(mesh: TriMesh, variant: Variant, gamma: float) -> DensityField:
    """0-1 density classified by triangle centroid: a centred disk (min) or an annulus (max)."""
    radius = krein_radius(mesh, variant, gamma)
    r = np.hypot(mesh.centroids[:, 0], mesh.centroids[:, 1])
    inside = r < radius
    values = inside if variant is Variant.MIN_DENOMINATOR_ONLY else ~inside
    logger.debug("Analytic %s design: interface radius %.6f", variant.value, radius)
    return DensityField(values.astype(float), mesh)


def mismatch_area_fraction(theta: DensityField, reference: DensityField) -> float:
    """Area-weighted L1 distance over the domain area; the symmetric-difference area share for 0-1 fields."""
    if theta.mesh is not reference.mesh:
        raise MeshError("Densities live on different meshes")
    areas = theta.mesh.signed_areas
    return float(areas @ np.abs(theta.values - reference.values)) / theta.mesh.total_area


def gray_area_fraction(theta: DensityField, lo: float = 0.05, hi: float = 0.95) -> float:
    """Share of the domain area where lo < theta < hi."""
    areas = theta.mesh.signed_areas
    gray = (theta.values > lo) & (theta.values < hi)
    return float(areas @ gray) / theta.mesh.total_area
