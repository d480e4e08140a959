"""
Element-wise densities, the volume-constrained admissible set and the
projection onto it.

All inner products and norms over densities are area weighted, the discrete
counterpart of the L2 pairing on the domain.
"""
import logging
from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect

from eigendesign.exceptions import AssemblyError, GradientError, ProjectionError
from eigendesign.fem.mesh import TriMesh, element_areas
from eigendesign.schemas.schema import InitialDesign, InitialDesignKind

logger = logging.getLogger(__name__)

DEFAULT_VOL_TOL = 1e-7


def _read_only(values) -> np.ndarray:
    values = np.array(values, dtype=float)
    values.setflags(write=False)
    return values


@dataclass(frozen=True, eq=False)
class DensityField:
    """Volume fraction of material 2, one value per triangle."""

    values: np.ndarray
    mesh: TriMesh

    def __post_init__(self):
        values = _read_only(self.values)
        if values.shape != (self.mesh.n_triangles,):
            raise AssemblyError(f"Density has shape {values.shape}, expected ({self.mesh.n_triangles},)")
        object.__setattr__(self, "values", values)

    @classmethod
    def uniform(cls, mesh: TriMesh, value: float) -> "DensityField":
        return cls(np.full(mesh.n_triangles, float(value)), mesh)

    def in_box(self) -> bool:
        return bool(np.all((self.values >= 0.0) & (self.values <= 1.0)))

    def volume(self) -> float:
        return float(self.mesh.signed_areas @ self.values)


@dataclass(frozen=True, eq=False)
class VolumeConstraint:
    """Prescribed volume gamma of material 2: sum_e area_e * theta_e = gamma."""

    gamma: float
    element_areas: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "element_areas", _read_only(self.element_areas))
        if not 0.0 < self.gamma < self.total_area:
            raise ProjectionError(f"gamma must lie in (0, {self.total_area!r}), got {self.gamma!r}")

    @classmethod
    def from_fraction(cls, mesh: TriMesh, volume_fraction: float) -> "VolumeConstraint":
        areas = element_areas(mesh)
        return cls(gamma=volume_fraction * float(areas.sum()), element_areas=areas)

    @property
    def total_area(self) -> float:
        return float(self.element_areas.sum())

    def volume_error(self, values: np.ndarray) -> float:
        """Signed volume mismatch relative to the domain area."""
        return float(self.element_areas @ values) / self.total_area - self.gamma / self.total_area

    def norm(self, values: np.ndarray) -> float:
        """Area-weighted L2 norm."""
        values = np.asarray(values, dtype=float)
        return float(np.sqrt(self.element_areas @ (values * values)))


@dataclass(frozen=True, eq=False)
class GradientField:
    """Per-element derivative of lambda1: d lambda1 = sum_e area_e * g_e * d theta_e."""

    values: np.ndarray

    def __post_init__(self):
        values = _read_only(self.values)
        if not np.all(np.isfinite(values)):
            raise GradientError("Gradient has non-finite entries", err_code="NON_FINITE")
        object.__setattr__(self, "values", values)

    def pairing(self, direction: np.ndarray, areas: np.ndarray) -> float:
        return float(np.sum(areas * self.values * np.asarray(direction, dtype=float)))


def project_to_admissible(theta_raw, vc: VolumeConstraint, vol_tol: float = DEFAULT_VOL_TOL) -> DensityField:
    """
    Area-weighted projection onto {0 <= theta <= 1, sum area*theta = gamma}.

    The projection is clip(theta_raw - mu, 0, 1) with the scalar mu found by
    bisection on [min(theta_raw) - 1, max(theta_raw)]. Feasible input comes
    back unchanged.

    Args:
        theta_raw: DensityField (raw values may leave the box)
        vc: volume constraint
        vol_tol: admissible |volume error| relative to the domain area

    Returns:
        Feasible DensityField on the same mesh
    """
    if vol_tol <= 0:
        raise ProjectionError(f"vol_tol must be positive, got {vol_tol!r}")
    raw = np.asarray(theta_raw.values, dtype=float)
    if raw.shape != vc.element_areas.shape:
        raise ProjectionError(f"Density has {raw.size} entries, constraint has {vc.element_areas.size}")
    if not np.all(np.isfinite(raw)):
        raise ProjectionError("Density has non-finite entries")

    if np.all((raw >= 0.0) & (raw <= 1.0)) and abs(vc.volume_error(raw)) <= vol_tol:
        return DensityField(raw, theta_raw.mesh)

    def residual(mu: float) -> float:
        return vc.volume_error(np.clip(raw - mu, 0.0, 1.0))

    # the residual is nonincreasing in mu with slope at most 1 in magnitude
    try:
        mu = bisect(residual, raw.min() - 1.0, raw.max(), xtol=0.5 * vol_tol, maxiter=200)
    except (RuntimeError, ValueError) as exc:
        raise ProjectionError(f"Bisection for the volume multiplier failed: {exc}", error=exc) from exc

    values = np.clip(raw - mu, 0.0, 1.0)
    error = vc.volume_error(values)
    if abs(error) > vol_tol:
        raise ProjectionError(f"Projected volume error {error:.3e} exceeds {vol_tol:.1e}")
    logger.debug("Projection multiplier %.12g, volume error %.2e", mu, error)
    return DensityField(values, theta_raw.mesh)


def initial_density(mesh: TriMesh, design: InitialDesign, volume_fraction: float) -> DensityField:
    """Starting density before projection."""
    if design.kind is InitialDesignKind.UNIFORM:
        return DensityField.uniform(mesh, volume_fraction)

    if design.kind is InitialDesignKind.HALFPLANE:
        x = mesh.centroids[:, 0]
        if design.x_threshold is None:
            x_min, _, x_max, _ = mesh.bounding_box
            mask = x - x_min < volume_fraction * (x_max - x_min)
        else:
            mask = x < design.x_threshold
        return DensityField(mask.astype(float), mesh)

    # deferred: the readers import DensityField from this module
    from eigendesign.artifacts.readers import read_density_csv

    return read_density_csv(mesh, design.path)
