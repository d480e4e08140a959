import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from eigendesign.design import DensityField, VolumeConstraint, initial_density, project_to_admissible
from eigendesign.exceptions import AssemblyError, ProjectionError
from eigendesign.fem import SquareDomain, TriMesh, build_disk_mesh, build_square_mesh
from eigendesign.schemas import InitialDesign

VOL_TOL = 1e-7
MESH = build_disk_mesh(16)
N = MESH.n_triangles

raw_fields = arrays(np.float64, N, elements=st.floats(min_value=-3.0, max_value=3.0))
fractions = st.floats(min_value=0.05, max_value=0.95)


def _project(values, fraction):
    vc = VolumeConstraint.from_fraction(MESH, fraction)
    return vc, project_to_admissible(DensityField(values, MESH), vc, VOL_TOL)


@settings(max_examples=100, deadline=None)
@given(raw_fields, fractions)
def test_projection_is_feasible(values, fraction):
    vc, theta = _project(values, fraction)
    assert np.all(theta.values >= 0.0) and np.all(theta.values <= 1.0)
    assert abs(theta.volume() - vc.gamma) <= VOL_TOL * vc.total_area


@settings(max_examples=100, deadline=None)
@given(raw_fields, fractions)
def test_projection_is_idempotent(values, fraction):
    vc, theta = _project(values, fraction)
    again = project_to_admissible(theta, vc, VOL_TOL)
    assert np.max(np.abs(again.values - theta.values)) <= 1e-12


@settings(max_examples=50, deadline=None)
@given(raw_fields, fractions, st.floats(min_value=-2.0, max_value=2.0))
def test_projection_ignores_constant_shifts(values, fraction, shift):
    _, theta = _project(values, fraction)
    _, shifted = _project(values + shift, fraction)
    assert np.allclose(theta.values, shifted.values, atol=1e-6)


@settings(max_examples=50, deadline=None)
@given(raw_fields, raw_fields, fractions)
def test_projection_is_nearest_feasible_point(values, other, fraction):
    vc, theta = _project(values, fraction)
    _, candidate = _project(other, fraction)
    assert vc.norm(values - theta.values) <= vc.norm(values - candidate.values) + 1e-6


@settings(max_examples=50, deadline=None)
@given(raw_fields, fractions)
def test_projection_preserves_order(values, fraction):
    _, theta = _project(values, fraction)
    order = np.argsort(values)
    assert np.all(np.diff(theta.values[order]) >= -1e-12)


def test_feasible_input_returned_unchanged():
    vc = VolumeConstraint.from_fraction(MESH, 0.5)
    theta = DensityField.uniform(MESH, 0.5)
    assert project_to_admissible(theta, vc).values.tobytes() == theta.values.tobytes()


def test_non_finite_input_rejected():
    vc = VolumeConstraint.from_fraction(MESH, 0.5)
    values = np.full(N, 0.5)
    values[3] = np.nan
    with pytest.raises(ProjectionError):
        project_to_admissible(DensityField(values, MESH), vc)


@pytest.mark.parametrize("fraction", [0.0, 1.0, 1.2])
def test_volume_outside_domain_rejected(fraction):
    with pytest.raises(ProjectionError):
        VolumeConstraint.from_fraction(MESH, fraction)


def test_density_shape_checked():
    with pytest.raises(AssemblyError):
        DensityField(np.zeros(N + 1), MESH)


def test_halfplane_start_fills_left_part():
    mesh = build_square_mesh(10)
    theta = initial_density(mesh, InitialDesign.parse("halfplane"), 0.3)
    left = mesh.centroids[:, 0] < 0.3
    assert np.array_equal(theta.values == 1.0, left)
    assert theta.volume() == pytest.approx(0.3)


def test_halfplane_threshold():
    mesh = build_square_mesh(10)
    theta = initial_density(mesh, InitialDesign.parse("halfplane(0.5)"), 0.3)
    assert theta.volume() == pytest.approx(0.5)


def _three_triangles() -> TriMesh:
    return TriMesh(
        vertices=np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [2.0, 0.0]]),
        triangles=np.array([[0, 1, 2], [1, 3, 2], [1, 4, 3]]),
        boundary_edges=np.array([[0, 1], [1, 4], [4, 3], [3, 2], [2, 0]]),
        boundary_labels=np.zeros(5, dtype=int),
        domain=SquareDomain(ratio=2.0, n_per_side=1),
    )


@pytest.mark.parametrize(
    "raw,expected",
    [
        ([2.0, 0.5, -1.0], [1.0, 0.5, 0.0]),
        ([5.0, 5.0, 5.0], [0.5, 0.5, 0.5]),
    ],
)
def test_projection_of_small_fields(raw, expected):
    vc = VolumeConstraint(gamma=1.5, element_areas=np.ones(3))
    theta = project_to_admissible(DensityField(np.array(raw), _three_triangles()), vc, VOL_TOL)
    assert theta.values == pytest.approx(expected, abs=1e-6)
