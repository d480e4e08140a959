import numpy as np
import pytest
from scipy import integrate

from eigendesign.exceptions import AssemblyError
from eigendesign.fem import (
    CoefficientPair,
    Space,
    SquareDomain,
    TriMesh,
    assemble_mass,
    assemble_stiffness,
    build_dofmap,
    build_square_mesh,
    coefficients_from_density,
    element_averages,
    triangle_rule_degree5,
)
from eigendesign.fem.assembly import element_data
from eigendesign.fem.spaces import basis_values


def _reference_triangle() -> TriMesh:
    # label 0 is not Dirichlet, so every dof stays free
    return TriMesh(
        vertices=np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]),
        triangles=np.array([[0, 1, 2]]),
        boundary_edges=np.array([[0, 1], [1, 2], [2, 0]]),
        boundary_labels=np.zeros(3, dtype=int),
        domain=SquareDomain(ratio=1.0, n_per_side=1),
    )


def _reference_integral(f) -> float:
    value, _ = integrate.dblquad(lambda y, x: f(x, y), 0.0, 1.0, 0.0, lambda x: 1.0 - x, epsabs=1e-13, epsrel=1e-13)
    return value


def _phi(x: float, y: float) -> np.ndarray:
    return basis_values(Space.P2, np.array([[1.0 - x - y, x, y]]))[0]


def _grad_phi(x: float, y: float, h: float = 1e-5) -> np.ndarray:
    # central differences are exact for quadratics up to rounding
    dx = (_phi(x + h, y) - _phi(x - h, y)) / (2 * h)
    dy = (_phi(x, y + h) - _phi(x, y - h)) / (2 * h)
    return np.stack([dx, dy], axis=1)


@pytest.mark.parametrize("a,b", [(0, 0), (1, 0), (2, 1), (3, 0), (2, 2), (5, 0), (1, 4), (3, 2)])
def test_quadrature_exact_to_degree_five(a, b):
    quad = triangle_rule_degree5()
    x, y = quad.points[:, 1], quad.points[:, 2]
    approx = 0.5 * quad.weights @ (x**a * y**b)
    assert approx == pytest.approx(_reference_integral(lambda s, t: s**a * t**b), rel=1e-12, abs=1e-15)


def test_p2_element_mass_matches_integral():
    mesh = _reference_triangle()
    mass = element_data(build_dofmap(mesh, Space.P2)).mass[0]
    for i in range(6):
        for j in range(i, 6):
            exact = _reference_integral(lambda x, y: _phi(x, y)[i] * _phi(x, y)[j])
            assert mass[i, j] == pytest.approx(exact, abs=1e-12)


def test_p2_element_stiffness_matches_integral():
    mesh = _reference_triangle()
    stiffness = element_data(build_dofmap(mesh, Space.P2)).stiffness[0]
    for i in range(6):
        for j in range(i, 6):
            exact = _reference_integral(lambda x, y: _grad_phi(x, y)[i] @ _grad_phi(x, y)[j])
            assert stiffness[i, j] == pytest.approx(exact, abs=1e-8)


def test_p1_element_stiffness_closed_form():
    mesh = _reference_triangle()
    dofmap = build_dofmap(mesh, Space.P1)
    coeffs = CoefficientPair(np.ones(1), np.ones(1))
    A = assemble_stiffness(mesh, dofmap, coeffs, restrict=False).toarray()
    M = assemble_mass(mesh, dofmap, coeffs, restrict=False).toarray()
    assert np.allclose(A, 0.5 * np.array([[2, -1, -1], [-1, 1, 0], [-1, 0, 1]]), atol=1e-14)
    assert np.allclose(M, (np.ones((3, 3)) + np.eye(3)) / 24.0, atol=1e-14)


@pytest.mark.parametrize("space", [Space.P1, Space.P2])
def test_global_matrices_constants(space, rng):
    mesh = build_square_mesh(5)
    dofmap = build_dofmap(mesh, space)
    rho = rng.uniform(0.3, 0.7, mesh.n_triangles)
    coeffs = CoefficientPair(rng.uniform(0.5, 1.0, mesh.n_triangles), rho)
    A = assemble_stiffness(mesh, dofmap, coeffs, restrict=False)
    M = assemble_mass(mesh, dofmap, coeffs, restrict=False)
    ones = np.ones(dofmap.n_dofs)
    # basis functions sum to one
    assert ones @ (M @ ones) == pytest.approx(rho @ mesh.signed_areas, rel=1e-12)
    assert np.abs(A @ ones).max() < 1e-12


def test_matrices_exactly_symmetric(square_mesh, square_p2, rng, spec):
    theta = rng.uniform(0.0, 1.0, square_mesh.n_triangles)
    coeffs = coefficients_from_density(theta, spec)
    for matrix in (assemble_stiffness(square_mesh, square_p2, coeffs), assemble_mass(square_mesh, square_p2, coeffs)):
        assert (matrix - matrix.T).count_nonzero() == 0
        assert matrix.shape == (square_p2.n_free, square_p2.n_free)


def test_restriction_removes_boundary_dofs(square_mesh, square_p2):
    # 6x6 cells: 7^2 vertices and 3*36+12 edges, minus 24 boundary vertices and 24 boundary edges
    assert square_p2.n_dofs == 49 + 120
    assert square_p2.n_free == square_p2.n_dofs - 48


def test_coefficients_are_arithmetic_means(spec):
    coeffs = coefficients_from_density(np.array([0.0, 0.5, 1.0]), spec)
    assert coeffs.c_per_element == pytest.approx([0.5, 0.75, 1.0])
    assert coeffs.rho_per_element == pytest.approx([0.3, 0.5, 0.7])


def test_coefficient_length_mismatch(square_mesh, square_p2):
    coeffs = CoefficientPair(np.ones(3), np.ones(3))
    with pytest.raises(AssemblyError):
        assemble_stiffness(square_mesh, square_p2, coeffs)


def test_dofmap_from_other_mesh(square_p2):
    other = build_square_mesh(6)
    coeffs = CoefficientPair(np.ones(other.n_triangles), np.ones(other.n_triangles))
    with pytest.raises(AssemblyError):
        assemble_mass(other, square_p2, coeffs)


def test_element_averages_of_linear_function():
    mesh = build_square_mesh(4)
    dofmap = build_dofmap(mesh, Space.P2)
    x = dofmap.dof_coordinates()[:, 0]
    mean_u2, mean_grad2 = element_averages(dofmap, x)
    assert np.allclose(mean_grad2, 1.0)
    for e, tri in enumerate(mesh.triangles):
        xs = mesh.vertices[tri, 0]
        # E[L_i L_j] = (1 + delta_ij) / 12 over a triangle
        exact = (xs.sum() ** 2 + (xs**2).sum()) / 12.0
        assert mean_u2[e] == pytest.approx(exact, rel=1e-12)
