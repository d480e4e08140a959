"""
Assembly of the density-dependent stiffness and mass matrices.

Element matrices for unit coefficients depend only on the geometry, so they
are computed once per dof map and rescaled by the per-element conductivity
or density on every assembly. The sparsity pattern is shared by all
assemblies on the same dof map.
"""
import logging
import weakref
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from eigendesign.exceptions import AssemblyError
from eigendesign.fem.mesh import TriMesh
from eigendesign.fem.spaces import (
    DofMap,
    Quadrature,
    Space,
    barycentric_gradients,
    basis_gradient_coefficients,
    basis_values,
    triangle_rule_degree5,
)

logger = logging.getLogger(__name__)

SparseSymMatrix = sp.csr_matrix


@dataclass(frozen=True, eq=False)
class CoefficientPair:
    """Per-element conductivity c and density rho."""

    c_per_element: np.ndarray
    rho_per_element: np.ndarray


@dataclass(frozen=True, eq=False)
class ElementData:
    quadrature: Quadrature
    phi: np.ndarray          # (n_points, n_local)
    grad_phi: np.ndarray     # (n_triangles, n_points, n_local, 2)
    stiffness: np.ndarray    # (n_triangles, n_local, n_local), unit conductivity
    mass: np.ndarray         # (n_triangles, n_local, n_local), unit density
    rows: np.ndarray
    cols: np.ndarray


_element_cache: "weakref.WeakKeyDictionary[DofMap, ElementData]" = weakref.WeakKeyDictionary()


def element_data(dofmap: DofMap) -> ElementData:
    cached = _element_cache.get(dofmap)
    if cached is not None:
        return cached
    if dofmap.space is Space.P0:
        raise AssemblyError("Stiffness and mass matrices are assembled on P1 or P2 spaces")

    mesh = dofmap.mesh
    quad = triangle_rule_degree5()
    phi = basis_values(dofmap.space, quad.points)
    coeffs = basis_gradient_coefficients(dofmap.space, quad.points)
    grad_phi = np.einsum("qak,ekd->eqad", coeffs, barycentric_gradients(mesh))

    areas = mesh.signed_areas
    stiffness = np.einsum("q,eqad,eqbd->eab", quad.weights, grad_phi, grad_phi) * areas[:, None, None]
    stiffness = 0.5 * (stiffness + stiffness.transpose(0, 2, 1))
    mass_ref = np.einsum("q,qa,qb->ab", quad.weights, phi, phi)
    mass_ref = 0.5 * (mass_ref + mass_ref.T)
    mass = areas[:, None, None] * mass_ref[None, :, :]

    n_local = dofmap.n_local
    rows = np.repeat(dofmap.cell_dofs, n_local, axis=1).ravel()
    cols = np.tile(dofmap.cell_dofs, (1, n_local)).ravel()
    data = ElementData(quad, phi, grad_phi, stiffness, mass, rows, cols)
    _element_cache[dofmap] = data
    return data


def coefficients_from_density(theta, spec) -> CoefficientPair:
    """Arithmetic-mean coefficients c = c1 + (c2-c1)*theta, rho = rho1 + (rho2-rho1)*theta."""
    values = np.asarray(getattr(theta, "values", theta), dtype=float)
    return CoefficientPair(
        c_per_element=spec.c1 + (spec.c2 - spec.c1) * values,
        rho_per_element=spec.rho1 + (spec.rho2 - spec.rho1) * values,
    )


def restrict_to_free(matrix: sp.spmatrix, dofmap: DofMap) -> SparseSymMatrix:
    """Symmetric elimination of the Dirichlet rows and columns."""
    free = dofmap.free_dofs
    return sp.csr_matrix(matrix.tocsr()[free][:, free])


def _assemble(mesh: TriMesh, dofmap: DofMap, local: np.ndarray, coefficient: np.ndarray, restrict: bool) -> SparseSymMatrix:
    if dofmap.mesh is not mesh:
        raise AssemblyError("Dof map was built on a different mesh")
    coefficient = np.asarray(coefficient, dtype=float)
    if coefficient.shape != (mesh.n_triangles,):
        raise AssemblyError(
            f"Coefficient vector has shape {coefficient.shape}, expected ({mesh.n_triangles},)"
        )
    data = element_data(dofmap)
    values = (coefficient[:, None, None] * local).ravel()
    matrix = sp.coo_matrix((values, (data.rows, data.cols)), shape=(dofmap.n_dofs, dofmap.n_dofs)).tocsr()
    # duplicate summation order is not fixed, averaging with the transpose makes symmetry exact
    matrix = ((matrix + matrix.T) * 0.5).tocsr()
    matrix.sort_indices()
    return restrict_to_free(matrix, dofmap) if restrict else matrix


def assemble_stiffness(mesh: TriMesh, dofmap: DofMap, coeffs: CoefficientPair, restrict: bool = True) -> SparseSymMatrix:
    """A_uv = sum_e c_e * int_e grad(phi_u) . grad(phi_v), Dirichlet dofs eliminated when `restrict`."""
    return _assemble(mesh, dofmap, element_data(dofmap).stiffness, coeffs.c_per_element, restrict)


def assemble_mass(mesh: TriMesh, dofmap: DofMap, coeffs: CoefficientPair, restrict: bool = True) -> SparseSymMatrix:
    """B_uv = sum_e rho_e * int_e phi_u * phi_v, Dirichlet dofs eliminated when `restrict`."""
    return _assemble(mesh, dofmap, element_data(dofmap).mass, coeffs.rho_per_element, restrict)


def element_averages(dofmap: DofMap, u_full: np.ndarray):
    """
    Element averages of u^2 and |grad u|^2 for a full dof vector.

    Returns:
        Tuple of (mean_u2, mean_grad2), each of shape (n_triangles,)
    """
    data = element_data(dofmap)
    local = np.asarray(u_full)[dofmap.cell_dofs]
    u_q = local @ data.phi.T
    grad_q = np.einsum("ea,eqad->eqd", local, data.grad_phi)
    weights = data.quadrature.weights
    mean_u2 = (u_q**2) @ weights
    mean_grad2 = np.sum(grad_q**2, axis=2) @ weights
    return mean_u2, mean_grad2
