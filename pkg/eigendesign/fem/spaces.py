"""
Lagrange spaces on triangles, the element quadrature rule and dof numbering.

Basis functions are written in barycentric coordinates (L0, L1, L2), so
physical gradients follow from the constant gradients of the barycentric
coordinates without a reference-element mapping.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Iterable

import numpy as np

from eigendesign.exceptions import AssemblyError
from eigendesign.fem.mesh import DIRICHLET_LABEL, TriMesh

logger = logging.getLogger(__name__)


class Space(str, Enum):
    P0 = "P0"
    P1 = "P1"
    P2 = "P2"


@dataclass(frozen=True, eq=False)
class Quadrature:
    """Barycentric points (n_points, 3) and weights normalised to sum to one."""

    points: np.ndarray
    weights: np.ndarray

    @property
    def n_points(self) -> int:
        return len(self.weights)


def triangle_rule_degree5() -> Quadrature:
    """Symmetric 7-point rule, exact for polynomials of degree 5."""
    s = np.sqrt(15.0)
    a, b = (6.0 - s) / 21.0, (6.0 + s) / 21.0
    wa, wb = (155.0 - s) / 1200.0, (155.0 + s) / 1200.0
    points = [(1 / 3, 1 / 3, 1 / 3)]
    weights = [9.0 / 40.0]
    for t, w in ((a, wa), (b, wb)):
        c = 1.0 - 2.0 * t
        points += [(c, t, t), (t, c, t), (t, t, c)]
        weights += [w, w, w]
    return Quadrature(points=np.array(points), weights=np.array(weights))


def local_dof_count(space: Space) -> int:
    return {Space.P0: 1, Space.P1: 3, Space.P2: 6}[Space(space)]


def basis_values(space: Space, bary: np.ndarray) -> np.ndarray:
    """
    Basis values at barycentric points.

    Local ordering for P2: vertices 0, 1, 2 then the midpoints of edges
    (0,1), (1,2), (2,0).

    Returns:
        Array of shape (n_points, n_local)
    """
    L = np.atleast_2d(bary)
    space = Space(space)
    if space is Space.P0:
        return np.ones((len(L), 1))
    if space is Space.P1:
        return L.copy()
    vertex = L * (2.0 * L - 1.0)
    edge = 4.0 * L * np.roll(L, -1, axis=1)
    return np.hstack([vertex, edge])


def basis_gradient_coefficients(space: Space, bary: np.ndarray) -> np.ndarray:
    """
    Coefficients C with grad(phi_a) = sum_k C[q, a, k] grad(L_k).

    Returns:
        Array of shape (n_points, n_local, 3)
    """
    L = np.atleast_2d(bary)
    nq = len(L)
    space = Space(space)
    if space is Space.P0:
        return np.zeros((nq, 1, 3))
    if space is Space.P1:
        return np.broadcast_to(np.eye(3), (nq, 3, 3)).copy()
    coeffs = np.zeros((nq, 6, 3))
    for k in range(3):
        coeffs[:, k, k] = 4.0 * L[:, k] - 1.0
        nxt = (k + 1) % 3
        coeffs[:, 3 + k, k] = 4.0 * L[:, nxt]
        coeffs[:, 3 + k, nxt] = 4.0 * L[:, k]
    return coeffs


def barycentric_gradients(mesh: TriMesh) -> np.ndarray:
    """Constant gradients of L0, L1, L2 on every triangle, shape (n_triangles, 3, 2)."""
    p = mesh.vertices[mesh.triangles]
    twice_area = 2.0 * mesh.signed_areas[:, None]
    grads = np.empty((mesh.n_triangles, 3, 2))
    for k in range(3):
        a = p[:, (k + 1) % 3]
        b = p[:, (k + 2) % 3]
        grads[:, k, 0] = (a[:, 1] - b[:, 1]) / twice_area[:, 0]
        grads[:, k, 1] = (b[:, 0] - a[:, 0]) / twice_area[:, 0]
    return grads


@dataclass(frozen=True, eq=False)
class DofMap:
    """
    Global numbering of the degrees of freedom of a space on a mesh.

    P2 numbers vertex dofs first, then one dof per mesh edge (mesh.edges order),
    so an edge shared by two triangles maps to the same dof from both sides.
    """

    mesh: TriMesh
    space: Space
    n_dofs: int
    cell_dofs: np.ndarray
    dirichlet_dofs: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))

    @property
    def n_local(self) -> int:
        return self.cell_dofs.shape[1]

    @cached_property
    def free_dofs(self) -> np.ndarray:
        mask = np.ones(self.n_dofs, dtype=bool)
        mask[self.dirichlet_dofs] = False
        return np.flatnonzero(mask)

    @property
    def n_free(self) -> int:
        return len(self.free_dofs)

    def extend(self, free_values: np.ndarray) -> np.ndarray:
        """Full dof vector with zeros on Dirichlet dofs."""
        free_values = np.asarray(free_values)
        if free_values.shape[0] != self.n_free:
            raise AssemblyError(f"Expected {self.n_free} free dof values, got {free_values.shape[0]}")
        full = np.zeros((self.n_dofs,) + free_values.shape[1:])
        full[self.free_dofs] = free_values
        return full

    def dof_coordinates(self) -> np.ndarray:
        mesh = self.mesh
        if self.space is Space.P0:
            return mesh.centroids
        if self.space is Space.P1:
            return mesh.vertices
        midpoints = mesh.vertices[mesh.edges].mean(axis=1)
        return np.vstack([mesh.vertices, midpoints])


def build_dofmap(mesh: TriMesh, space: Space = Space.P2, dirichlet_labels: Iterable[int] = (DIRICHLET_LABEL,)) -> DofMap:
    space = Space(space)
    if space is Space.P0:
        cell_dofs = np.arange(mesh.n_triangles)[:, None]
        return DofMap(mesh=mesh, space=space, n_dofs=mesh.n_triangles, cell_dofs=cell_dofs)

    labels = np.isin(mesh.boundary_labels, list(dirichlet_labels))
    boundary_vertices = np.unique(mesh.boundary_edges[labels])
    if space is Space.P1:
        dirichlet = boundary_vertices
        cell_dofs = mesh.triangles
        n_dofs = mesh.n_vertices
    else:
        boundary_edge_dofs = mesh.n_vertices + mesh.boundary_edge_indices[labels]
        dirichlet = np.union1d(boundary_vertices, boundary_edge_dofs)
        cell_dofs = np.hstack([mesh.triangles, mesh.n_vertices + mesh.triangle_edges])
        n_dofs = mesh.n_vertices + len(mesh.edges)

    dofmap = DofMap(
        mesh=mesh,
        space=space,
        n_dofs=n_dofs,
        cell_dofs=np.ascontiguousarray(cell_dofs, dtype=np.int64),
        dirichlet_dofs=np.asarray(dirichlet, dtype=np.int64),
    )
    logger.debug("%s dof map: %d dofs, %d Dirichlet", space.value, n_dofs, len(dirichlet))
    return dofmap
