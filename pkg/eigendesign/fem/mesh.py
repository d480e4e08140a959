"""
Triangular meshes of the unit disk and of rectangles.

The disk is approximated by the regular polygon inscribed in the circle and is
meshed with concentric rings of vertices; rectangles use a structured grid
with every cell split into two triangles. Meshes are immutable once built.
"""
import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Tuple, Union

import numpy as np

from eigendesign.exceptions import MeshError

logger = logging.getLogger(__name__)

DIRICHLET_LABEL = 1
MIN_BOUNDARY_VERTICES = 8


@dataclass(frozen=True)
class DiskDomain:
    radius: float
    n_boundary: int


@dataclass(frozen=True)
class SquareDomain:
    ratio: float
    n_per_side: int
    side: float = 1.0


DomainKind = Union[DiskDomain, SquareDomain]


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.ascontiguousarray(array)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class TriMesh:
    """
    Conforming triangulation with labelled boundary edges.

    Attributes:
        vertices: (n_vertices, 2) coordinates
        triangles: (n_triangles, 3) vertex indices, counterclockwise
        boundary_edges: (n_boundary_edges, 2) vertex index pairs
        boundary_labels: (n_boundary_edges,) integer labels
        domain: the domain the mesh approximates
    """

    vertices: np.ndarray
    triangles: np.ndarray
    boundary_edges: np.ndarray
    boundary_labels: np.ndarray
    domain: DomainKind = field(compare=False)

    def __post_init__(self):
        object.__setattr__(self, "vertices", _frozen(np.asarray(self.vertices, dtype=float)))
        object.__setattr__(self, "triangles", _frozen(np.asarray(self.triangles, dtype=np.int64)))
        object.__setattr__(self, "boundary_edges", _frozen(np.asarray(self.boundary_edges, dtype=np.int64)))
        object.__setattr__(self, "boundary_labels", _frozen(np.asarray(self.boundary_labels, dtype=np.int64)))

    @property
    def n_vertices(self) -> int:
        return self.vertices.shape[0]

    @property
    def n_triangles(self) -> int:
        return self.triangles.shape[0]

    @cached_property
    def signed_areas(self) -> np.ndarray:
        p = self.vertices[self.triangles]
        d1 = p[:, 1] - p[:, 0]
        d2 = p[:, 2] - p[:, 0]
        return _frozen(0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]))

    @cached_property
    def total_area(self) -> float:
        return float(np.sum(self.signed_areas))

    @cached_property
    def centroids(self) -> np.ndarray:
        return _frozen(self.vertices[self.triangles].mean(axis=1))

    @cached_property
    def _edge_table(self) -> Tuple[np.ndarray, np.ndarray]:
        # local edge k joins local vertices k and k+1
        local = self.triangles[:, [0, 1, 1, 2, 2, 0]].reshape(-1, 3, 2)
        keys = np.sort(local, axis=2).reshape(-1, 2)
        edges, inverse = np.unique(keys, axis=0, return_inverse=True)
        return _frozen(edges), _frozen(inverse.reshape(-1, 3))

    @property
    def edges(self) -> np.ndarray:
        """Unique edges as sorted vertex pairs."""
        return self._edge_table[0]

    @property
    def triangle_edges(self) -> np.ndarray:
        """Edge index of each local edge, shape (n_triangles, 3)."""
        return self._edge_table[1]

    @cached_property
    def edge_triangle_count(self) -> np.ndarray:
        return _frozen(np.bincount(self.triangle_edges.ravel(), minlength=len(self.edges)))

    @cached_property
    def boundary_edge_indices(self) -> np.ndarray:
        """Indices into `edges` of the labelled boundary edges, aligned with `boundary_labels`."""
        lookup = {tuple(edge): index for index, edge in enumerate(self.edges.tolist())}
        keys = np.sort(self.boundary_edges, axis=1).tolist()
        try:
            return _frozen(np.array([lookup[tuple(key)] for key in keys], dtype=np.int64))
        except KeyError as exc:
            raise MeshError(f"Boundary edge {exc.args[0]} is not an edge of the triangulation") from exc

    @property
    def bounding_box(self) -> Tuple[float, float, float, float]:
        lo = self.vertices.min(axis=0)
        hi = self.vertices.max(axis=0)
        return float(lo[0]), float(lo[1]), float(hi[0]), float(hi[1])


def element_areas(mesh: TriMesh) -> np.ndarray:
    """Per-triangle areas; they sum to the polygonal domain area."""
    return mesh.signed_areas.copy()


def polygon_area(domain: DomainKind) -> float:
    """Exact area of the polygon a mesh of `domain` covers."""
    if isinstance(domain, DiskDomain):
        n = domain.n_boundary
        return 0.5 * n * domain.radius**2 * math.sin(2.0 * math.pi / n)
    return domain.ratio * domain.side**2


def validate_mesh(mesh: TriMesh, rel_tol: float = 1e-12) -> None:
    """Orientation, edge manifoldness, boundary label coverage and area identity."""
    if mesh.n_triangles == 0:
        raise MeshError("Mesh has no triangles")
    if np.any(mesh.signed_areas <= 0.0):
        bad = int(np.argmin(mesh.signed_areas))
        raise MeshError(f"Triangle {bad} is degenerate or clockwise (area {mesh.signed_areas[bad]:.3e})")

    counts = mesh.edge_triangle_count
    if np.any(counts > 2):
        raise MeshError("Edge shared by more than two triangles")
    open_edges = np.flatnonzero(counts == 1)
    labelled = mesh.boundary_edge_indices
    if len(np.unique(labelled)) != len(labelled):
        raise MeshError("Boundary edge listed twice")
    if not np.array_equal(np.sort(open_edges), np.sort(labelled)):
        raise MeshError(
            f"Boundary labels cover {len(labelled)} edges but the mesh has {len(open_edges)} boundary edges"
        )

    expected = polygon_area(mesh.domain)
    if abs(mesh.total_area - expected) > rel_tol * max(1.0, expected) * mesh.n_triangles:
        raise MeshError(f"Triangle areas sum to {mesh.total_area!r}, polygon area is {expected!r}")


def _ring_band(inner: np.ndarray, outer: np.ndarray) -> list:
    """Triangulate the band between two angle-sorted closed rings by merging on angle."""
    triangles = []
    n_in, n_out = len(inner), len(outer)
    if n_in == 1:
        for j in range(n_out):
            triangles.append((inner[0], outer[j], outer[(j + 1) % n_out]))
        return triangles

    i = j = 0
    while i < n_in or j < n_out:
        # compare the angular position of the next vertex on each ring
        next_in = (i + 1) / n_in
        next_out = (j + 1) / n_out
        if j < n_out and (i >= n_in or next_out <= next_in):
            triangles.append((inner[i % n_in], outer[j % n_out], outer[(j + 1) % n_out]))
            j += 1
        else:
            triangles.append((inner[i % n_in], outer[j % n_out], inner[(i + 1) % n_in]))
            i += 1
    return triangles


def build_disk_mesh(n_boundary: int, radius: float = 1.0) -> TriMesh:
    """
    Concentric-ring triangulation of the regular n_boundary-gon inscribed in the circle.

    Ring k (k = 1..m) sits at radius k*R/m and carries round(n_boundary*k/m)
    vertices starting at angle 0; ring m is the boundary polygon. Rings are
    joined to their inner neighbour by an angle-ordered merge, the first ring
    is fanned to the centre vertex.
    """
    if n_boundary < MIN_BOUNDARY_VERTICES:
        raise MeshError(f"n_boundary must be at least {MIN_BOUNDARY_VERTICES}, got {n_boundary}")
    if radius <= 0:
        raise MeshError(f"radius must be positive, got {radius}")

    n_rings = max(1, round(n_boundary / 6))
    vertices = [(0.0, 0.0)]
    rings = [np.array([0])]
    for k in range(1, n_rings + 1):
        count = n_boundary if k == n_rings else max(3, round(n_boundary * k / n_rings))
        angles = 2.0 * np.pi * np.arange(count) / count
        r = radius * k / n_rings
        start = len(vertices)
        vertices.extend(zip(r * np.cos(angles), r * np.sin(angles)))
        rings.append(np.arange(start, start + count))

    triangles = []
    for inner, outer in zip(rings[:-1], rings[1:]):
        triangles.extend(_ring_band(inner, outer))

    boundary = rings[-1]
    boundary_edges = np.column_stack([boundary, np.roll(boundary, -1)])
    mesh = TriMesh(
        vertices=np.array(vertices),
        triangles=np.array(triangles),
        boundary_edges=boundary_edges,
        boundary_labels=np.full(len(boundary_edges), DIRICHLET_LABEL),
        domain=DiskDomain(radius=radius, n_boundary=n_boundary),
    )
    validate_mesh(mesh)
    logger.debug(
        "Disk mesh: %d rings, %d vertices, %d triangles", n_rings, mesh.n_vertices, mesh.n_triangles
    )
    return mesh


def build_square_mesh(n_per_side: int, ratio: float = 1.0) -> TriMesh:
    """
    Structured triangulation of [0, ratio] x [0, 1].

    The grid has n_per_side cells vertically and round(n_per_side*ratio)
    horizontally, each cell split along its lower-left to upper-right diagonal.
    """
    if n_per_side < 2:
        raise MeshError(f"n_per_side must be at least 2, got {n_per_side}")
    if ratio <= 0:
        raise MeshError(f"ratio must be positive, got {ratio}")
    nx = round(n_per_side * ratio)
    ny = n_per_side
    if nx < 1 or not math.isclose(nx, n_per_side * ratio, rel_tol=1e-9):
        raise MeshError(f"n_per_side * ratio must be a positive integer, got {n_per_side * ratio}")

    xs = np.linspace(0.0, ratio, nx + 1)
    ys = np.linspace(0.0, 1.0, ny + 1)
    gx, gy = np.meshgrid(xs, ys)
    vertices = np.column_stack([gx.ravel(), gy.ravel()])

    def index(i, j):
        return j * (nx + 1) + i

    i, j = np.meshgrid(np.arange(nx), np.arange(ny))
    i, j = i.ravel(), j.ravel()
    v00, v10, v01, v11 = index(i, j), index(i + 1, j), index(i, j + 1), index(i + 1, j + 1)
    lower = np.column_stack([v00, v10, v11])
    upper = np.column_stack([v00, v11, v01])
    triangles = np.stack([lower, upper], axis=1).reshape(-1, 3)

    bottom = [(index(k, 0), index(k + 1, 0)) for k in range(nx)]
    right = [(index(nx, k), index(nx, k + 1)) for k in range(ny)]
    top = [(index(k + 1, ny), index(k, ny)) for k in reversed(range(nx))]
    left = [(index(0, k + 1), index(0, k)) for k in reversed(range(ny))]
    boundary_edges = np.array(bottom + right + top + left)

    mesh = TriMesh(
        vertices=vertices,
        triangles=triangles,
        boundary_edges=boundary_edges,
        boundary_labels=np.full(len(boundary_edges), DIRICHLET_LABEL),
        domain=SquareDomain(ratio=ratio, n_per_side=n_per_side),
    )
    validate_mesh(mesh)
    logger.debug("Square mesh: %dx%d cells, %d triangles", nx, ny, mesh.n_triangles)
    return mesh


class MeshFactory:
    """Factory for meshes of the supported domain kinds"""

    @staticmethod
    def create_mesh(kind: str = "disk", **params) -> TriMesh:
        """
        Create a mesh of the given domain kind

        Args:
            kind: "disk" or "square"
            params: n_boundary/radius for the disk, n_per_side/ratio for the square

        Returns:
            The validated mesh
        """
        if kind == "disk":
            return build_disk_mesh(params.get("n_boundary", 200), params.get("radius", 1.0))
        elif kind == "square":
            return build_square_mesh(params.get("n_per_side", 50), params.get("ratio", 1.0))
        else:
            raise MeshError(f"Unsupported domain kind: {kind}")
