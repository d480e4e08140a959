"""
Writers for densities, eigenfunctions, meshes, histories and heatmaps.

Every writer goes through a temporary file in the target directory that is
renamed into place, so a reader never sees a partial file.
"""
import logging
import os
import tempfile
from contextlib import contextmanager
from pathlib import Path
from typing import Iterable, Iterator, Union

import meshio
import numpy as np
from matplotlib.tri import Triangulation
from PIL import Image

from eigendesign.exceptions import ArtifactError
from eigendesign.fem.mesh import TriMesh
from eigendesign.fem.spaces import DofMap
from eigendesign.schemas.schema import IterationRecord

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

DENSITY_CSV_HEADER = "element,theta"
HISTORY_CSV_HEADER = "iter,lambda1,volume_error,stationarity"
MIN_HEATMAP_RESOLUTION = 64
VTK_VERSION = "4.2"


@contextmanager
def atomic_path(path: PathLike) -> Iterator[Path]:
    """Yield a temporary path next to `path`; it replaces `path` when the block succeeds."""
    target = Path(path)
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.", suffix=".tmp")
        os.close(fd)
    except OSError as exc:
        raise ArtifactError(f"Cannot write to {target.parent}: {exc}", error=exc) from exc
    tmp = Path(tmp)
    try:
        yield tmp
        os.replace(tmp, target)
    except ArtifactError:
        raise
    except Exception as exc:
        raise ArtifactError(f"Failed to write {target}: {exc}", error=exc) from exc
    finally:
        if tmp.exists():
            tmp.unlink()


def _meshio_mesh(mesh: TriMesh) -> meshio.Mesh:
    # VTK points are three dimensional
    points = np.column_stack([mesh.vertices, np.zeros(mesh.n_vertices)])
    return meshio.Mesh(points=points, cells=[("triangle", np.asarray(mesh.triangles))])


def _write_vtk(m: meshio.Mesh, path: PathLike) -> None:
    with atomic_path(path) as tmp:
        meshio.write(tmp, m, file_format="vtk" + VTK_VERSION.replace(".", ""), binary=False)


def write_mesh_vtk(mesh: TriMesh, path: PathLike) -> None:
    _write_vtk(_meshio_mesh(mesh), path)
    logger.info("Mesh written to '%s' (nodes=%d, tris=%d)", path, mesh.n_vertices, mesh.n_triangles)


def write_density_vtk(mesh: TriMesh, theta, path: PathLike) -> None:
    """
    Legacy ASCII VTK unstructured grid with the cell scalar field `density`.

    meshio stores cell data of the legacy format as FIELD arrays, so `density`
    is a one-component array of the CELL_DATA section.
    """
    values = np.asarray(getattr(theta, "values", theta), dtype=float)
    if values.shape != (mesh.n_triangles,):
        msg = f"density length {values.shape[0]} != n_tris {mesh.n_triangles}"
        logger.error("write_density_vtk: %s", msg)
        raise ArtifactError(msg, err_code="DIMENSION_MISMATCH")
    m = _meshio_mesh(mesh)
    m.cell_data = {"density": [values]}
    _write_vtk(m, path)
    logger.info("Density written to '%s' (tris=%d)", path, mesh.n_triangles)


def write_eigenfunction_vtk(dofmap: DofMap, u_free: np.ndarray, path: PathLike, name: str = "u") -> None:
    """Eigenfunction values at the mesh vertices as point data."""
    mesh = dofmap.mesh
    full = dofmap.extend(u_free)
    m = _meshio_mesh(mesh)
    # vertex dofs come first in both P1 and P2 numbering
    m.point_data = {name: full[: mesh.n_vertices]}
    _write_vtk(m, path)
    logger.info("Eigenfunction written to '%s' (nodes=%d)", path, mesh.n_vertices)


def write_density_csv(theta, path: PathLike) -> None:
    values = np.asarray(getattr(theta, "values", theta), dtype=float)
    table = np.column_stack([np.arange(len(values)), values])
    with atomic_path(path) as tmp:
        np.savetxt(tmp, table, fmt=["%d", "%.17g"], delimiter=",", header=DENSITY_CSV_HEADER, comments="", newline="\n")
    logger.info("Density CSV written to '%s' (%d rows)", path, len(values))


def write_history_csv(history, path: PathLike) -> None:
    """One row per iteration; accepts a RunHistory or a sequence of IterationRecord."""
    records: Iterable[IterationRecord] = getattr(history, "records", history)
    table = np.array([[r.iteration, r.lambda1, r.volume_error, r.stationarity] for r in records], dtype=float)
    if table.size == 0:
        raise ArtifactError("Run history is empty", err_code="EMPTY_HISTORY")
    with atomic_path(path) as tmp:
        np.savetxt(tmp, table, fmt=["%d", "%.17g", "%.17g", "%.17g"], delimiter=",", header=HISTORY_CSV_HEADER, comments="", newline="\n")
    logger.info("History written to '%s' (%d rows)", path, len(table))


def heatmap_pixels(mesh: TriMesh, theta, resolution: int = 256) -> np.ndarray:
    """
    Gray levels of a raster over the mesh bounding box, row 0 at the top.

    theta = 0 maps to white, theta = 1 to black; pixels whose centre lies
    outside every triangle are white.

    Returns:
        uint8 array of shape (height, resolution)
    """
    if resolution < MIN_HEATMAP_RESOLUTION:
        raise ArtifactError(f"resolution must be at least {MIN_HEATMAP_RESOLUTION}, got {resolution}", err_code="INVALID_RESOLUTION")
    values = np.asarray(getattr(theta, "values", theta), dtype=float)
    x_min, y_min, x_max, y_max = mesh.bounding_box
    width, height = x_max - x_min, y_max - y_min
    n_cols = resolution
    n_rows = max(1, int(round(resolution * height / width)))

    xs = x_min + (np.arange(n_cols) + 0.5) * width / n_cols
    ys = y_max - (np.arange(n_rows) + 0.5) * height / n_rows
    X, Y = np.meshgrid(xs, ys)

    finder = Triangulation(mesh.vertices[:, 0], mesh.vertices[:, 1], mesh.triangles).get_trifinder()
    index = finder(X, Y)
    inside = index >= 0
    gray = np.full(index.shape, 255.0)
    gray[inside] = np.round(255.0 * (1.0 - np.clip(values[index[inside]], 0.0, 1.0)))
    return gray.astype(np.uint8)


def write_heatmap(mesh: TriMesh, theta, path: PathLike, resolution: int = 256) -> None:
    """Binary portable pixmap (P6) of the density."""
    pixels = heatmap_pixels(mesh, theta, resolution)
    with atomic_path(path) as tmp:
        Image.fromarray(pixels).convert("RGB").save(tmp, format="PPM")
    logger.info("Heatmap written to '%s' (%dx%d)", path, pixels.shape[1], pixels.shape[0])


def write_text(text: str, path: PathLike) -> None:
    with atomic_path(path) as tmp:
        tmp.write_text(text, encoding="utf-8")
