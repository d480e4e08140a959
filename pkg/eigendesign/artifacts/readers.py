import logging
from pathlib import Path
from typing import List, Union

import numpy as np

from eigendesign.artifacts.writers import DENSITY_CSV_HEADER, HISTORY_CSV_HEADER
from eigendesign.design.density import DensityField
from eigendesign.exceptions import ArtifactError
from eigendesign.fem.mesh import TriMesh
from eigendesign.schemas.schema import IterationRecord

logger = logging.getLogger(__name__)


def _read_table(path: Union[str, Path], header: str, n_columns: int) -> np.ndarray:
    path = Path(path)
    try:
        with path.open(encoding="utf-8") as f:
            first = f.readline().strip()
            if first != header:
                raise ArtifactError(f"{path}: expected header {header!r}, got {first!r}", err_code="INVALID_FORMAT")
            table = np.loadtxt(f, delimiter=",", ndmin=2)
    except ArtifactError:
        raise
    except (OSError, ValueError) as exc:
        raise ArtifactError(f"Failed to read {path}: {exc}", error=exc) from exc
    if table.size and table.shape[1] != n_columns:
        raise ArtifactError(f"{path}: expected {n_columns} columns, got {table.shape[1]}", err_code="INVALID_FORMAT")
    return table.reshape(-1, n_columns)


def read_density_csv(mesh: TriMesh, path: Union[str, Path]) -> DensityField:
    """Density written by write_density_csv; rows may come in any order."""
    table = _read_table(path, DENSITY_CSV_HEADER, 2)
    elements = table[:, 0].astype(np.int64)
    if not np.array_equal(np.sort(elements), np.arange(mesh.n_triangles)):
        raise ArtifactError(
            f"{path}: element ids do not match a mesh with {mesh.n_triangles} triangles",
            err_code="DIMENSION_MISMATCH",
        )
    values = np.empty(mesh.n_triangles)
    values[elements] = table[:, 1]
    logger.debug("Read %d densities from '%s'", len(values), path)
    return DensityField(values, mesh)


def read_history_csv(path: Union[str, Path]) -> List[IterationRecord]:
    table = _read_table(path, HISTORY_CSV_HEADER, 4)
    return [
        IterationRecord(iteration=int(row[0]), lambda1=row[1], volume_error=row[2], stationarity=row[3])
        for row in table
    ]
