import logging
from pathlib import Path
from typing import Dict, List, Union

import numpy as np

from eigendesign.artifacts.writers import (
    atomic_path,
    write_density_csv,
    write_density_vtk,
    write_eigenfunction_vtk,
    write_heatmap,
    write_history_csv,
    write_mesh_vtk,
    write_text,
)
from eigendesign.design.density import DensityField
from eigendesign.design.optimizer import RunHistory
from eigendesign.fem.mesh import TriMesh
from eigendesign.pencil.checks import TrialRecord
from eigendesign.schemas.schema import RunArtifacts, RunConfig

logger = logging.getLogger(__name__)


class ArtifactFiles:
    DENSITY_VTK = "density.vtk"
    DENSITY_CSV = "density.csv"
    EIGENFUNCTION_VTK = "eigenfunction.vtk"
    HISTORY_CSV = "history.csv"
    HEATMAP = "heatmap.ppm"
    INITIAL_HEATMAP = "initial_heatmap.ppm"
    MESH_VTK = "mesh.vtk"
    RUN_CONFIG = "run_config.json"
    PENCIL_TRIALS = "pencil_trials.csv"


class ArtifactService:
    """Lays out the files of a run under one directory."""

    def __init__(self, run_dir: Union[str, Path]):
        self.run_dir = Path(run_dir)

    def path(self, name: str) -> Path:
        return self.run_dir / name

    def write_run(self, mesh: TriMesh, config: RunConfig, history: RunHistory) -> RunArtifacts:
        resolution = config.heatmap_resolution
        files: Dict[str, Path] = {
            "run_config": self.path(ArtifactFiles.RUN_CONFIG),
            "mesh_vtk": self.path(ArtifactFiles.MESH_VTK),
            "density_vtk": self.path(ArtifactFiles.DENSITY_VTK),
            "density_csv": self.path(ArtifactFiles.DENSITY_CSV),
            "initial_heatmap": self.path(ArtifactFiles.INITIAL_HEATMAP),
            "heatmap": self.path(ArtifactFiles.HEATMAP),
        }
        write_text(config.model_dump_json(indent=2), files["run_config"])
        write_mesh_vtk(mesh, files["mesh_vtk"])
        write_density_vtk(mesh, history.final_theta, files["density_vtk"])
        write_density_csv(history.final_theta, files["density_csv"])
        write_heatmap(mesh, history.initial_theta, files["initial_heatmap"], resolution)
        write_heatmap(mesh, history.final_theta, files["heatmap"], resolution)
        if history.records:
            files["history_csv"] = self.path(ArtifactFiles.HISTORY_CSV)
            write_history_csv(history, files["history_csv"])
        if history.final_pair is not None and history.dofmap is not None:
            files["eigenfunction_vtk"] = self.path(ArtifactFiles.EIGENFUNCTION_VTK)
            write_eigenfunction_vtk(history.dofmap, history.final_pair.u, files["eigenfunction_vtk"])

        logger.info("Run artifacts written to '%s'", self.run_dir)
        return RunArtifacts(**{key: str(path) for key, path in files.items()})

    def write_heatmaps(self, mesh: TriMesh, initial: DensityField, final: DensityField, resolution: int) -> Dict[str, str]:
        written = {
            "initial_heatmap": self.path(ArtifactFiles.INITIAL_HEATMAP),
            "heatmap": self.path(ArtifactFiles.HEATMAP),
        }
        write_heatmap(mesh, initial, written["initial_heatmap"], resolution)
        write_heatmap(mesh, final, written["heatmap"], resolution)
        return {key: str(path) for key, path in written.items()}

    def write_trials(self, records: List[TrialRecord]) -> str:
        """Per-trial margins of the pencil suite; skipped trials carry an empty margin."""
        path = self.path(ArtifactFiles.PENCIL_TRIALS)
        lines = ["pencil,trial,lambda_low,lambda_high,margin,status"]
        for r in records:
            margin = "" if np.isnan(r.margin) else f"{r.margin:.17g}"
            lines.append(f"{r.pencil},{r.trial},{r.lambda_low:.17g},{r.lambda_high:.17g},{margin},{r.status}")
        with atomic_path(path) as tmp:
            tmp.write_text("\n".join(lines) + "\n", encoding="utf-8")
        logger.info("Pencil trials written to '%s' (%d rows)", path, len(records))
        return str(path)
