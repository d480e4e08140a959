import json
import logging
from datetime import datetime
from pathlib import Path
from typing import Optional, Tuple, Union
from uuid import uuid4

from pydantic import ValidationError

from eigendesign.artifacts.readers import read_density_csv
from eigendesign.controllers.artifact_service import ArtifactFiles, ArtifactService
from eigendesign.design.density import VolumeConstraint, initial_density, project_to_admissible
from eigendesign.design.krein import gray_area_fraction, krein_design, krein_radius, mismatch_area_fraction
from eigendesign.design.optimizer import RunHistory, run_projected_gradient
from eigendesign.exceptions import ArtifactError, EigenDesignException
from eigendesign.fem.mesh import MeshFactory, TriMesh
from eigendesign.pencil.suite import PencilSuite, run_pencil_suite
from eigendesign.schemas.base_schema import ResponseParams
from eigendesign.schemas.schema import (
    ExportResponse,
    ExportSummary,
    KreinCheck,
    KreinReport,
    KreinResponse,
    PencilSuiteResponse,
    RunConfig,
    RunResponse,
    RunSummary,
    Variant,
)

logger = logging.getLogger(__name__)

KREIN_THRESHOLD = 0.05
KREIN_VARIANTS = (Variant.MIN_DENOMINATOR_ONLY, Variant.MAX_DENOMINATOR_ONLY)


def _success(**kwargs) -> dict:
    return dict(
        ver="v1",
        ts=datetime.now().isoformat(),
        params=ResponseParams(status="SUCCESS", msgid=uuid4()),
        responseCode="OK",
        **kwargs,
    )


class ExperimentService:
    def _optimize(self, config: RunConfig, run_dir: Union[str, Path]) -> Tuple[TriMesh, RunHistory, RunSummary]:
        mesh = MeshFactory.create_mesh(config.domain, **config.mesh_params())
        history = run_projected_gradient(mesh, config.problem_spec(), config.solver_settings())
        summary = history.summary(gray_area_fraction(history.final_theta))
        summary.artifacts = ArtifactService(run_dir).write_run(mesh, config, history)
        return mesh, history, summary

    def run(self, config: RunConfig) -> RunResponse:
        try:
            _, _, summary = self._optimize(config, config.out_dir)
            return RunResponse(id="eigendesign.run", result=summary, **_success())
        except EigenDesignException as ee:
            raise ee
        except Exception as e:
            raise EigenDesignException(
                err_code="FAILED",
                message="Failed to run the optimization",
                error=e,
            )

    def verify_krein(self, config: RunConfig, threshold: float = KREIN_THRESHOLD) -> KreinResponse:
        """Both denominator-only problems on the disk against their explicit 0-1 designs."""
        try:
            checks = []
            for variant in KREIN_VARIANTS:
                values = config.model_dump(exclude={"variant", "domain", "c1", "c2"})
                variant_config = RunConfig.model_validate({**values, "variant": variant, "domain": "disk"})
                mesh, history, summary = self._optimize(variant_config, Path(config.out_dir) / variant.value)

                gamma = variant_config.gamma(mesh.total_area)
                mismatch = mismatch_area_fraction(history.final_theta, krein_design(mesh, variant, gamma))
                checks.append(
                    KreinCheck(
                        variant=variant,
                        radius=krein_radius(mesh, variant, gamma),
                        final_lambda1=summary.final_lambda1,
                        mismatch_fraction=mismatch,
                        gray_fraction=summary.gray_fraction,
                        passed=mismatch <= threshold,
                    )
                )
                logger.info("%s: mismatch area fraction %.4f (threshold %.2f)", variant.value, mismatch, threshold)

            report = KreinReport(threshold=threshold, checks=checks, passed=all(c.passed for c in checks))
            return KreinResponse(id="eigendesign.verify_krein", result=report, **_success())
        except EigenDesignException as ee:
            raise ee
        except Exception as e:
            raise EigenDesignException(
                err_code="FAILED",
                message="Failed to verify the analytic disk designs",
                error=e,
            )

    def pencil_suite(self, seed: int, trials: int, out_dir: Union[str, Path], suite: Optional[PencilSuite] = None) -> PencilSuiteResponse:
        try:
            report, records = run_pencil_suite(seed, trials, suite)
            report.trials_csv = ArtifactService(out_dir).write_trials(records)
            return PencilSuiteResponse(id="eigendesign.pencil_suite", result=report, **_success())
        except EigenDesignException as ee:
            raise ee
        except Exception as e:
            raise EigenDesignException(
                err_code="FAILED",
                message="Failed to run the pencil suite",
                error=e,
            )

    def export(self, run_dir: Union[str, Path]) -> ExportResponse:
        """Regenerate the heatmaps of a finished run from its stored config and density CSV."""
        try:
            artifacts = ArtifactService(run_dir)
            config_path = artifacts.path(ArtifactFiles.RUN_CONFIG)
            try:
                config = RunConfig.model_validate_json(config_path.read_text(encoding="utf-8"))
            except (OSError, ValidationError, json.JSONDecodeError) as exc:
                raise ArtifactError(f"Cannot load {config_path}: {exc}", error=exc) from exc

            mesh = MeshFactory.create_mesh(config.domain, **config.mesh_params())
            vc = VolumeConstraint.from_fraction(mesh, config.volume_fraction)
            initial = project_to_admissible(
                initial_density(mesh, config.initial_design, config.volume_fraction), vc, config.vol_tol
            )
            final = read_density_csv(mesh, artifacts.path(ArtifactFiles.DENSITY_CSV))
            written = artifacts.write_heatmaps(mesh, initial, final, config.heatmap_resolution)
            return ExportResponse(
                id="eigendesign.export",
                result=ExportSummary(run_dir=str(run_dir), written=written),
                **_success(),
            )
        except EigenDesignException as ee:
            raise ee
        except Exception as e:
            raise EigenDesignException(
                err_code="FAILED",
                message=f"Failed to export {run_dir}",
                error=e,
            )
