import re
from enum import Enum
from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_serializer, field_validator, model_validator
from pydantic_core import PydanticCustomError

from eigendesign.fem.spaces import Space
from eigendesign.schemas.base_schema import BaseResponse


class Variant(str, Enum):
    MAX_BOTH = "max_both"
    MAX_NUMERATOR_ONLY = "max_numerator_only"
    MAX_DENOMINATOR_ONLY = "max_denominator_only"
    MIN_DENOMINATOR_ONLY = "min_denominator_only"

    @property
    def sign(self) -> int:
        """+1 for maximization, -1 for minimization."""
        return -1 if self is Variant.MIN_DENOMINATOR_ONLY else 1

    @property
    def denominator_only(self) -> bool:
        return self in (Variant.MAX_DENOMINATOR_ONLY, Variant.MIN_DENOMINATOR_ONLY)


class InitialDesignKind(str, Enum):
    UNIFORM = "uniform"
    HALFPLANE = "halfplane"
    FROM_FILE = "from_file"


_INITIAL_DESIGN = re.compile(r"^\s*(uniform|halfplane|from_file)\s*(?:\((.*)\))?\s*$")


class InitialDesign(BaseModel):
    """
    Starting density before the first projection.

    `halfplane` puts material 2 on the left part of the bounding box whose
    width share is the volume fraction; `halfplane(x)` uses the absolute
    threshold x instead. `from_file(path)` reads a density CSV.
    """

    model_config = ConfigDict(frozen=True)

    kind: InitialDesignKind = InitialDesignKind.UNIFORM
    x_threshold: Optional[float] = None
    path: Optional[str] = None

    @classmethod
    def parse(cls, text: str) -> "InitialDesign":
        match = _INITIAL_DESIGN.match(text)
        if not match:
            raise ValueError(f"initial_design must be uniform, halfplane, halfplane(<x>) or from_file(<path>), got {text!r}")
        kind, arg = InitialDesignKind(match.group(1)), match.group(2)
        arg = arg.strip() if arg is not None else None
        if kind is InitialDesignKind.UNIFORM:
            if arg:
                raise ValueError("uniform takes no argument")
            return cls(kind=kind)
        if kind is InitialDesignKind.HALFPLANE:
            if not arg:
                return cls(kind=kind)
            try:
                return cls(kind=kind, x_threshold=float(arg))
            except ValueError:
                raise ValueError(f"halfplane threshold must be a number, got {arg!r}") from None
        if not arg:
            raise ValueError("from_file needs a path")
        return cls(kind=kind, path=arg)

    def __str__(self) -> str:
        if self.kind is InitialDesignKind.HALFPLANE and self.x_threshold is not None:
            return f"halfplane({self.x_threshold!r})"
        if self.kind is InitialDesignKind.FROM_FILE:
            return f"from_file({self.path})"
        return self.kind.value


def _variant_error(message: str, *fields: str) -> PydanticCustomError:
    return PydanticCustomError("variant_invariant", message, {"fields": list(fields)})


class ProblemSpec(BaseModel):
    """Material constants, volume target, variant and projected-gradient parameters."""

    model_config = ConfigDict(extra="forbid", validate_default=True)

    variant: Variant = Variant.MAX_BOTH
    c1: float = Field(0.5, gt=0)
    c2: float = Field(1.0, gt=0)
    rho1: float = Field(0.3, gt=0)
    rho2: float = Field(0.7, gt=0)
    volume_fraction: float = Field(0.5, gt=0, lt=1)
    stepsize: float = Field(0.05, gt=0)
    max_iter: int = Field(200, gt=0)
    initial_design: InitialDesign = Field(default_factory=InitialDesign)
    vol_tol: float = Field(1e-7, gt=0)
    stationarity_tol: Optional[float] = Field(None, gt=0)

    @field_validator("initial_design", mode="before")
    @classmethod
    def parse_initial_design(cls, value):
        if isinstance(value, str):
            return InitialDesign.parse(value)
        return value

    @field_serializer("initial_design")
    def dump_initial_design(self, value: InitialDesign) -> str:
        return str(value)

    @model_validator(mode="after")
    def check_variant(self):
        given = self.model_fields_set
        if self.variant is Variant.MAX_NUMERATOR_ONLY and not given & {"rho1", "rho2"}:
            self.rho1 = self.rho2 = 1.0
        if self.variant.denominator_only and not given & {"c1", "c2"}:
            self.c1 = self.c2 = 1.0

        if self.variant is Variant.MAX_BOTH:
            if not self.c1 < self.c2:
                raise _variant_error("max_both requires c1 < c2", "variant", "c1", "c2")
            if not self.rho1 < self.rho2:
                raise _variant_error("max_both requires rho1 < rho2", "variant", "rho1", "rho2")
        elif self.variant is Variant.MAX_NUMERATOR_ONLY:
            if self.rho1 != self.rho2:
                raise _variant_error("max_numerator_only requires rho1 = rho2", "variant", "rho1", "rho2")
        elif self.c1 != self.c2:
            raise _variant_error(f"{self.variant.value} requires c1 = c2", "variant", "c1", "c2")
        return self

    def gamma(self, domain_area: float) -> float:
        """Target volume of material 2 on a domain of the given area."""
        return self.volume_fraction * domain_area


def _lagrange_only(value: Space) -> Space:
    if value is Space.P0:
        raise ValueError("element must be P2 or P1")
    return value


class SolverSettings(BaseModel):
    model_config = ConfigDict(frozen=True)

    eig_tol: float = Field(1e-10, gt=0)
    eig_max_iter: int = Field(500, gt=0)
    element: Space = Space.P2

    @field_validator("element")
    @classmethod
    def lagrange_only(cls, value: Space) -> Space:
        return _lagrange_only(value)


class RunConfig(ProblemSpec):
    """A ProblemSpec plus mesh, solver and output settings of one run."""

    domain: Literal["disk", "square"] = "disk"
    n_boundary: int = Field(200, ge=8)
    radius: float = Field(1.0, gt=0)
    n_per_side: int = Field(50, ge=2)
    ratio: float = Field(1.0, gt=0)
    out_dir: str = "runs"
    eig_tol: float = Field(1e-10, gt=0)
    eig_max_iter: int = Field(500, gt=0)
    element: Space = Space.P2
    heatmap_resolution: int = Field(256, ge=64)

    @field_validator("element")
    @classmethod
    def lagrange_only(cls, value: Space) -> Space:
        return _lagrange_only(value)

    def problem_spec(self) -> ProblemSpec:
        return ProblemSpec.model_validate(self.model_dump(include=set(ProblemSpec.model_fields)))

    def solver_settings(self) -> SolverSettings:
        return SolverSettings(eig_tol=self.eig_tol, eig_max_iter=self.eig_max_iter, element=self.element)

    def mesh_params(self) -> Dict:
        if self.domain == "disk":
            return {"n_boundary": self.n_boundary, "radius": self.radius}
        return {"n_per_side": self.n_per_side, "ratio": self.ratio}


class IterationRecord(BaseModel):
    iteration: int
    lambda1: float
    volume_error: float
    stationarity: float


class RunArtifacts(BaseModel):
    density_vtk: Optional[str] = None
    density_csv: Optional[str] = None
    eigenfunction_vtk: Optional[str] = None
    history_csv: Optional[str] = None
    heatmap: Optional[str] = None
    initial_heatmap: Optional[str] = None
    mesh_vtk: Optional[str] = None
    run_config: Optional[str] = None


class RunSummary(BaseModel):
    variant: Variant
    iterations: int
    initial_lambda1: Optional[float] = None
    final_lambda1: float
    max_volume_error: float
    final_stationarity: Optional[float] = None
    gray_fraction: float
    wall_time: float
    eigen_solves: int
    interrupted: bool = False
    artifacts: Optional[RunArtifacts] = None


class KreinCheck(BaseModel):
    variant: Variant
    radius: float
    final_lambda1: float
    mismatch_fraction: float
    gray_fraction: float
    passed: bool


class KreinReport(BaseModel):
    threshold: float
    checks: List[KreinCheck] = []
    passed: bool


class PseudoConcavityReport(BaseModel):
    pencil: str
    tested: int
    skipped: int
    violations: int
    min_margin: Optional[float] = None
    margins: List[float] = Field(default_factory=list, exclude=True)


class ExtremePointReport(BaseModel):
    pencil: str
    n_vertices: int
    n_grid: int
    vertex_min: float
    grid_min: float
    argmin_vertex: List[float]
    passed: bool


class StationaryReport(BaseModel):
    pencil: str
    n_starts: int
    grid_max: float
    worst_terminal: float
    max_relative_gap: float
    passed: bool
    terminal_values: List[float] = Field(default_factory=list, exclude=True)


class PencilSuiteReport(BaseModel):
    seed: int
    trials: int
    pseudoconcavity: List[PseudoConcavityReport] = []
    extreme_point: List[ExtremePointReport] = []
    stationary: List[StationaryReport] = []
    control: Optional[PseudoConcavityReport] = None
    violations: int
    passed: bool
    trials_csv: Optional[str] = None


class ExportSummary(BaseModel):
    run_dir: str
    written: Dict[str, str] = {}


# Response Models
class RunResponse(BaseResponse[RunSummary]):
    result: Optional[RunSummary] = None


class KreinResponse(BaseResponse[KreinReport]):
    result: Optional[KreinReport] = None


class PencilSuiteResponse(BaseResponse[PencilSuiteReport]):
    result: Optional[PencilSuiteReport] = None


class ExportResponse(BaseResponse[ExportSummary]):
    result: Optional[ExportSummary] = None
