from eigendesign.schemas.base_schema import BaseResponse, ResponseParams
from eigendesign.schemas.schema import (
    ExportResponse,
    ExportSummary,
    ExtremePointReport,
    InitialDesign,
    InitialDesignKind,
    IterationRecord,
    KreinCheck,
    KreinReport,
    KreinResponse,
    PencilSuiteReport,
    PencilSuiteResponse,
    ProblemSpec,
    PseudoConcavityReport,
    RunArtifacts,
    RunConfig,
    RunResponse,
    RunSummary,
    SolverSettings,
    StationaryReport,
    Variant,
)
