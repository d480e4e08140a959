from eigendesign.exceptions.exceptions import (
    ArtifactError,
    AssemblyError,
    EXIT_CHECK_FAILED,
    EXIT_ERROR,
    ConfigError,
    EigenDesignException,
    EigenSolveError,
    FactorizationError,
    GradientError,
    MeshError,
    OptimizationError,
    PencilError,
    ProjectionError,
)

__all__ = [
    "EXIT_CHECK_FAILED",
    "EXIT_ERROR",
    "ArtifactError",
    "AssemblyError",
    "ConfigError",
    "EigenDesignException",
    "EigenSolveError",
    "FactorizationError",
    "GradientError",
    "MeshError",
    "OptimizationError",
    "PencilError",
    "ProjectionError",
]
