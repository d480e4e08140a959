from typing import Optional

EXIT_CHECK_FAILED = 1
EXIT_ERROR = 2


class EigenDesignException(Exception):
    err_code: str = "FAILED"

    def __init__(
        self,
        message: str = "An error occurred",
        err_code: Optional[str] = None,
        error: Optional[Exception] = None,
        exit_code: int = EXIT_ERROR,
    ):
        self.err_code = err_code or self.err_code
        self.message = message
        self.error = error
        self.exit_code = exit_code
        super().__init__(self.message)


class MeshError(EigenDesignException):
    err_code = "INVALID_MESH"


class AssemblyError(EigenDesignException):
    err_code = "DIMENSION_MISMATCH"


class EigenSolveError(EigenDesignException):
    """Inverse iteration did not reach the requested residual."""

    err_code = "NOT_CONVERGED"

    def __init__(self, message: str, residual: float = float("nan"), iterations: int = 0, **kwargs):
        self.residual = residual
        self.iterations = iterations
        super().__init__(message, **kwargs)


class FactorizationError(EigenSolveError):
    """Factorization failed or exposed a non-positive pivot."""

    err_code = "NOT_SPD"


class ProjectionError(EigenDesignException):
    err_code = "PROJECTION_FAILED"


class GradientError(EigenDesignException):
    err_code = "NOT_NORMALIZED"


class OptimizationError(EigenDesignException):
    err_code = "ITERATION_FAILED"

    def __init__(self, message: str, iteration: int, **kwargs):
        self.iteration = iteration
        super().__init__(message, **kwargs)


class ConfigError(EigenDesignException):
    err_code = "INVALID_CONFIG"

    def __init__(self, message: str, line: int = 0, **kwargs):
        self.line = line
        super().__init__(f"line {line}: {message}", **kwargs)


class PencilError(EigenDesignException):
    err_code = "INVALID_PENCIL"


class ArtifactError(EigenDesignException):
    err_code = "IO_FAILED"
