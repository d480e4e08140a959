import logging
from datetime import datetime
from typing import Tuple
from uuid import uuid4

from eigendesign.exceptions import ConfigError, EigenDesignException, EXIT_ERROR
from eigendesign.schemas.base_schema import BaseResponse, ResponseParams

logger = logging.getLogger(__name__)


def handle_exception(command: str, exc: BaseException) -> Tuple[BaseResponse, int]:
    """FAILED envelope and process exit code for an exception raised by a command."""
    if isinstance(exc, EigenDesignException):
        err_code, message, exit_code = exc.err_code, exc.message, exc.exit_code
        if isinstance(exc, ConfigError):
            logger.error("Invalid configuration: %s", message)
        else:
            logger.error("%s failed [%s]: %s", command, err_code, message, exc_info=exc.error)
    else:
        err_code, message, exit_code = "FAILED", str(exc) or type(exc).__name__, EXIT_ERROR
        logger.exception("%s failed", command, exc_info=exc)

    response = BaseResponse(
        id=f"eigendesign.{command.replace('-', '_')}",
        ver="v1",
        ts=datetime.now(),
        params=ResponseParams(status="FAILED", msgid=uuid4(), errmsg=message),
        responseCode=err_code,
        result=None,
    )
    return response, exit_code
