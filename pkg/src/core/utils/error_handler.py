"""Standardized error handling utilities."""

import functools
from typing import Callable, TypeVar

from core.exceptions import HybridSplatError, InvalidInputError, PipelineStageError
from core.utils.log_handler import logger

T = TypeVar('T')

EXIT_OK = 0
EXIT_RUNTIME_ERROR = 1
EXIT_VALIDATION_ERROR = 2


def handle_stage_errors(stage: str) -> Callable[[Callable[..., T]], Callable[..., T]]:
    """
    Decorator for pipeline stages.

    Domain errors (HybridSplatError subclasses) propagate unchanged so callers can react to
    divergence, bad geometry or validation failures. Anything else is logged and wrapped in
    PipelineStageError carrying the stage name.

    Args:
        stage: Stage name used in logs and in the wrapped error
    """
    def decorator(func: Callable[..., T]) -> Callable[..., T]:
        @functools.wraps(func)
        def wrapper(*args, **kwargs) -> T:
            try:
                return func(*args, **kwargs)
            except HybridSplatError:
                raise
            except Exception as e:
                logger.exception(f"Stage {stage} error in {func.__name__}: {e}")
                raise PipelineStageError(stage, e) from e
        return wrapper
    return decorator


def handle_command_errors(func: Callable[..., int | None]) -> Callable[..., int]:
    """
    Decorator for CLI command handlers: maps exceptions to process exit codes.

    Returns:
        0 on success, 2 on validation errors, 1 on any other failure
    """
    @functools.wraps(func)
    def wrapper(*args, **kwargs) -> int:
        try:
            result = func(*args, **kwargs)
            return EXIT_OK if result is None else result
        except InvalidInputError as e:
            logger.error(f"Validation error in {func.__name__}: {e}")
            return EXIT_VALIDATION_ERROR
        except Exception as e:
            logger.exception(f"Error in {func.__name__}: {e}")
            return EXIT_RUNTIME_ERROR
    return wrapper
