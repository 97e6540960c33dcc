from .log_handler import logger, log_stage
from .error_handler import (
    EXIT_OK,
    EXIT_RUNTIME_ERROR,
    EXIT_VALIDATION_ERROR,
    handle_command_errors,
    handle_stage_errors,
)
from .atomic import atomic_directory, atomic_outputs, atomic_write_bytes, atomic_write_text

__all__ = [
    "logger",
    "log_stage",
    "handle_stage_errors",
    "handle_command_errors",
    "EXIT_OK",
    "EXIT_RUNTIME_ERROR",
    "EXIT_VALIDATION_ERROR",
    "atomic_directory",
    "atomic_outputs",
    "atomic_write_bytes",
    "atomic_write_text",
]
