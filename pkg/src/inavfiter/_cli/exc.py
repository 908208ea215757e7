import logging
from dataclasses import dataclass
from typing import NoReturn, TypedDict

import click
from typing_extensions import override

from ..exc import ApplicationError, Location

__all__ = (
    "CLIError",
    "ConfigError",
    "ConfigSyntaxError",
    "ConfigValidationError",
    "EXIT_FAILURE",
    "EXIT_DIVERGED",
    "handle_exception",
)

logger = logging.getLogger(__name__)

# https://tldp.org/LDP/abs/html/exitcodes.html
EXIT_FAILURE = 128
EXIT_DIVERGED = 65


@dataclass(slots=True)
class CLIError(click.ClickException):
    """
    A failure reported to the user.

    Warning:
        User-defined exit codes are restricted to the range 64 - 113, see
        https://tldp.org/LDP/abs/html/exitcodes.html.
    """

    message: str
    exit_code: int = 1


@dataclass(slots=True)
class ConfigError(CLIError):
    pass


@dataclass(slots=True, kw_only=True)
class ConfigSyntaxError(ConfigError):
    class Context(TypedDict):
        loc: Location

    ctx: Context

    @override
    def format_message(self) -> str:
        return "Decoding failed for configuration file %r.\n\n%s" % (
            str(self.ctx["loc"]["filename"]),
            self.message,
        )


@dataclass(slots=True, kw_only=True)
class ConfigValidationError(ConfigError):
    @override
    def format_message(self) -> str:
        return "Invalid configuration input.\n\n%s" % self.message


def handle_exception(ex: BaseException) -> NoReturn:
    """Map any failure of a command to a :class:`CLIError`."""
    while isinstance(ex, BaseExceptionGroup):
        ex = ex.exceptions[0]

    if isinstance(ex, CLIError):
        raise ex

    if isinstance(ex, ApplicationError):
        raise CLIError(str(ex), exit_code=EXIT_FAILURE) from ex

    logger.debug(ex, exc_info=ex)
    raise CLIError("Unexpected error: %r" % ex, exit_code=EXIT_FAILURE) from ex
