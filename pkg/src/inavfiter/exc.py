import pathlib
from dataclasses import dataclass
from typing import NotRequired, TypedDict

from typing_extensions import override

__all__ = (
    "ApplicationError",
    "ArgumentError",
    "NumericalError",
    "DivergenceError",
    "QuadratureError",
    "SingularityError",
    "TimestampMismatchError",
    "DatasetError",
    "DatasetSyntaxError",
    "ManifestError",
    "ManifestSyntaxError",
    "ManifestValidationError",
    "OutputError",
    "Location",
)


@dataclass(slots=True)
class ApplicationError(Exception):
    class Context(TypedDict): ...

    message: str
    ctx: Context | None = None

    def format_message(self) -> str:
        if not self.ctx:
            return self.message
        try:
            return self.message.format(ctx=self.ctx)
        except (KeyError, IndexError, AttributeError, ValueError):
            # literal braces, e.g. from a wrapped third-party message
            return self.message

    @override
    def __str__(self) -> str:
        return self.format_message()


class Location(TypedDict):
    filename: pathlib.Path
    line: NotRequired[int]
    col: NotRequired[int]


@dataclass(slots=True)
class ArgumentError(ApplicationError):
    """
    Raised when an operation is called outside of its domain, e.g. a negative
    polynomial degree or a normalized time outside ``[-1, 1]``.
    """


@dataclass(slots=True)
class NumericalError(ApplicationError):
    """Raised when a numerical procedure cannot produce a trustworthy result."""


@dataclass(slots=True)
class DivergenceError(NumericalError):
    """
    Raised when a functional iteration produces non-finite coefficients.
    """

    class Context(TypedDict):
        """
        Attributes:
            process: Either ``"attitude"`` or ``"velpos"``.
            iteration: One-based index of the failing iteration.
        """

        process: str
        iteration: int

    ctx: Context

    @override
    def format_message(self) -> str:
        return "The %s iteration diverged at step %d.\n\n%s" % (
            self.ctx["process"],
            self.ctx["iteration"],
            self.message,
        )


@dataclass(slots=True)
class QuadratureError(NumericalError):
    """
    Raised when the adaptive quadrature fails to meet its tolerance within the
    allowed number of bisections.
    """

    class Context(TypedDict):
        lower: float
        upper: float

    ctx: Context

    @override
    def format_message(self) -> str:
        return "Quadrature did not converge on [%r, %r].\n\n%s" % (
            self.ctx["lower"],
            self.ctx["upper"],
            self.message,
        )


@dataclass(slots=True)
class SingularityError(ApplicationError):
    """
    Raised when the local-level mechanization is evaluated too close to a pole,
    where the curvature matrix and the transport rate are singular.
    """

    class Context(TypedDict):
        latitude: float

    ctx: Context

    @override
    def format_message(self) -> str:
        return "Latitude %r rad is too close to a pole.\n\n%s" % (
            self.ctx["latitude"],
            self.message,
        )


@dataclass(slots=True)
class TimestampMismatchError(ApplicationError):
    """Raised when truth and estimate records are not aligned in time."""

    class Context(TypedDict):
        expected: float
        actual: float

    ctx: Context

    @override
    def format_message(self) -> str:
        return "Expected a record at t=%r, got t=%r.\n\n%s" % (
            self.ctx["expected"],
            self.ctx["actual"],
            self.message,
        )


@dataclass(slots=True)
class DatasetError(ApplicationError):
    class Context(TypedDict):
        loc: Location

    ctx: Context


@dataclass(slots=True)
class DatasetSyntaxError(DatasetError):
    """
    Raised when an increment dataset file cannot be decoded.
    """

    @override
    def format_message(self) -> str:
        loc = self.ctx["loc"]
        where = str(loc["filename"])
        if "line" in loc:
            where += ":%d" % loc["line"]
        return "Decoding failed for dataset file %r.\n\n%s" % (where, self.message)


@dataclass(slots=True)
class ManifestError(ApplicationError):
    class Context(TypedDict):
        loc: Location

    ctx: Context


@dataclass(slots=True)
class ManifestSyntaxError(ManifestError):
    """
    Raised when there is an issue with parsing a given experiment manifest.
    """

    @override
    def format_message(self) -> str:
        return "Decoding failed for manifest file %r.\n\n%s" % (
            str(self.ctx["loc"]["filename"]),
            self.message,
        )


@dataclass(slots=True)
class ManifestValidationError(ManifestError):
    """
    Raised when there is an issue with validating a given experiment manifest.
    """

    @override
    def format_message(self) -> str:
        return "Validation failed for manifest file %r.\n\n%s" % (
            str(self.ctx["loc"]["filename"]),
            self.message,
        )


@dataclass(slots=True)
class OutputError(ApplicationError):
    """Raised when an output artifact cannot be written."""

    class Context(TypedDict):
        path: pathlib.Path

    ctx: Context

    @override
    def format_message(self) -> str:
        return "Failed to write %r.\n\n%s" % (str(self.ctx["path"]), self.message)
