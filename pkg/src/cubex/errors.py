"""Exception hierarchy for cubex.

Every error is a ``ValueError`` so callers can keep catching the broad type.
"""

from __future__ import annotations


class CubexError(ValueError):
    """Base class for all cubex errors."""


class DiagramError(CubexError):
    """Malformed object, morphism, diagram, cube or simplicial object."""


class CompositionError(CubexError):
    """Two morphisms were composed whose domain and codomain do not match."""


class CommutativityError(DiagramError):
    """A cube face does not commute."""

    def __init__(self, subset: tuple[int, ...], i: int, j: int, detail: str = ""):
        self.subset = subset
        self.i = i
        self.j = j
        where = format_subset(subset)
        msg = f"non-commuting square at ({where},{i},{j})"
        if detail:
            msg = f"{msg}: {detail}"
        super().__init__(msg)


class SimplicialIdentityError(DiagramError):
    """A truncated simplicial object violates one of its identities."""

    def __init__(self, violations: list):
        self.violations = violations
        first = violations[0].message if violations else "unknown violation"
        more = f" (and {len(violations) - 1} more)" if len(violations) > 1 else ""
        super().__init__(f"{first}{more}")


class ResourceLimitError(CubexError):
    """A configured cap was exceeded; results are never silently truncated."""

    def __init__(self, cap_name: str, limit: int, what: str):
        self.cap_name = cap_name
        self.limit = limit
        super().__init__(f"{what} exceeds {cap_name}={limit}")


class UnsupportedStructureError(CubexError):
    """The operation needs structure the object does not carry."""


class CubexParseError(CubexError):
    """A ``.cx`` document could not be loaded."""

    def __init__(
        self,
        message: str,
        line: int | None = None,
        column: int | None = None,
        *,
        reason: str = "syntax",
    ):
        self.line = line
        self.column = column
        self.reason = reason
        if line is not None:
            message = f"line {line}, column {column}: {message}"
        super().__init__(message)


def format_subset(subset: tuple[int, ...]) -> str:
    if not subset:
        return "∅"
    return "{" + ",".join(str(i) for i in subset) + "}"
