"""Exception hierarchy shared across the citefrac modules."""


class CitefracError(Exception):
    """Base class for all citefrac errors."""


# -- corpus / parsing ------------------------------------------------------

class ParseError(CitefracError):
    """A record in an input file could not be parsed.

    Carries the 1-based line number where the problem was detected.
    """

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class MissingId(ParseError):
    pass


class MalformedField(ParseError):
    pass


class UnterminatedRecord(ParseError):
    pass


class DuplicateId(CitefracError):
    pass


class NonNumericCell(ParseError):
    pass


class NonPositiveP(ParseError):
    pass


# -- query language --------------------------------------------------------

class QuerySyntaxError(CitefracError):
    """Syntax error in an address query; carries the character position."""

    def __init__(self, message: str, position: int):
        self.position = position
        super().__init__(f"at position {position}: {message}")


class UnknownUnitInMinus(CitefracError):
    pass


class CyclicMinus(CitefracError):
    pass


# -- counting --------------------------------------------------------------

class ZeroReferences(CitefracError):
    """The citing record has no resolvable reference count (k = 0)."""


class UnknownUnit(CitefracError):
    pass


# -- statistics ------------------------------------------------------------

class StatsError(CitefracError):
    pass


class LengthMismatch(StatsError):
    pass


class ConstantInput(StatsError):
    pass


class TooFewGroups(StatsError):
    pass


class AllValuesTied(StatsError):
    pass


class DegenerateGroups(StatsError):
    pass


class ConvergenceFailure(StatsError):
    """Root finding hit its iteration cap; carries the achieved tolerance."""

    def __init__(self, message: str, achieved_tolerance: float):
        self.achieved_tolerance = achieved_tolerance
        super().__init__(f"{message} (achieved tolerance {achieved_tolerance:g})")


# -- reporting -------------------------------------------------------------

class UnitSetMismatch(CitefracError):
    pass


class IncompletePairCoverage(CitefracError):
    pass
