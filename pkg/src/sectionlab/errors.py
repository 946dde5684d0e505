"""Exception hierarchy shared by all sectionlab modules."""


class SectionLabError(Exception):
    """Base class for all errors raised by this package."""


# -- model / geometry -------------------------------------------------------

class EmptyModel(SectionLabError):
    """The building model contains no elements."""


class DuplicateId(SectionLabError):
    """An element id (or element#layer group) occurs more than once."""


class LayerRefError(SectionLabError):
    """A layer reference does not resolve (missing sidecar entry or unknown hatch)."""


class UnknownElement(SectionLabError):
    """An element id does not exist in the scene."""


class NoSection(SectionLabError):
    """A section drawing was requested on an axis with no active plane."""


# -- parsing ----------------------------------------------------------------

class ParseError(SectionLabError):
    """Malformed input file; carries path and line context where available."""

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


class HeaderError(ParseError):
    """CSV header does not match the required schema."""


class ConflictError(SectionLabError):
    """Contradictory metadata rows for one element id."""


# -- camera / measurement ---------------------------------------------------

class BehindCamera(SectionLabError):
    """Point at or behind the camera plane cannot be projected."""


class InvalidPose(SectionLabError):
    """Camera rotation is not orthonormal."""


class DegenerateReference(SectionLabError):
    """Alignment reference segment has zero pixel length."""


# -- study analytics --------------------------------------------------------

class DegenerateTest(SectionLabError):
    """A test instrument with zero questions cannot be scored."""


class InvalidDuration(SectionLabError):
    """Completion time is zero, negative, or the pretest budget is exhausted."""


class DegenerateBaseline(SectionLabError):
    """Improvement percentage is undefined for a non-positive baseline."""


class AllTies(SectionLabError):
    """Every paired difference is zero; the test statistic is undefined."""


class PairSetError(SectionLabError):
    """Pairwise-comparison choices do not cover each factor pair exactly once."""


class RangeError(SectionLabError):
    """A rate or weight is outside its allowed range."""


class ArityError(SectionLabError):
    """Wrong number of values supplied."""


class EmptyCohort(SectionLabError):
    """No participants remain after exclusions."""
