"""
Errors - exception hierarchy shared by the library and the command line
"""

from config.settings import EXIT_INVALID_INPUT, EXIT_RESOURCE_CAP, EXIT_VERIFICATION_FAILED


class QPackError(Exception):
    """Base class for every error raised by qpack"""

    exit_code = EXIT_INVALID_INPUT


class FieldError(QPackError):
    """Non-prime field order, mismatched ambient space or singular matrix"""


class DegenerateBlockError(QPackError):
    """Columns that do not span a subspace of the claimed dimension"""


class EncodingRangeError(QPackError):
    """Integer encoding outside 0 <= x < q**n"""


class CapExceededError(QPackError):
    """An enumeration or closure limit was hit"""

    exit_code = EXIT_RESOURCE_CAP

    def __init__(self, message, count=None):
        super().__init__(message)
        self.count = count


class GroupError(QPackError):
    """Subgroup relation or requested element order not available"""


class ConsistencyError(QPackError):
    """Internal invariant broken (inexact division, bad fusion, overlapping orbits)"""


class SolutionError(QPackError):
    """Solution vector infeasible where feasibility is required"""


class VerificationError(QPackError):
    """A design failed its validity check"""

    exit_code = EXIT_VERIFICATION_FAILED


class FormatError(QPackError):
    """Malformed text input; message names the file and line"""

    def __init__(self, message, path=None, line=None):
        where = ""
        if path is not None:
            where = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(where + message)
        self.path = path
        self.line = line


class FixtureError(QPackError):
    """Unknown fixture name or checksum mismatch"""
