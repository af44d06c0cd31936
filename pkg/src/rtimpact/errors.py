"""Exception hierarchy.

Every error carries the CLI exit code it maps to: 1 for configuration
problems, 2 for data problems, 3 for computation failures.
"""

from __future__ import annotations


class RtImpactError(Exception):
    exit_code = 3


class ConfigError(RtImpactError):
    exit_code = 1


class DataError(RtImpactError):
    exit_code = 2


class ComputationError(RtImpactError):
    exit_code = 3


# -- data ------------------------------------------------------------------

class ParseError(DataError):
    def __init__(self, row: int, reason: str):
        super().__init__(f"row {row}: {reason}")
        self.row = row
        self.reason = reason


class EmptyDataset(DataError):
    pass


class InvalidFraction(DataError):
    pass


class UnknownUser(DataError):
    pass


class EmptyWindow(DataError):
    pass


class ConflictingAuthor(DataError):
    pass


class NoTopics(DataError):
    pass


class MalformedScore(DataError):
    pass


class SourceUnreachable(DataError):
    pass


class NoScores(DataError):
    pass


# -- computation -----------------------------------------------------------

class InvalidSpec(ComputationError):
    pass


class InvalidPivotCount(ComputationError):
    pass


class NoConvergence(ComputationError):
    def __init__(self, what: str, max_iter: int):
        super().__init__(f"{what} did not converge in {max_iter} iterations")
        self.max_iter = max_iter


class NoEdges(ComputationError):
    pass


class ZeroVector(ComputationError):
    pass


class NoGroups(ComputationError):
    pass


class EmptyGroup(ComputationError):
    pass


class EmptyStage(ComputationError):
    pass


class InvalidOrder(ComputationError):
    pass


class NoResults(ComputationError):
    pass
