"""
Exception hierarchy for the navigation stack
"""

from typing import Optional


class SemNavError(Exception):
    """Base class for every error raised by semnav"""


class ScenarioError(SemNavError, ValueError):
    """Scenario could not be loaded, validated or generated"""


class ScenarioParseError(ScenarioError):
    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f" (line {line}" + (f", column {column})" if column is not None else ")")
        super().__init__(f"{message}{where}")


class ScenarioInvariantError(ScenarioError):
    def __init__(self, message: str, row: Optional[int] = None, column: Optional[int] = None):
        self.row = row
        self.column = column
        where = f" at row {row}, column {column}" if row is not None else ""
        super().__init__(f"{message}{where}")


class ScenarioGenerationError(ScenarioError):
    pass


class PlanningError(SemNavError):
    pass


class NoFrontierError(PlanningError):
    pass


class NoPathError(PlanningError):
    pass


class ScorerError(SemNavError):
    pass


class ScorerUnavailableError(ScorerError):
    pass


class ScorerParseError(ScorerError):
    pass


class BatchUsageError(SemNavError, ValueError):
    pass
