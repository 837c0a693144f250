"""Shared exception types.

The CLI maps these onto exit codes: DomainError and ConfigError exit
with 3, BudgetError with 4 (usage errors are click's own, exit 2).
"""


class DomainError(ValueError):
    """An argument is outside the mathematical domain of the operation."""


class ConfigError(ValueError):
    """A tunable parameter violates a hard constraint."""


class BudgetError(RuntimeError):
    """An exhaustive computation would exceed the allowed work budget."""

    def __init__(self, message: str, required: int, budget: int):
        super().__init__(message)
        self.required = required
        self.budget = budget


class UndefinedScoreError(ValueError):
    """A statistic is undefined for the given input (e.g. zero variance)."""
