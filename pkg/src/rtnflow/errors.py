"""Errors shared across modules."""

from __future__ import annotations


class BudgetExceeded(RuntimeError):
    """An exhaustive computation would exceed its configured work budget."""

    def __init__(self, message: str, required: float, budget: float):
        super().__init__(message)
        self.required = required
        self.budget = budget
