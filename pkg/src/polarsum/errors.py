"""Shared exception types."""


class BudgetError(Exception):
    """A requested computation exceeds a configured enumeration or depth budget.

    The message always names the budget and the computed size that tripped it,
    so callers (and the CLI, which maps this to exit code 3) can report why the
    request was refused rather than attempted.
    """
