"""Delegated search: threshold and curve mechanisms, box search, budgets."""

__version__ = "0.1.0"
