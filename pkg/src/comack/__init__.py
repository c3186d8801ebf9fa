"""Cohomological Mackey algebras of finite groups over finite fields."""

from .budget import Budget, BudgetExceeded
from .groups import Group, Subgroup, build_group

__all__ = ["Budget", "BudgetExceeded", "Group", "Subgroup", "build_group"]
__version__ = "0.1.0"
