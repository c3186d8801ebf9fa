"""Resource limits shared by the pipelines and the CLI."""

from __future__ import annotations

import os
from dataclasses import dataclass


class BudgetExceeded(RuntimeError):
    """A computation was refused because it exceeds the configured budget."""


@dataclass(frozen=True)
class Budget:
    max_order: int = 5000          # largest group stored as a full table
    max_lattice_order: int = 512   # largest group whose subgroup lattice is enumerated
    max_dim: int = 4096            # largest module / matrix dimension

    @classmethod
    def from_env(cls) -> "Budget":
        """Read ``COMACK_BUDGET`` as ``order[,lattice[,dim]]``."""
        raw = os.environ.get("COMACK_BUDGET", "").strip()
        if not raw:
            return cls()
        parts = [int(x) for x in raw.split(",") if x.strip()]
        base = cls()
        vals = [base.max_order, base.max_lattice_order, base.max_dim]
        vals[: len(parts)] = parts
        return cls(*vals)


def current() -> Budget:
    return Budget.from_env()
