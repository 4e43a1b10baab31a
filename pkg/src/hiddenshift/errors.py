"""Exceptions and work ceilings shared across the package."""

import os

BRUTE_FORCE_CEILING = 2**24
DENSE_CEILING = 4096
DEFAULT_SWEEP_BUDGET = 2**22
MC_WORK_CEILING = 2**28
BUDGET_ENV = "HSL_BUDGET"


def sweep_budget(override=None):
    """Budget for exhaustive sweeps: explicit value, then $HSL_BUDGET, then default."""
    if override is not None:
        return int(override)
    env = os.environ.get(BUDGET_ENV)
    if env:
        return int(env)
    return DEFAULT_SWEEP_BUDGET


class BudgetExceeded(RuntimeError):
    def __init__(self, needed, budget, what="sweep"):
        super().__init__(f"{what} needs {needed} units, budget is {budget}")
        self.needed = needed
        self.budget = budget


class DimensionTooLarge(RuntimeError):
    def __init__(self, dim, ceiling):
        super().__init__(f"dense dimension {dim} exceeds ceiling {ceiling}")
        self.dim = dim
        self.ceiling = ceiling


def check_budget(needed, budget, what="sweep"):
    if needed > budget:
        raise BudgetExceeded(needed, budget, what)


def check_dense(dim, ceiling=DENSE_CEILING):
    if dim > ceiling:
        raise DimensionTooLarge(dim, ceiling)
