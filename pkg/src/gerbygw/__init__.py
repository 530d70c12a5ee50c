"""Exact gerby dual-graph calculus and the degree-zero BG cohomological field theory."""

__version__ = "0.1.0"

from .errors import (  # noqa: F401
    BudgetExceeded,
    GerbyError,
    GraphError,
    GroupError,
    InputError,
    StabilizationError,
    VerificationError,
)
from .cyclotomic import Cyclotomic  # noqa: F401
from .graphs import ModularGraph, GerbyGraph, GerbyXGraph, InertiaLabelSet, TargetModel  # noqa: F401
