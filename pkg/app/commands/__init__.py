"""
Command handlers for the command line.
Each module exposes register(subparsers); every handler takes the parsed
arguments and returns a CommandOutcome.
"""

from dataclasses import dataclass
from typing import Any


@dataclass(frozen=True)
class CommandOutcome:
    """Exit code (0 success/feasible, 1 infeasible/violation) and the JSON report."""

    exit_code: int
    report: Any
