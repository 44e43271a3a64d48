"""Cooperative cancellation for long-running enumerations."""

from __future__ import annotations

import os
import time

from .errors import BudgetExceeded

ENV_BUDGET_MS = "COMGRAM_BUDGET_MS"


class Deadline:
    """Wall-clock and step budget checked cooperatively by enumeration loops.

    Loops call :meth:`tick` once per unit of work; the clock itself is only
    read every ``stride`` ticks so the check stays cheap.
    """

    __slots__ = ("expires_at", "max_steps", "steps", "stride")

    def __init__(self, ms: float | None = None, max_steps: int | None = None, stride: int = 1024):
        self.expires_at = None if ms is None else time.monotonic() + ms / 1000.0
        self.max_steps = max_steps
        self.steps = 0
        self.stride = stride

    @classmethod
    def from_env(cls) -> "Deadline":
        raw = os.environ.get(ENV_BUDGET_MS)
        return cls(ms=float(raw)) if raw else cls()

    def tick(self, n: int = 1) -> None:
        self.steps += n
        if self.max_steps is not None and self.steps > self.max_steps:
            raise BudgetExceeded(f"step budget of {self.max_steps} exhausted")
        if self.expires_at is not None and self.steps % self.stride < n:
            if time.monotonic() > self.expires_at:
                raise BudgetExceeded("wall-clock budget exhausted")




def tick(deadline: Deadline | None, n: int = 1) -> None:
    if deadline is not None:
        deadline.tick(n)
