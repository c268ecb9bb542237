"""Outcome of a mechanical check."""

from __future__ import annotations

from dataclasses import dataclass, field

HOLDS, FAILS, INCONCLUSIVE = "holds", "fails", "inconclusive"
_EXIT = {HOLDS: 0, FAILS: 1, INCONCLUSIVE: 3}


@dataclass
class Verdict:
    check: str
    status: str
    witness: dict | None = None
    details: dict = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.status == HOLDS

    @property
    def exit_code(self) -> int:
        return _EXIT[self.status]

    def __bool__(self):
        return self.holds
