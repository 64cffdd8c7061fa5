"""Atomic interventions and their canonical enumeration.

Every context (the start state and each intermediate context) exposes the
same action set over its n binary variables: the do-nothing action plus
setting a single variable to 0 or 1, so N = 2n + 1 actions in total.  All
matrices in this package index their rows by the canonical order defined
here: do-nothing first, then (variable 0, value 0), (variable 0, value 1),
(variable 1, value 0), and so on.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator


@dataclass(frozen=True, order=True)
class Intervention:
    """A single atomic action: do nothing, or pin one variable to a bit.

    ``var`` is a 0-based variable index; ``var is None`` encodes the
    do-nothing action (and then ``value`` is None as well).
    """

    var: int | None = None
    value: int | None = None

    def __post_init__(self) -> None:
        if (self.var is None) != (self.value is None):
            raise ValueError("var and value must both be None or both be set")
        if self.var is not None:
            if self.var < 0:
                raise ValueError(f"variable index must be >= 0, got {self.var}")
            if self.value not in (0, 1):
                raise ValueError(f"value must be 0 or 1, got {self.value}")

    @property
    def is_do_nothing(self) -> bool:
        return self.var is None

    @property
    def index(self) -> int:
        """Canonical row index of this intervention."""
        if self.var is None:
            return 0
        return 1 + 2 * self.var + self.value

    @classmethod
    def from_index(cls, a: int) -> "Intervention":
        if a < 0:
            raise ValueError(f"intervention index must be >= 0, got {a}")
        if a == 0:
            return cls()
        return cls(var=(a - 1) // 2, value=(a - 1) % 2)

    def __repr__(self) -> str:
        if self.var is None:
            return "do()"
        return f"do(X{self.var}={self.value})"


DO_NOTHING = Intervention()


def num_interventions(n: int) -> int:
    """Size of the atomic intervention set over n binary variables."""
    if n < 1:
        raise ValueError(f"need at least one variable, got n={n}")
    return 2 * n + 1


def all_interventions(n: int) -> Iterator[Intervention]:
    """Yield the intervention set in canonical order."""
    for a in range(num_interventions(n)):
        yield Intervention.from_index(a)
