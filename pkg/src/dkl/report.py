"""Empirical comparability reports shared by the check suite and the oracle."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional


@dataclass(frozen=True)
class ComparabilityReport:
    """Empirical ratio extremes of two evaluators over a seeded sample set.

    For two-sided claims ``passed`` requires the ratio range to sit inside
    [1/ceiling, ceiling]; one-sided claims check only the upper side.
    Samples whose quadrature failed to converge are excluded and counted;
    more than 1% exclusions fails the report outright.
    """

    lemma_id: str
    samples: int
    excluded: int
    min_ratio: float
    max_ratio: float
    argmin: dict = field(default_factory=dict)
    argmax: dict = field(default_factory=dict)
    ceiling: Optional[float] = None
    two_sided: bool = True

    def __post_init__(self):
        if self.samples > 0 and not (0.0 < self.min_ratio <= self.max_ratio):
            raise ValueError(
                f"ratio range invalid: ({self.min_ratio}, {self.max_ratio})"
            )

    @property
    def passed(self) -> bool:
        if self.samples == 0 or self.excluded > 0.01 * (self.samples + self.excluded):
            return False
        if self.ceiling is None:
            return False
        if self.max_ratio > self.ceiling:
            return False
        if self.two_sided and self.min_ratio < 1.0 / self.ceiling:
            return False
        return True
