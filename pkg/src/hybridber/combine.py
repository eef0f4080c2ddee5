"""End-to-end error probability of a cascade of independent binary links."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence


def _check(p: Sequence[float]) -> None:
    for v in p:
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"link error probabilities must lie in [0, 1], got {v}")


def combine_sums(p: Sequence[float]) -> float:
    """Single-error plus all-but-one-error sums, written out term by term.

    For four links these are exactly the 1-flip and 3-flip events.
    """
    _check(p)
    total = 0.0
    for q in range(len(p)):
        others = [p[k] for k in range(len(p)) if k != q]
        total += p[q] * math.prod(1.0 - v for v in others)
        total += (1.0 - p[q]) * math.prod(others)
    return total


def combine_parity(p: Sequence[float]) -> float:
    """Probability of an odd number of flips: (1 - prod(1 - 2 p_i)) / 2."""
    _check(p)
    return 0.5 * (1.0 - math.prod(1.0 - 2.0 * v for v in p))


def combine(p: Sequence[float]) -> float:
    """End-to-end bit error probability of the four-link cascade (mol, in2on, on, off)."""
    if len(p) != 4:
        raise ValueError(f"expected four link error probabilities, got {len(p)}")
    return combine_sums(p)


@dataclass(frozen=True)
class BerBreakdown:
    p_mol: float
    p_in2on: float
    p_on: float
    p_off: float
    p_e2e: float
    t_dmc: float

    @property
    def links(self) -> tuple[float, float, float, float]:
        return (self.p_mol, self.p_in2on, self.p_on, self.p_off)

    @classmethod
    def from_links(cls, p_mol, p_in2on, p_on, p_off, t_dmc) -> "BerBreakdown":
        links = (p_mol, p_in2on, p_on, p_off)
        return cls(*links, p_e2e=combine(links), t_dmc=t_dmc)
