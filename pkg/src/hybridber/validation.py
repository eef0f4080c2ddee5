"""Analytic molecular model versus the particle oracle."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

from .channel import Hop, hit_probability, hop_query
from .config import Scenario
from .molecular import molecular_ber
from .montecarlo import Estimate, SimSpec, simulate_hits, simulate_relay_ber
from .sweep import format_value

N_SE = 3.0


@dataclass(frozen=True)
class Checkpoint:
    name: str
    analytic: float
    empirical: float
    se: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return abs(self.analytic - self.empirical) <= self.tolerance


def checkpoint(name: str, analytic: float, est: Estimate) -> Checkpoint:
    """3-SE agreement check.

    The SE is the larger of the empirical one and the one implied by the
    analytic value, so a run that sees no events (empirical SE 0) is judged
    against the spread the analytic model itself predicts.
    """
    se_model = math.sqrt(analytic * (1.0 - analytic) / est.n)
    se = max(est.se, se_model)
    return Checkpoint(name, analytic, est.p, est.se, N_SE * se)


def validate(scenario: Scenario, n_particles: int, n_bits: int, seed: int,
             workers: int = 1) -> list[Checkpoint]:
    link = scenario.molecular
    out = []
    for i, hop in enumerate((Hop.TR, Hop.RD)):
        q = hop_query(link, hop)
        est = simulate_hits(SimSpec.from_query(q, n_particles, seed + i), workers=workers)
        out.append(checkpoint(f"hit_{hop.name}", hit_probability(q), est))
    est = simulate_relay_ber(link, n_bits, seed + 2, workers=workers)
    out.append(checkpoint("relay_ber", molecular_ber(link), est))
    return out


def report_csv(points: list[Checkpoint]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["checkpoint", "analytic", "empirical", "se", "tolerance", "pass"])
    for c in points:
        w.writerow([c.name, format_value(c.analytic), format_value(c.empirical),
                    format_value(c.se), format_value(c.tolerance), "pass" if c.passed else "FAIL"])
    return buf.getvalue()
