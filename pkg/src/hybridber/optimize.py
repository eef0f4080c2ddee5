"""Split of the slot between the molecular and electromagnetic segments.

The end-to-end BER is minimised over the molecular symbol duration by
bisecting on the objective level ``h``: at each step a 1-D feasibility
search asks whether some split reaches ``p_e2e <= h``.  The feasibility
search is a golden-section minimisation that stops as soon as an iterate
satisfies the level, which relies on the objective being unimodal in
``t_dmc``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .combine import BerBreakdown
from .config import Scenario
from .em import in2on_aber, offbody_ber, onbody_aber
from .molecular import molecular_ber

BRACKET_MARGIN = 1e-6   # s, distance kept from both ends of the slot
GOLDEN_RTOL = 1e-6      # bracket width relative to t_total
MAX_ITERATIONS = 128
DEFAULT_EPSILON = 1e-4
FLAT_ATOL = 1e-14

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


class IterationCapError(RuntimeError):
    """Bisection did not terminate within :data:`MAX_ITERATIONS` steps."""


def ber_profile(t_dmc: float, scenario: Scenario) -> BerBreakdown:
    """Per-link and end-to-end BER with the slot split at ``t_dmc``."""
    t_total = scenario.slot.t_total
    if not 0.0 < t_dmc < t_total:
        raise ValueError(f"t_dmc must lie in (0, {t_total}), got {t_dmc}")
    sc = scenario.with_t_dmc(t_dmc)
    t_em = sc.slot.t_em_link
    return BerBreakdown.from_links(
        molecular_ber(sc.molecular),
        in2on_aber(sc.in2on, t_em),
        onbody_aber(sc.onbody, t_em),
        offbody_ber(sc.offbody, t_em),
        t_dmc=t_dmc,
    )


def e2e_ber(t_dmc: float, scenario: Scenario) -> float:
    return ber_profile(t_dmc, scenario).p_e2e


def search_bracket(scenario: Scenario) -> tuple[float, float]:
    return BRACKET_MARGIN, scenario.slot.t_total - BRACKET_MARGIN


@dataclass(frozen=True)
class GoldenResult:
    x: float
    fx: float
    lo: float
    hi: float
    evaluations: int
    hit_level: bool


def golden_section(f: Callable[[float], float], lo: float, hi: float, xtol: float,
                   level: Optional[float] = None) -> GoldenResult:
    """Golden-section minimisation of a unimodal ``f`` on ``[lo, hi]``.

    With ``level`` set, returns at the first evaluated point with ``f <= level``.
    Otherwise shrinks the bracket to ``xtol`` and returns the best point seen.
    """
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    n = 2
    best_x, best_f = (c, fc) if fc <= fd else (d, fd)
    if level is not None and best_f <= level:
        return GoldenResult(best_x, best_f, a, b, n, True)
    while b - a > xtol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
            x_new, f_new = c, fc
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
            x_new, f_new = d, fd
        n += 1
        if f_new < best_f:
            best_x, best_f = x_new, f_new
        if level is not None and f_new <= level:
            return GoldenResult(x_new, f_new, a, b, n, True)
    return GoldenResult(best_x, best_f, a, b, n, level is not None and best_f <= level)


def sublevel_feasible(h: float, scenario: Scenario) -> Optional[float]:
    """A split ``t_dmc`` with ``p_e2e(t_dmc) <= h``, or ``None`` if the search finds none."""
    if not 0.0 <= h <= 1.0:
        raise ValueError("level h must lie in [0, 1]")
    lo, hi = search_bracket(scenario)
    res = golden_section(lambda t: e2e_ber(t, scenario), lo, hi,
                         GOLDEN_RTOL * scenario.slot.t_total, level=h)
    return res.x if res.hit_level else None


@dataclass(frozen=True)
class OptimizationResult:
    t_dmc_opt: float
    p_e2e_opt: float
    breakdown_opt: BerBreakdown
    iterations: int
    epsilon: float
    converged: bool
    level: float            # final upper bound on the objective
    flat: bool = False      # objective constant over the slot; t_dmc_opt is the midpoint


def optimize_split(scenario: Scenario, epsilon: float = DEFAULT_EPSILON) -> OptimizationResult:
    """Minimise the end-to-end BER over the slot split by bisection on the objective level.

    The level bounds start at [0, 1] and halve until narrower than ``epsilon``,
    so the loop runs ``ceil(log2(1 / epsilon))`` times.  The last feasible
    witness is then polished by running the golden-section search to its
    tolerance; the polished point lies in the same sublevel set.
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    f = lambda t: e2e_ber(t, scenario)  # noqa: E731
    lo_t, hi_t = search_bracket(scenario)

    probe = [f(t) for t in np.linspace(lo_t, hi_t, 5)]
    if max(probe) - min(probe) <= FLAT_ATOL:
        mid = 0.5 * scenario.slot.t_total
        bd = ber_profile(mid, scenario)
        return OptimizationResult(mid, bd.p_e2e, bd, 0, epsilon, True, bd.p_e2e, flat=True)

    lower, upper = 0.0, 1.0
    witness = None
    iterations = 0
    while upper - lower > epsilon:
        iterations += 1
        if iterations > MAX_ITERATIONS:
            raise IterationCapError(f"no convergence after {MAX_ITERATIONS} bisection steps")
        h = 0.5 * (lower + upper)
        w = sublevel_feasible(h, scenario)
        if w is not None:
            upper, witness = h, w
        else:
            lower = h

    polished = golden_section(f, lo_t, hi_t, GOLDEN_RTOL * scenario.slot.t_total)
    if witness is None or polished.fx <= f(witness):
        witness = polished.x
    bd = ber_profile(witness, scenario)
    converged = bd.p_e2e <= upper
    return OptimizationResult(witness, bd.p_e2e, bd, iterations, epsilon, converged, upper)


def grid_search(scenario: Scenario, n_points: int = 10_000) -> tuple[np.ndarray, np.ndarray]:
    """``p_e2e`` on an even grid over the search bracket (reference for the optimiser)."""
    lo, hi = search_bracket(scenario)
    ts = np.linspace(lo, hi, n_points)
    return ts, np.array([e2e_ber(t, scenario) for t in ts])


def local_minima(values: np.ndarray, atol: float = 1e-12) -> list[int]:
    """Indices of strict local minima after merging plateaus within ``atol``.

    A unimodal profile yields exactly one index.
    """
    v = np.asarray(values, dtype=float)
    # collapse runs of near-equal values
    keep = [0]
    for i in range(1, len(v)):
        if abs(v[i] - v[keep[-1]]) > atol:
            keep.append(i)
    w = v[keep]
    out = []
    for j in range(len(w)):
        left = j == 0 or w[j] < w[j - 1]
        right = j == len(w) - 1 or w[j] < w[j + 1]
        if left and right:
            out.append(keep[j])
    return out
