"""Hit statistics of a point release in a 3-D drift-diffusion medium.

A molecule released at the origin at t=0 is found at ``W t + N(0, 2 D t I)``.
The receiver is a passive sphere; "hit" means the molecule is inside the
sphere at the sampling instant.

:func:`hit_probability` is the Simpson-rule surrogate used by the BER model.
It integrates the density exactly along x (erf), with a 16-panel Simpson rule
along y, and replaces the z extent by the sphere's volume-to-disc ratio
(4/3 of the radius) times the density on the receiver's central plane.
:func:`hit_probability_exact` is the exact in-sphere probability
(non-central chi-square) for comparison.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.special import erf
from scipy.stats import ncx2

from .config import ConfigError, MolecularLinkConfig, Vector3


class ClampWarning(UserWarning):
    """The Simpson surrogate left [0, 1] and was clamped."""


@dataclass(frozen=True)
class HitQuery:
    """Receiver centre ``offset`` relative to the emitter, sampled at ``time``."""

    offset: Vector3
    radius: float
    diffusion: float
    drift: Vector3
    time: float

    def __post_init__(self):
        for name in ("radius", "diffusion", "time"):
            value = float(getattr(self, name))
            if not (math.isfinite(value) and value > 0):
                raise ConfigError("must be finite and > 0", name)
        if self.offset.norm() <= self.radius:
            raise ConfigError("receiver must not enclose the emitter", "offset")


def hit_pdf(point: Vector3, q: HitQuery) -> float:
    """Density of the molecule at ``point``, given relative to the receiver centre."""
    dt4 = 4.0 * q.diffusion * q.time
    t = q.time
    sq = ((point.x + q.offset.x - q.drift.x * t) ** 2
          + (point.y + q.offset.y - q.drift.y * t) ** 2
          + (point.z + q.offset.z - q.drift.z * t) ** 2)
    return math.exp(-sq / dt4) / math.sqrt((math.pi * dt4) ** 3)


def hit_pdf_grid(x, y, z, q: HitQuery) -> np.ndarray:
    """Vectorised :func:`hit_pdf` over broadcastable coordinate arrays."""
    dt4 = 4.0 * q.diffusion * q.time
    t = q.time
    sq = ((np.asarray(x) + q.offset.x - q.drift.x * t) ** 2
          + (np.asarray(y) + q.offset.y - q.drift.y * t) ** 2
          + (np.asarray(z) + q.offset.z - q.drift.z * t) ** 2)
    return np.exp(-sq / dt4) / math.sqrt((math.pi * dt4) ** 3)


# Simpson nodes on y in units of the radius: j/8 for j = -7..7 (the j = +-8
# end nodes have zero chord).  Odd j are the lambda terms (weight 4), even
# nonzero j the xi terms (weight 2), j = 0 the omega term (weight 2).
_J = np.arange(-7, 8)
_Y_NODES = _J / 8.0
_CHORDS = np.sqrt(1.0 - _Y_NODES ** 2)
_WEIGHTS = np.where(_J % 2 == 1, 4.0, 2.0)


def hit_probability_raw(q: HitQuery) -> float:
    """Unclamped Simpson-rule hit probability."""
    d, t, r = q.diffusion, q.time, q.radius
    dt4 = 4.0 * d * t
    s = 2.0 * math.sqrt(d * t)
    gx = q.offset.x - q.drift.x * t
    gy = q.offset.y - q.drift.y * t
    gz = q.offset.z - q.drift.z * t
    ey = np.exp(-((_Y_NODES * r + gy) ** 2) / dt4)
    half = _CHORDS * r
    ex = erf((half + gx) / s) - erf((-half + gx) / s)
    bracket = float(np.dot(_WEIGHTS, ey * ex))
    return r * r / (144.0 * math.pi * d * t) * math.exp(-gz * gz / dt4) * bracket


def hit_probability_with_flag(q: HitQuery) -> tuple[float, bool]:
    """Simpson-rule hit probability clamped to [0, 1], plus a was-clamped flag."""
    raw = hit_probability_raw(q)
    if raw > 1.0:
        return 1.0, True
    if raw < 0.0:
        return 0.0, True
    return raw, False


def hit_probability(q: HitQuery) -> float:
    """Simpson-rule hit probability; warns with :class:`ClampWarning` when clamped."""
    p, clamped = hit_probability_with_flag(q)
    if clamped:
        warnings.warn(f"hit probability clamped (raw {hit_probability_raw(q):.6g})",
                      ClampWarning, stacklevel=2)
    return p


def hit_probability_exact(q: HitQuery) -> float:
    """Exact probability of being inside the sphere at ``q.time``."""
    var = 2.0 * q.diffusion * q.time
    mean = q.drift.scale(q.time) - q.offset
    nc = (mean.x ** 2 + mean.y ** 2 + mean.z ** 2) / var
    return float(ncx2.cdf(q.radius ** 2 / var, 3, nc))


class Hop(Enum):
    TR = "T->R"
    RD = "R->D"


def hop_query(link: MolecularLinkConfig, hop: Hop) -> HitQuery:
    """Query for one hop; each hop is sampled at half the molecular symbol."""
    t = link.t_dmc / 2.0
    if hop is Hop.TR:
        return HitQuery(link.relay_pos, link.relay_radius, link.diffusion_a, link.drift, t)
    return HitQuery(link.dest_pos - link.relay_pos, link.dest_radius, link.diffusion_b, link.drift, t)


def hop_hit_probability(link: MolecularLinkConfig, hop: Hop) -> float:
    return hit_probability(hop_query(link, hop))
