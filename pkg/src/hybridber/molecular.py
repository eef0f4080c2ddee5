"""Bit error probability of the relay-assisted OOK molecular link.

Both receivers (relay R and destination D) count molecules and decide bit 1
when the count reaches a threshold.  Counts are modelled as Gaussian with the
moments returned by :func:`detection_stats`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erf

from .channel import Hop, hop_hit_probability
from .config import MolecularLinkConfig


class DegenerateVarianceError(ArithmeticError):
    """A count variance came out <= 0; the operating point is unusable."""


@dataclass(frozen=True)
class DetectionStats:
    mu0: float
    mu1: float
    var0: float
    var1: float


def detection_stats(n_molecules: int, p_hit: float, noise_mean: float, noise_var: float) -> DetectionStats:
    """Count mean/variance under bit 0 and bit 1.

    The residual term (``0.5 Q q`` in the mean, ``0.5 Q q (1-q) + 0.25 Q^2 q^2``
    in the variance) uses ``q = p_hit``, and ``mu1`` enters ``var1`` as is.
    """
    if not 0.0 <= p_hit <= 1.0:
        raise ValueError(f"p_hit must lie in [0, 1], got {p_hit}")
    Q, p = float(n_molecules), float(p_hit)
    residual_mean = 0.5 * Q * p
    residual_var = 0.5 * Q * p * (1.0 - p) + 0.25 * Q * Q * p * p
    mu0 = residual_mean + noise_mean
    mu1 = residual_mean + Q * p + noise_mean
    var0 = residual_var + noise_var + noise_mean
    var1 = Q * p * (1.0 - p) + residual_var + noise_var + mu1
    if var0 <= 0.0 or var1 <= 0.0:
        raise DegenerateVarianceError(
            f"non-positive count variance (var0={var0}, var1={var1}) at Q={n_molecules}, p={p_hit}")
    return DetectionStats(mu0, mu1, var0, var1)


def _erf_arg(tau: float, mu: float, var: float) -> float:
    return (tau - mu) / math.sqrt(2.0 * var)


def cond_detect_one(tau: float, stats: DetectionStats, sent_bit: int) -> float:
    """P(count >= tau | sent_bit)."""
    if sent_bit not in (0, 1):
        raise ValueError("sent_bit must be 0 or 1")
    mu, var = (stats.mu1, stats.var1) if sent_bit else (stats.mu0, stats.var0)
    return 0.5 * (1.0 - float(erf(_erf_arg(tau, mu, var))))


def hop_stats(link: MolecularLinkConfig) -> tuple[DetectionStats, DetectionStats]:
    """Detection statistics for the T->R and R->D hops."""
    p_tr = hop_hit_probability(link, Hop.TR)
    p_rd = hop_hit_probability(link, Hop.RD)
    return (detection_stats(link.molecules_a, p_tr, link.noise_mean, link.noise_var),
            detection_stats(link.molecules_b, p_rd, link.noise_mean, link.noise_var))


def ber_from_stats(tau_r: float, tau_d: float, tr: DetectionStats, rd: DetectionStats) -> float:
    """Closed form for equiprobable bits."""
    a = float(erf(_erf_arg(tau_r, tr.mu1, tr.var1))) - float(erf(_erf_arg(tau_r, tr.mu0, tr.var0)))
    b = float(erf(_erf_arg(tau_d, rd.mu0, rd.var0))) - float(erf(_erf_arg(tau_d, rd.mu1, rd.var1)))
    return 0.5 + 0.125 * a * b


def ber_chain_rule(tau_r: float, tau_d: float, tr: DetectionStats, rd: DetectionStats,
                   prior_one: float = 0.5) -> float:
    """Same error probability expanded over the relay decision, any prior.

    Decode-and-forward: given x_R, the destination decision does not depend on x_T.
    """
    r = {s: cond_detect_one(tau_r, tr, s) for s in (0, 1)}   # P(x_R = 1 | x_T = s)
    d = {s: cond_detect_one(tau_d, rd, s) for s in (0, 1)}   # P(x_D = 1 | x_R = s)
    # P(x_D = 1 | x_T = 0) and P(x_D = 0 | x_T = 1)
    false_alarm = (1.0 - r[0]) * d[0] + r[0] * d[1]
    miss = (1.0 - r[1]) * (1.0 - d[0]) + r[1] * (1.0 - d[1])
    return (1.0 - prior_one) * false_alarm + prior_one * miss


def molecular_ber(link: MolecularLinkConfig) -> float:
    """End-to-end error probability of the molecular link at ``link``'s thresholds."""
    tr, rd = hop_stats(link)
    return ber_from_stats(link.threshold_relay, link.threshold_dest, tr, rd)


def molecular_ber_chain(link: MolecularLinkConfig) -> float:
    """:func:`molecular_ber` through the unreduced expansion, honouring ``link.prior_one``."""
    tr, rd = hop_stats(link)
    return ber_chain_rule(link.threshold_relay, link.threshold_dest, tr, rd, link.prior_one)


def best_thresholds(link: MolecularLinkConfig, step: float = 1.0) -> tuple[float, float, float]:
    """Grid search over integer-spaced thresholds minimising :func:`molecular_ber`.

    With equiprobable bits the error is ``0.5 - 0.5 * g_R * g_D`` where each
    ``g`` is the detection-probability gap of one hop, so the two thresholds
    separate and each hop is searched on its own.  Returns ``(tau_r, tau_d, ber)``.
    """
    tr, rd = hop_stats(link)

    def best_gap(stats: DetectionStats) -> tuple[float, float]:
        lo = math.floor(stats.mu0 - 8.0 * math.sqrt(stats.var0))
        hi = math.ceil(stats.mu1 + 8.0 * math.sqrt(stats.var1))
        taus = np.arange(lo, hi + step, step)
        gap = (erf((taus - stats.mu0) / math.sqrt(2 * stats.var0))
               - erf((taus - stats.mu1) / math.sqrt(2 * stats.var1))) / 2.0
        i = int(np.argmax(gap))
        return float(taus[i]), float(gap[i])

    tau_r, _ = best_gap(tr)
    tau_d, _ = best_gap(rd)
    return tau_r, tau_d, ber_from_stats(tau_r, tau_d, tr, rd)
