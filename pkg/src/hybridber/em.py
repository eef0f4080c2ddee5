"""Average BER of the three BPSK electromagnetic links.

in2on-body and on-body links see a log-normal SNR; the off-body link is
Rayleigh faded.  The log-normal average is computed by Gauss-Hermite
quadrature over the standardised log-SNR with node doubling until two
successive estimates agree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import erfc, roots_hermitenorm

from .config import In2onConfig, OffBodyConfig, OnBodyConfig

PRONY_COEFFS = ((0.168, 1.752), (0.144, 1.05), (0.002, 1.206))

GH_START = 32
GH_MAX = 1024
QUAD_RTOL = 1e-8
# absolute floor so vanishing averages (deep tails) do not chase relative noise
QUAD_ATOL = 1e-300


class QuadratureError(ArithmeticError):
    """Node doubling hit the cap before two estimates agreed."""

    def __init__(self, message: str, estimate: float, gap: float):
        super().__init__(f"{message} (last estimate {estimate!r}, gap {gap!r})")
        self.estimate = estimate
        self.gap = gap


@lru_cache(maxsize=None)
def _gh_rule(n: int) -> tuple[np.ndarray, np.ndarray]:
    # probabilists' Hermite: weight exp(-u^2/2); normalise to a standard normal expectation
    x, w = roots_hermitenorm(n)
    return x, w / math.sqrt(2.0 * math.pi)


def normal_expectation(g, rtol: float = QUAD_RTOL, atol: float = QUAD_ATOL,
                       n_start: int = GH_START, n_max: int = GH_MAX) -> float:
    """E[g(U)] for U ~ N(0, 1) by Gauss-Hermite with node doubling.

    ``g`` must accept a numpy array.  Raises :class:`QuadratureError` if the
    estimates at ``n`` and ``2n`` nodes still disagree at ``n_max``.
    """
    x, w = _gh_rule(n_start)
    prev = float(np.dot(w, g(x)))
    n = n_start
    gap = math.inf
    while n < n_max:
        n *= 2
        x, w = _gh_rule(n)
        est = float(np.dot(w, g(x)))
        gap = abs(est - prev)
        if gap <= rtol * abs(est) + atol:
            return est
        prev = est
    raise QuadratureError(f"Gauss-Hermite did not converge by {n_max} nodes", prev, gap)


def erfc_prony(x):
    """Three-term exponential approximation of erfc for x >= 0."""
    x2 = np.square(x)
    out = sum(a * np.exp(-b * x2) for a, b in PRONY_COEFFS)
    return 2.0 * out


def frustration(k: float, l: float) -> float:
    """Integral over x > 0 of exp(-k x^2) times a log-normal(-l^2, l^2) density.

    Equivalently E[exp(-k X^2)] with ln X ~ N(-l^2, l^2).
    """
    if k < 0 or l <= 0:
        raise ValueError("frustration needs k >= 0 and l > 0")
    if k == 0:
        return 1.0
    lnk = math.log(k)
    # k X^2 = exp(ln k - 2 l^2 + 2 l u); clip the exponent so huge arguments give exp(-inf) = 0
    return normal_expectation(lambda u: np.exp(-np.exp(np.minimum(lnk - 2 * l * l + 2 * l * u, 700.0))))


@dataclass(frozen=True)
class LogNormalSnr:
    """SNR with ln(gamma) ~ N(mu_gamma, sigma_gamma^2)."""

    mu_gamma: float
    sigma_gamma: float

    def __post_init__(self):
        if not math.isfinite(self.mu_gamma):
            raise ValueError("mu_gamma must be finite")
        if not (math.isfinite(self.sigma_gamma) and self.sigma_gamma > 0):
            raise ValueError("sigma_gamma must be finite and > 0")


def _bpsk_integrand(snr: LogNormalSnr, erfc_fn):
    mu, s = snr.mu_gamma, snr.sigma_gamma

    def g(u):
        # sqrt(gamma) = exp((mu + s u) / 2); cap keeps exp finite, erfc is 0 there anyway
        return 0.5 * erfc_fn(np.exp(np.minimum((mu + s * u) / 2.0, 300.0)))
    return g


def lognormal_aber(snr: LogNormalSnr) -> float:
    """E[erfc(sqrt(gamma)) / 2] over the log-normal SNR, exact erfc."""
    return normal_expectation(_bpsk_integrand(snr, erfc))


def lognormal_aber_prony(snr: LogNormalSnr) -> float:
    """Same average with erfc replaced by :func:`erfc_prony`."""
    return normal_expectation(_bpsk_integrand(snr, erfc_prony))


def lognormal_aber_frustration(snr: LogNormalSnr) -> float:
    """Closed form of the Prony-approximated average as a sum of Frustration functions."""
    scale = math.exp(snr.mu_gamma + snr.sigma_gamma ** 2 / 2.0)
    return sum(a * frustration(b * scale, snr.sigma_gamma / 2.0) for a, b in PRONY_COEFFS)


def _check_t(t_sym: float) -> None:
    if not (math.isfinite(t_sym) and t_sym > 0):
        raise ValueError(f"symbol duration must be finite and > 0, got {t_sym}")


def in2on_gain(cfg: In2onConfig) -> float:
    """Linear power gain from the reference path loss and the distance exponent."""
    loss_db = cfg.pl_ref_db + 10.0 * cfg.pathloss_exp * math.log10(cfg.dist / cfg.ref_dist)
    return math.exp(-loss_db / 10.0 * math.log(10.0))


def in2on_snr_params(cfg: In2onConfig, t_sym: float) -> LogNormalSnr:
    _check_t(t_sym)
    mu = math.log(in2on_gain(cfg) * t_sym * cfg.tx_power / cfg.noise_psd)
    return LogNormalSnr(mu, cfg.shadow_sigma_db * math.log(10.0) / 10.0)


def in2on_aber(cfg: In2onConfig, t_sym: float) -> float:
    return lognormal_aber(in2on_snr_params(cfg, t_sym))


def onbody_snr_params(cfg: OnBodyConfig, t_sym: float) -> LogNormalSnr:
    _check_t(t_sym)
    gamma_on = cfg.path_gain * cfg.tx_power * t_sym / cfg.noise_psd
    return LogNormalSnr(cfg.lognorm_mu + math.log(gamma_on), cfg.lognorm_sigma)


def onbody_aber(cfg: OnBodyConfig, t_sym: float) -> float:
    return lognormal_aber(onbody_snr_params(cfg, t_sym))


def offbody_mean_snr(cfg: OffBodyConfig, t_sym: float) -> float:
    _check_t(t_sym)
    return cfg.tx_power * t_sym * cfg.dist ** (-cfg.pathloss_exp) / cfg.noise_psd


def rayleigh_bpsk_ber(mean_snr: float) -> float:
    """BPSK over Rayleigh fading at average SNR per bit ``mean_snr``."""
    if mean_snr < 0:
        raise ValueError("mean SNR must be >= 0")
    # 1 - sqrt(g/(1+g)) rewritten without cancellation at high SNR
    root = math.sqrt(mean_snr / (1.0 + mean_snr))
    return 0.5 / ((1.0 + mean_snr) * (1.0 + root))


def offbody_ber(cfg: OffBodyConfig, t_sym: float) -> float:
    return rayleigh_bpsk_ber(offbody_mean_snr(cfg, t_sym))
