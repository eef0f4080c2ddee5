"""Brownian-dynamics oracle for hit probabilities and the relay link BER.

Work is split into fixed-size blocks; block ``i`` draws from its own Philox
stream keyed by ``(seed, stream, i)``, so results do not depend on how many
worker threads run the blocks or in which order they finish.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .channel import Hop, HitQuery, hop_query
from .config import ConfigError, MolecularLinkConfig, Vector3

PARTICLE_BLOCK = 1 << 16
BIT_BLOCK = 512

_HITS_STREAM = 0
_RELAY_STREAM = 1


def block_rng(seed: int, stream: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, stream, block])))


def _map_blocks(fn, n_blocks: int, workers: int) -> list:
    if workers <= 1 or n_blocks == 1:
        return [fn(i) for i in range(n_blocks)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(n_blocks)))


@dataclass(frozen=True)
class SimSpec:
    """Particles released at the origin, observed at ``horizon`` by a sphere at ``offset``."""

    offset: Vector3
    radius: float
    diffusion: float
    drift: Vector3
    horizon: float
    n_particles: int
    dt: float
    seed: int

    def __post_init__(self):
        if self.n_particles < 1 or int(self.n_particles) != self.n_particles:
            raise ConfigError("must be a positive integer", "n_particles")
        if not (self.dt > 0 and self.horizon > 0):
            raise ConfigError("dt and horizon must be > 0", "dt")
        if self.dt > self.horizon / 100.0 * (1 + 1e-12):
            raise ConfigError(f"dt={self.dt} exceeds horizon/100", "dt")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError("seed must be a 64-bit unsigned integer", "seed")
        if self.radius <= 0 or self.diffusion <= 0:
            raise ConfigError("radius and diffusion must be > 0", "radius")

    @classmethod
    def from_query(cls, q: HitQuery, n_particles: int, seed: int, dt: Optional[float] = None) -> "SimSpec":
        return cls(q.offset, q.radius, q.diffusion, q.drift, q.time, n_particles,
                   q.time / 100.0 if dt is None else dt, seed)

    @property
    def n_steps(self) -> int:
        return max(1, round(self.horizon / self.dt))


@dataclass(frozen=True)
class Estimate:
    """Empirical probability with its binomial standard error."""

    p: float
    se: float
    n: int
    count: int

    @classmethod
    def from_counts(cls, count: int, n: int) -> "Estimate":
        p = count / n
        return cls(p, math.sqrt(p * (1.0 - p) / n), n, count)


def _walk(rng: np.random.Generator, n: int, drift: np.ndarray, diffusion: float,
          horizon: float, n_steps: int) -> np.ndarray:
    """Terminal positions of ``n`` particles after ``n_steps`` Euler steps."""
    dt = horizon / n_steps
    step_mean = drift * dt
    step_sd = math.sqrt(2.0 * diffusion * dt)
    pos = np.zeros((n, 3))
    for _ in range(n_steps):
        pos += step_mean + step_sd * rng.standard_normal((n, 3))
    return pos


def _blocks(n: int, size: int) -> list[int]:
    full, rest = divmod(n, size)
    return [size] * full + ([rest] if rest else [])


def _particle_blocks(spec: SimSpec, reducer, workers: int) -> list:
    sizes = _blocks(spec.n_particles, PARTICLE_BLOCK)
    drift = spec.drift.as_array()

    def run(i):
        rng = block_rng(spec.seed, _HITS_STREAM, i)
        pos = _walk(rng, sizes[i], drift, spec.diffusion, spec.horizon, spec.n_steps)
        return reducer(pos)
    return _map_blocks(run, len(sizes), workers)


def simulate_hits(spec: SimSpec, workers: int = 1) -> Estimate:
    """Fraction of particles inside the receiver sphere at ``spec.horizon``."""
    centre = spec.offset.as_array()
    r2 = spec.radius ** 2

    def count(pos):
        return int(np.count_nonzero(np.sum((pos - centre) ** 2, axis=1) <= r2))
    hits = sum(_particle_blocks(spec, count, workers))
    return Estimate.from_counts(hits, spec.n_particles)


def mean_displacement(spec: SimSpec, workers: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Per-axis mean terminal displacement and its standard error."""
    parts = _particle_blocks(spec, lambda pos: (pos.sum(axis=0), (pos ** 2).sum(axis=0)), workers)
    n = spec.n_particles
    s1 = sum(p[0] for p in parts)
    s2 = sum(p[1] for p in parts)
    mean = s1 / n
    var = s2 / n - mean ** 2
    return mean, np.sqrt(var / n)


def _hop_counts(rng, n_senders: int, q: HitQuery, n_molecules: int, n_steps: Optional[int]) -> np.ndarray:
    """In-sphere molecule count for each of ``n_senders`` transmissions of ``n_molecules``."""
    if n_senders == 0 or n_molecules == 0:
        return np.zeros(n_senders, dtype=np.int64)
    m = n_senders * n_molecules
    drift = q.drift.as_array()
    if n_steps is None:
        # free space and a terminal-only observable: the summed increments are
        # one Gaussian step of length q.time, drawn exactly
        pos = drift * q.time + math.sqrt(2.0 * q.diffusion * q.time) * rng.standard_normal((m, 3))
    else:
        pos = _walk(rng, m, drift, q.diffusion, q.time, n_steps)
    inside = np.sum((pos - q.offset.as_array()) ** 2, axis=1) <= q.radius ** 2
    return inside.reshape(n_senders, n_molecules).sum(axis=1)


def _noise(rng, n: int, mean: float, var: float) -> np.ndarray:
    """Counting noise with the given moments: rounded Gaussian floored at zero."""
    return np.maximum(np.rint(mean + math.sqrt(var) * rng.standard_normal(n)), 0.0)


def simulate_relay_ber(link: MolecularLinkConfig, n_bits: int, seed: int, dt: Optional[float] = None,
                       workers: int = 1) -> Estimate:
    """Empirical end-to-end BER of the T -> R -> D molecular link.

    Each bit 1 releases ``molecules_a`` particles from the origin; the relay
    counts those inside its sphere at ``t_dmc / 2``, adds noise, thresholds,
    and on a 1 releases ``molecules_b`` particles from its centre towards the
    destination, which decides the same way.

    ``dt=None`` draws each terminal position in one exact Gaussian step; an
    explicit ``dt`` walks the particles with that step (slow for large runs).
    """
    if n_bits < 1:
        raise ConfigError("must be >= 1", "n_bits")
    q_tr = hop_query(link, Hop.TR)
    q_rd = hop_query(link, Hop.RD)
    n_steps = None if dt is None else max(1, round(q_tr.time / dt))
    sizes = _blocks(n_bits, BIT_BLOCK)

    def run(i):
        rng = block_rng(seed, _RELAY_STREAM, i)
        n = sizes[i]
        x_t = rng.random(n) < link.prior_one
        counts = np.zeros(n)
        counts[x_t] = _hop_counts(rng, int(x_t.sum()), q_tr, link.molecules_a, n_steps)
        x_r = counts + _noise(rng, n, link.noise_mean, link.noise_var) >= link.threshold_relay
        counts = np.zeros(n)
        counts[x_r] = _hop_counts(rng, int(x_r.sum()), q_rd, link.molecules_b, n_steps)
        x_d = counts + _noise(rng, n, link.noise_mean, link.noise_var) >= link.threshold_dest
        return int(np.count_nonzero(x_d != x_t))

    errors = sum(_map_blocks(run, len(sizes), workers))
    return Estimate.from_counts(errors, n_bits)
