"""Monte Carlo simulation of the soft-decision PPM receiver.

Each slot statistic is a chi-square variable with 2M degrees of freedom,
scaled so that a noise-only slot is Gamma(M, 1).  The signal slot is
noncentral with mean ``M + xi``, where ``xi = t * Eb/N0 * log2(Q)``; it is
drawn as the Poisson-Gamma mixture ``Gamma(M + J, 1)``, ``J ~ Poisson(xi)``,
whose cost does not grow with ``M``.

Every chunk of symbols owns a generator seeded from ``(seed, chunk index)``,
so a fixed partition gives bit-identical counts however the chunks are
scheduled.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Union

import numpy as np

from .abep import Deterministic, GammaFade, PpmConfig
from .numerics import DomainError
from .pointing import PointingGeometry, collected_fraction, equivalent_beam

__all__ = [
    "SimSpec",
    "SimResult",
    "chunk_rng",
    "sample_collected_fraction",
    "sample_fade",
    "sample_signal_slot",
    "simulate_abep",
]

Source = Union[PointingGeometry, GammaFade, Deterministic]

BLOCK = 1 << 16


@dataclass(frozen=True)
class SimSpec:
    config: PpmConfig
    ebn0: float
    source: Source
    n_symbols: int
    seed: int = 0
    n_chunks: int = 1

    def __post_init__(self):
        if self.n_symbols < 1:
            raise DomainError(f"n_symbols must be >= 1, got {self.n_symbols}")
        if not 1 <= self.n_chunks <= self.n_symbols:
            raise DomainError(f"n_chunks must lie in [1, n_symbols], got {self.n_chunks}")
        if not self.ebn0 >= 0 or math.isinf(self.ebn0):
            raise DomainError(f"Eb/N0 must be finite and non-negative, got {self.ebn0}")

    def chunk_sizes(self) -> list[int]:
        base, extra = divmod(self.n_symbols, self.n_chunks)
        return [base + (k < extra) for k in range(self.n_chunks)]


@dataclass(frozen=True)
class SimResult:
    abep_estimate: float
    std_error: float
    n_symbols: int
    symbol_errors: int
    seed: int

    @classmethod
    def from_counts(cls, Q: int, symbol_errors: int, n_symbols: int, seed: int) -> "SimResult":
        scale = Q / (2.0 * (Q - 1))
        p = symbol_errors / n_symbols
        return cls(
            abep_estimate=scale * p,
            std_error=scale * math.sqrt(p * (1.0 - p) / n_symbols),
            n_symbols=n_symbols,
            symbol_errors=symbol_errors,
            seed=seed,
        )


def chunk_rng(seed: int, chunk: int) -> np.random.Generator:
    """Independent generator for one chunk of a run."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(chunk,)))


def sample_collected_fraction(g: PointingGeometry, rng: np.random.Generator, size=None):
    """Collected fraction for Gaussian x/y offsets drawn around ``(mu_x, mu_y)``."""
    n = g.normalized()
    beam = equivalent_beam(n)
    x = n.mu_x + n.sigma_x * rng.standard_normal(size)
    y = n.mu_y + n.sigma_y * rng.standard_normal(size)
    return collected_fraction(np.hypot(x, y), beam)


def sample_fade(source: Source, rng: np.random.Generator, size: int) -> np.ndarray:
    if isinstance(source, PointingGeometry):
        return np.asarray(sample_collected_fraction(source, rng, size))
    if isinstance(source, GammaFade):
        # inverse CDF of (t/A)**phi2
        return source.A * rng.random(size) ** (1.0 / source.phi2)
    return np.full(size, float(source.t0))


def sample_signal_slot(M: int, xi, rng: np.random.Generator, size=None):
    """Noncentral slot statistic with mean ``M + xi``."""
    jumps = rng.poisson(xi, size)
    return rng.standard_gamma(M + jumps)


def _noise_slots(M: int, rng: np.random.Generator, shape) -> np.ndarray:
    if M == 1:
        return rng.standard_exponential(shape)
    return rng.standard_gamma(float(M), shape)


def _count_errors(config: PpmConfig, ebn0: float, source: Source, n: int,
                  seed: int, chunk: int) -> int:
    rng = chunk_rng(seed, chunk)
    Q, M = config.Q, config.M
    load = ebn0 * config.bits_per_symbol
    errors = 0
    done = 0
    while done < n:
        size = min(BLOCK, n - done)
        t = sample_fade(source, rng, size)
        signal = sample_signal_slot(M, t * load, rng)
        noise = _noise_slots(M, rng, (size, Q - 1))
        beaten = (noise > signal[:, None]).any(axis=1)
        tied = (noise == signal[:, None]).sum(axis=1)
        contested = np.flatnonzero(~beaten & (tied > 0))
        if contested.size:
            k = tied[contested]
            beaten[contested] = rng.random(contested.size) < k / (k + 1.0)
        errors += int(beaten.sum())
        done += size
    return errors


def simulate_abep(spec: SimSpec, workers: int = 1) -> SimResult:
    """Estimate the ABEP of ``spec`` by direct simulation of symbol decisions.

    ``workers > 1`` runs chunks in separate processes; the result depends
    only on ``spec``.
    """
    sizes = spec.chunk_sizes()
    args = [(spec.config, spec.ebn0, spec.source, n, spec.seed, k) for k, n in enumerate(sizes)]
    if workers > 1 and len(args) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            counts = list(pool.map(_count_errors, *zip(*args)))
    else:
        counts = [_count_errors(*a) for a in args]
    return SimResult.from_counts(spec.config.Q, sum(counts), spec.n_symbols, spec.seed)
