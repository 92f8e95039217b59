"""Average bit-error probability of an optically pre-amplified PPM receiver.

The error probability is an alternating sum over ``q = 1..Q-1`` of
non-negative partial sums ``S_q``.  Each ``S_q`` is a double series in
``n`` and ``i`` whose ``z``-independent part is folded once per ``(M, q)``
into a cached table, so that a single evaluation only needs the fade
weights ``w(n)``.

The survival function of a Gamma(M, 1) noise slot is
``e^-y * sum_{k<M} y^k/k!``; its q-th power contributes the polynomial
coefficients returned by :func:`coeff_table`.  The series constants are
``c_i^q = i! * [x^i] (sum_{k<M} x^k/k!)^q``; the ``i!`` is what makes the
binomial ``C(i+M-1, n+M-1)`` come out of the Gamma integrals, and without
it the zero-signal limit is lost for ``M >= 2``.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from typing import Union

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.special import gammaln

from .numerics import (
    DomainError,
    NumericalError,
    _log_prefix,
    log_reg_lower_gamma,
    log_sum_exp,
)

__all__ = [
    "PpmConfig",
    "AmplifierModel",
    "CoeffTable",
    "GammaFade",
    "Deterministic",
    "FadeDistribution",
    "CancellationError",
    "coeff_table",
    "compute_zq",
    "weight_poisson",
    "weight_gamma",
    "log_poisson_weights",
    "log_gamma_weights",
    "abep",
    "ebn0_from_link",
    "db_to_linear",
    "linear_to_db",
]


@dataclass(frozen=True)
class PpmConfig:
    """PPM order ``Q`` (slots per symbol) and ASE noise mode count ``M``."""

    Q: int
    M: int

    def __post_init__(self):
        if self.Q < 2 or self.Q & (self.Q - 1):
            raise DomainError(f"Q must be a power of two >= 2, got {self.Q}")
        if self.M < 1:
            raise DomainError(f"M must be >= 1, got {self.M}")

    @property
    def bits_per_symbol(self) -> int:
        return self.Q.bit_length() - 1


@dataclass(frozen=True)
class AmplifierModel:
    """Optical pre-amplifier: linear gain, spontaneous emission factor, photon energy [J]."""

    gain: float
    n_sp: float
    photon_energy: float

    def __post_init__(self):
        if not self.gain > 1:
            raise DomainError(f"amplifier gain must exceed 1, got {self.gain}")
        if not self.n_sp >= 1:
            raise DomainError(f"n_sp must be >= 1, got {self.n_sp}")
        if not self.photon_energy > 0:
            raise DomainError("photon energy must be positive")

    @property
    def noise_density(self) -> float:
        """ASE spectral density N0 = n_sp * hf * (G - 1)."""
        return self.n_sp * self.photon_energy * (self.gain - 1.0)


@dataclass(frozen=True)
class GammaFade:
    """Collected fraction with pdf ``phi2 / A**phi2 * t**(phi2 - 1)`` on ``[0, A]``."""

    phi2: float
    A: float

    def __post_init__(self):
        if not self.phi2 > 0 or math.isinf(self.phi2):
            raise DomainError(f"phi2 must be positive and finite, got {self.phi2}")
        if not 0 < self.A <= 1:
            raise DomainError(f"A must lie in (0, 1], got {self.A}")


@dataclass(frozen=True)
class Deterministic:
    """Fixed collected fraction ``t0`` (static misalignment, no jitter)."""

    t0: float

    def __post_init__(self):
        if not 0 <= self.t0 <= 1:
            raise DomainError(f"t0 must lie in [0, 1], got {self.t0}")


FadeDistribution = Union[GammaFade, Deterministic]


@dataclass(frozen=True)
class CoeffTable:
    M: int
    q: int
    log_c: np.ndarray

    @property
    def values(self) -> np.ndarray:
        return np.exp(self.log_c)


class CancellationError(NumericalError):
    """The alternating outer sum cancelled below trustworthy precision."""

    def __init__(self, message: str, value: float, largest_term: float):
        super().__init__(message)
        self.value = value
        self.largest_term = largest_term


_cache_lock = threading.Lock()
_log_fact = np.zeros(1, dtype=np.longdouble)
_coeff_cache: dict[tuple[int, int], CoeffTable] = {}
_inner_cache: dict[tuple[int, int], np.ndarray] = {}


def _log_factorials(nmax: int) -> np.ndarray:
    """ln k! for k = 0..nmax in long double."""
    global _log_fact
    table = _log_fact
    if len(table) <= nmax:
        k = np.arange(1, 2 * nmax + 2, dtype=np.longdouble)
        table = np.concatenate([[np.longdouble(0)], np.cumsum(np.log(k))])
        table.setflags(write=False)
        _log_fact = table
    return table[:nmax + 1]


def _log_convolve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Log-domain polynomial product: out[j] = ln Σ_k exp(a[j-k] + b[k])."""
    pad = np.full(len(b) - 1, -np.inf)
    windows = sliding_window_view(np.concatenate([pad, a, pad]), len(b))
    return log_sum_exp(windows + b[::-1], axis=1)


def _coeff_table_locked(M: int, q: int) -> CoeffTable:
    key = (M, q)
    table = _coeff_cache.get(key)
    if table is not None:
        return table
    base = -_log_factorials(M - 1)
    if q == 1:
        log_c = base.copy()
    else:
        log_c = _log_convolve(_coeff_table_locked(M, q - 1).log_c, base)
    log_c.setflags(write=False)
    table = CoeffTable(M, q, log_c)
    _coeff_cache[key] = table
    return table


def coeff_table(M: int, q: int) -> CoeffTable:
    """Log coefficients of ``(sum_{k=0}^{M-1} x^k/k!)**q``, length ``q*(M-1)+1``.

    The series constant ``c_i^q`` is ``i!`` times entry ``i``.  Entries are
    long double so that the series keeps its digits for ``M`` in the hundreds.

    Tables are cached per ``(M, q)``; a filled entry is read without locking.
    """
    if M < 1 or q < 1:
        raise DomainError(f"coeff_table needs M >= 1 and q >= 1, got ({M}, {q})")
    table = _coeff_cache.get((M, q))
    if table is not None:
        return table
    with _cache_lock:
        return _coeff_table_locked(M, q)


def _inner_log_table(M: int, q: int) -> np.ndarray:
    """ln of Σ_{i>=n} C(i+M-1, n+M-1) c_i^q / (1+q)^(i+M) / q^n for each n."""
    key = (M, q)
    out = _inner_cache.get(key)
    if out is not None:
        return out
    log_c = coeff_table(M, q).log_c
    with _cache_lock:
        out = _inner_cache.get(key)
        if out is not None:
            return out
        L = len(log_c)
        lf = _log_factorials(L + M)
        i = np.arange(L)
        log1pq = np.log1p(np.longdouble(q))
        col = lf[i + M - 1] + lf[i] + log_c - (i + M) * log1pq
        out = np.empty(L, dtype=np.longdouble)
        block = 256
        for start in range(0, L, block):
            n = np.arange(start, min(start + block, L))[:, None]
            terms = col[None, :] - lf[n + M - 1] - lf[np.maximum(i - n, 0)]
            terms = np.where(i[None, :] >= n, terms, -np.inf)
            out[start:start + len(n)] = (log_sum_exp(terms, axis=1)
                                         - n[:, 0] * np.log(np.longdouble(q)))
        out.setflags(write=False)
        _inner_cache[key] = out
        return out


def compute_zq(q: int, ebn0: float, Q: int) -> float:
    """Effective energy ``q/(1+q) * Eb/N0 * log2(Q)`` seen by the q-th term."""
    if not 1 <= q <= Q - 1:
        raise DomainError(f"q must lie in [1, {Q - 1}], got {q}")
    if not ebn0 >= 0:
        raise DomainError(f"Eb/N0 must be non-negative, got {ebn0}")
    return q / (1.0 + q) * ebn0 * math.log2(Q)


def weight_poisson(n: int, A: float, z: float) -> float:
    """(A z)^n e^{-A z} / n!"""
    if n < 0 or not 0 < A <= 1 or not z >= 0:
        raise DomainError(f"invalid arguments n={n}, A={A}, z={z}")
    x = A * z
    if x == 0.0:
        return 1.0 if n == 0 else 0.0
    return math.exp(n * math.log(x) - x - math.lgamma(n + 1))


def weight_gamma(n: int, fade: GammaFade, z: float) -> float:
    """phi2 * γ(n + phi2, A z) / ((A z)^phi2 * n!)."""
    if n < 0 or not z >= 0:
        raise DomainError(f"invalid arguments n={n}, z={z}")
    x = fade.A * z
    if x == 0.0:
        return 1.0 if n == 0 else 0.0
    s = n + fade.phi2
    return math.exp(
        math.log(fade.phi2)
        - fade.phi2 * math.log(x)
        - math.lgamma(n + 1)
        + math.lgamma(s)
        + log_reg_lower_gamma(s, x)
    )


def log_poisson_weights(nmax: int, A: float, z: float) -> np.ndarray:
    """ln weight_poisson(n, A, z) for n = 0..nmax, in long double."""
    x = np.longdouble(A) * np.longdouble(z)
    if x == 0.0:
        out = np.full(nmax + 1, -np.inf, dtype=np.longdouble)
        out[0] = 0.0
        return out
    n = np.arange(nmax + 1)
    return n * np.log(x) - x - _log_factorials(nmax)


def log_gamma_weights(nmax: int, fade: GammaFade, z: float) -> np.ndarray:
    """ln weight_gamma(n, fade, z) for n = 0..nmax.

    Only the top order needs an incomplete gamma evaluation.  Below it,
    ``h(n) = ∫_0^1 u^(n+phi2-1) e^(-x u) du`` obeys
    ``h(n) = (e^-x + x h(n+1)) / (n + phi2)``, which adds positive terms
    only and is therefore stable downward.
    """
    phi2 = fade.phi2
    x = fade.A * z
    if x == 0.0:
        out = np.full(nmax + 1, -np.inf)
        out[0] = 0.0
        return out
    lx = math.log(x)
    s_top = nmax + phi2
    # ln h(nmax) = ln P(s, x) + ln Γ(s) - s ln x
    log_h = np.empty(nmax + 1)
    log_h[nmax] = log_reg_lower_gamma(s_top, x) - _log_prefix(s_top, x) - x
    prev = log_h[nmax]
    for n in range(nmax - 1, -1, -1):
        b = lx + prev
        hi, lo = (b, -x) if b > -x else (-x, b)
        prev = hi + math.log1p(math.exp(lo - hi)) - math.log(n + phi2)
        log_h[n] = prev
    n = np.arange(nmax + 1, dtype=float)
    return math.log(phi2) + n * lx - gammaln(n + 1.0) + log_h


def _log_weights(fade: FadeDistribution, nmax: int, z: float) -> np.ndarray:
    if isinstance(fade, GammaFade):
        return log_gamma_weights(nmax, fade, z)
    return log_poisson_weights(nmax, fade.t0, z)


def _outer_terms(config: PpmConfig, ebn0: float, fade: FadeDistribution) -> list:
    """Signed long double terms C(Q-1, q) (-1)^(q+1) S_q, q = 1..Q-1."""
    Q, M = config.Q, config.M
    terms = []
    for q in range(1, Q):
        z = compute_zq(q, ebn0, Q)
        inner = _inner_log_table(M, q)
        s_q = np.exp(log_sum_exp(inner + _log_weights(fade, len(inner) - 1, z)))
        sign = 1 if q % 2 else -1
        terms.append(np.longdouble(sign * math.comb(Q - 1, q)) * s_q)
    return terms


def _compensated_sum(terms) -> np.longdouble:
    total = np.longdouble(0)
    carry = np.longdouble(0)
    for t in terms:
        y = t - carry
        s = total + y
        carry = (s - total) - y
        total = s
    return total


def abep(config: PpmConfig, ebn0: float, fade: FadeDistribution) -> float:
    """Average bit-error probability for linear ``ebn0`` = Eb/N0 under ``fade``.

    Parameters
    ----------
    config : PpmConfig
    ebn0 : float
        Energy per bit over the ASE spectral density, linear scale.
    fade : GammaFade or Deterministic
        Distribution of the collected fraction of the beam energy.

    Returns
    -------
    float
        ABEP in ``[0, 0.5]``.

    Raises
    ------
    CancellationError
        If the alternating outer sum ends below both ``1e-3`` times its
        largest term and ``1e-14`` absolute.
    """
    if not ebn0 >= 0 or math.isinf(ebn0):
        raise DomainError(f"Eb/N0 must be finite and non-negative, got {ebn0}")
    if isinstance(fade, Deterministic) and fade.t0 == 0.0:
        return 0.5
    terms = _outer_terms(config, ebn0, fade)
    symbol_error = float(_compensated_sum(terms))
    largest = float(max(abs(t) for t in terms))
    if abs(symbol_error) < 1e-3 * largest and abs(symbol_error) < 1e-14:
        raise CancellationError(
            f"outer sum cancelled to {symbol_error:.3e} from terms of size {largest:.3e}",
            symbol_error,
            largest,
        )
    result = config.Q / (2.0 * (config.Q - 1)) * symbol_error
    if not -1e-12 <= result <= 0.5 + 1e-12:
        raise NumericalError(f"ABEP evaluated to {result!r}, outside [0, 0.5]")
    return min(max(result, 0.0), 0.5)


def ebn0_from_link(amp: AmplifierModel, energy_in: float) -> float:
    """Linear Eb/N0 for received beam energy per bit ``energy_in`` [J]."""
    if not energy_in >= 0:
        raise DomainError(f"received energy must be non-negative, got {energy_in}")
    return amp.gain * energy_in / amp.noise_density


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def linear_to_db(value: float) -> float:
    return 10.0 * math.log10(value) if value > 0 else -math.inf
