"""Special functions and log-domain accumulation helpers.

Everything combinatorial is carried as a natural-log magnitude, with
``-inf`` standing for an exact zero.
"""

from __future__ import annotations

import math
from typing import Iterable

import numpy as np

__all__ = [
    "DomainError",
    "NumericalError",
    "ln_gamma",
    "log_reg_lower_gamma",
    "reg_lower_gamma",
    "log_binomial",
    "log_sum_exp",
    "erf",
]

MAX_ITER = 1_000_000
_EPS = 1e-17
_TINY = 1e-300
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


class DomainError(ValueError):
    """Argument outside the domain of a function."""


class NumericalError(ArithmeticError):
    """An iterative evaluation failed to converge or lost all significance."""

    def __init__(self, message: str, iterations: int | None = None):
        super().__init__(message)
        self.iterations = iterations


def ln_gamma(x: float) -> float:
    """Natural log of the gamma function for ``x > 0``."""
    if not x > 0:
        raise DomainError(f"ln_gamma requires x > 0, got {x!r}")
    return math.lgamma(x)


def _stirling_correction(s: float) -> float:
    # ln Γ(s) - [(s - 1/2) ln s - s + ln √(2π)], valid to double precision for s >= 10
    r = 1.0 / (s * s)
    return (1.0 / 12.0 - r * (1.0 / 360.0 - r * (1.0 / 1260.0 - r * (1.0 / 1680.0 - r / 1188.0)))) / s


def _log_prefix(s: float, x: float) -> float:
    """ln(x^s e^-x / Γ(s)), without cancelling the two large logarithms."""
    if s < 10.0:
        return s * math.log(x) - x - math.lgamma(s)
    d = (x - s) / s
    if abs(d) < 0.5:
        # s*ln(x/s) + s - x == -s*(d - log1p(d))
        core = -s * (d - math.log1p(d))
    else:
        core = s * math.log(x / s) + (s - x)
    return core + 0.5 * math.log(s) - _HALF_LOG_2PI - _stirling_correction(s)


def _gamma_series(s: float, x: float) -> tuple[float, int]:
    # Σ_k x^k / ((s+1)...(s+k)); the missing 1/s is folded into the prefix
    term = 1.0
    total = 1.0
    ap = s
    for k in range(1, MAX_ITER + 1):
        ap += 1.0
        term *= x / ap
        total += term
        if term < total * _EPS:
            return total, k
    raise NumericalError(
        f"incomplete gamma series did not converge for s={s}, x={x}", MAX_ITER
    )


def _gamma_contfrac(s: float, x: float) -> tuple[float, int]:
    """Modified Lentz evaluation of the continued fraction for Q(s, x)."""
    b = x + 1.0 - s
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for k in range(1, MAX_ITER + 1):
        an = -k * (k - s)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h, k
    raise NumericalError(
        f"incomplete gamma continued fraction did not converge for s={s}, x={x}",
        MAX_ITER,
    )


def _check_gamma_args(s: float, x: float) -> None:
    if not s > 0:
        raise DomainError(f"shape must be positive, got s={s!r}")
    if not x >= 0:
        raise DomainError(f"argument must be non-negative, got x={x!r}")
    if math.isinf(s):
        raise DomainError("shape must be finite")


def log_reg_lower_gamma(s: float, x: float) -> float:
    """ln P(s, x), accurate also where P itself underflows."""
    _check_gamma_args(s, x)
    if x == 0.0:
        return -math.inf
    if math.isinf(x):
        return 0.0
    if x < s + 1.0:
        total, _ = _gamma_series(s, x)
        return _log_prefix(s, x) - math.log(s) + math.log(total)
    frac, _ = _gamma_contfrac(s, x)
    upper = math.exp(_log_prefix(s, x)) * frac
    return math.log1p(-upper)


def reg_lower_gamma(s: float, x: float) -> float:
    """Regularized lower incomplete gamma function P(s, x) = γ(s, x)/Γ(s).

    Power series below ``x = s + 1`` and a continued fraction (modified
    Lentz) above it.

    Raises
    ------
    DomainError
        If ``s <= 0`` or ``x < 0``.
    NumericalError
        If either expansion needs more than ``MAX_ITER`` terms.
    """
    return math.exp(log_reg_lower_gamma(s, x))


def log_binomial(n: int, k: int) -> float:
    """ln C(n, k)."""
    if n < 0 or k < 0:
        raise DomainError(f"log_binomial needs non-negative arguments, got ({n}, {k})")
    if k > n:
        raise DomainError(f"log_binomial needs k <= n, got ({n}, {k})")
    if n <= 64:
        return math.log(math.comb(n, k))
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def log_sum_exp(values: Iterable[float] | np.ndarray, axis: int | None = None):
    """Stable ln Σ exp(values).

    With ``axis`` given the reduction is taken along that axis of an array and
    an array is returned; otherwise the input is flattened and a float comes back.
    Entries equal to ``-inf`` contribute nothing; an all ``-inf`` input gives ``-inf``.
    Long double input is reduced in long double.
    """
    arr = np.asarray(list(values) if not isinstance(values, np.ndarray) else values)
    if arr.dtype != np.longdouble:
        arr = arr.astype(float)
    if arr.size == 0:
        raise DomainError("log_sum_exp of an empty sequence")
    if axis is None:
        arr = arr.ravel()
        top = arr.max()
        if not np.isfinite(top):
            return float(top)
        total = top + np.log(np.exp(np.sort(arr - top)).sum())
        return total if arr.dtype == np.longdouble else float(total)
    top = arr.max(axis=axis, keepdims=True)
    safe = np.where(np.isfinite(top), top, 0.0)
    with np.errstate(divide="ignore"):
        out = np.log(np.exp(arr - safe).sum(axis=axis, keepdims=True)) + safe
    out = np.where(np.isfinite(top), out, top)
    return np.squeeze(out, axis=axis)


def erf(x: float) -> float:
    """Error function."""
    return math.erf(x)
