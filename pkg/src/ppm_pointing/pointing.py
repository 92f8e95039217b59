"""Pointing-error geometry and the fade distribution it induces.

A Gaussian beam of 1/e^2 intensity radius ``w_z`` lands on a circular
aperture of radius ``a`` with a random offset whose x and y components are
independent Gaussians.  The collected fraction is approximated as
``A0 * exp(-2 r^2 / w_zeq^2)`` and its distribution by the power law
``F(t) = (t / A)**phi2`` on ``[0, A]``, with ``(phi2, A)`` obtained from the
modified-Rayleigh approximation of the Beckmann radial error.

All lengths are normalised to the aperture radius internally.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .abep import Deterministic, FadeDistribution, GammaFade
from .numerics import DomainError, erf

log = logging.getLogger(__name__)

__all__ = [
    "PointingGeometry",
    "EquivalentBeam",
    "equivalent_beam",
    "fade_params",
    "pdf_t",
    "cdf_t",
    "collected_fraction",
]


@dataclass(frozen=True)
class PointingGeometry:
    """Aperture radius, beam width and misalignment statistics, in one length unit."""

    a: float = 1.0
    w_z: float = 15.0
    mu_x: float = 0.0
    mu_y: float = 0.0
    sigma_x: float = 0.0
    sigma_y: float = 0.0

    def __post_init__(self):
        if not self.a > 0:
            raise DomainError(f"aperture radius must be positive, got {self.a}")
        if not self.w_z > 0:
            raise DomainError(f"beam width must be positive, got {self.w_z}")
        if not (self.sigma_x >= 0 and self.sigma_y >= 0):
            raise DomainError("jitter standard deviations must be non-negative")
        for name in ("mu_x", "mu_y"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")

    def normalized(self) -> "PointingGeometry":
        """The same geometry with every length divided by ``a``."""
        a = self.a
        return PointingGeometry(1.0, self.w_z / a, self.mu_x / a, self.mu_y / a,
                                self.sigma_x / a, self.sigma_y / a)

    def with_width(self, w_z: float) -> "PointingGeometry":
        return PointingGeometry(self.a, w_z, self.mu_x, self.mu_y, self.sigma_x, self.sigma_y)

    @property
    def is_static(self) -> bool:
        return self.sigma_x == 0 and self.sigma_y == 0


@dataclass(frozen=True)
class EquivalentBeam:
    v: float
    A0: float
    w_zeq: float


def equivalent_beam(g: PointingGeometry) -> EquivalentBeam:
    """Aperture-to-beam ratio ``v``, peak collected fraction ``A0`` and ``w_zeq``.

    ``w_zeq`` is returned in the geometry's own length unit.
    """
    v = math.sqrt(math.pi / 2.0) * g.a / g.w_z
    erf_v = erf(v)
    A0 = erf_v * erf_v
    # w_zeq^2 / w_z^2 = √π erf(v) / (2 v e^{-v^2}); the exponential is kept
    # in the log to survive v large
    ratio = math.exp(math.log(math.sqrt(math.pi) * erf_v / (2.0 * v)) + v * v)
    return EquivalentBeam(v=v, A0=A0, w_zeq=g.w_z * math.sqrt(ratio))


def fade_params(g: PointingGeometry) -> FadeDistribution:
    """Fade distribution of the collected fraction for geometry ``g``.

    Zero jitter on both axes gives a :class:`Deterministic` fade.  Otherwise
    a :class:`GammaFade` is returned; a zero deviation on one axis enters
    through the finite limits of its terms, so one-sided jitter is allowed.
    An amplitude that underflows to zero comes back as ``Deterministic(0.0)``.
    """
    n = g.normalized()
    beam = equivalent_beam(n)
    weq2 = beam.w_zeq ** 2
    offset = 2.0 * (n.mu_x ** 2 + n.mu_y ** 2) / weq2
    if n.is_static:
        return Deterministic(t0=beam.A0 * math.exp(-offset))

    sx2, sy2 = n.sigma_x ** 2, n.sigma_y ** 2
    sigma_mod2 = ((3.0 * n.mu_x ** 2 * sx2 ** 2 + 3.0 * n.mu_y ** 2 * sy2 ** 2
                   + sx2 ** 3 + sy2 ** 3) / 2.0) ** (1.0 / 3.0)
    phi2 = weq2 / (4.0 * sigma_mod2)
    # 1/phi^2 - 1/(2 phi_x^2) - 1/(2 phi_y^2) - mu_x^2/(2 sigma_x^2 phi_x^2) - ...
    exponent = (4.0 * sigma_mod2 - 2.0 * sx2 - 2.0 * sy2) / weq2 - offset
    A = beam.A0 * math.exp(exponent)
    if A == 0.0:
        log.info("fade amplitude underflows for %s; no energy collected", g)
        return Deterministic(t0=0.0)
    if A > 1.0:
        log.info("clamping fade amplitude A=%.6g to 1 for %s", A, g)
        A = 1.0
    return GammaFade(phi2=phi2, A=A)


def pdf_t(fade: GammaFade, t):
    """Density of the collected fraction; zero outside ``[0, A]``."""
    t = np.asarray(t, dtype=float)
    inside = (t >= 0) & (t <= fade.A)
    with np.errstate(divide="ignore", invalid="ignore"):
        dens = fade.phi2 / fade.A ** fade.phi2 * np.power(t, fade.phi2 - 1.0)
    out = np.where(inside, dens, 0.0)
    return float(out) if out.ndim == 0 else out


def cdf_t(fade: GammaFade, t):
    """``(t / A)**phi2`` clipped to ``[0, 1]``."""
    u = np.clip(np.asarray(t, dtype=float) / fade.A, 0.0, 1.0)
    out = u ** fade.phi2
    return float(out) if out.ndim == 0 else out


def collected_fraction(r, beam: EquivalentBeam):
    """Fraction of beam energy through the aperture at radial offset ``r``.

    ``r`` must be in the same unit as ``beam.w_zeq``.
    """
    r = np.asarray(r, dtype=float)
    out = beam.A0 * np.exp(-2.0 * r * r / beam.w_zeq ** 2)
    return float(out) if out.ndim == 0 else out
