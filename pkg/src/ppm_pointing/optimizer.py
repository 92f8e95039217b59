"""Coarse-to-fine grid search for the ABEP-minimising beam width.

Widths are in units of the aperture radius.  A coarse grid locates the
minimum to within one coarse step, then a fine grid spanning one coarse
step either side refines it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .abep import PpmConfig, abep, db_to_linear
from .numerics import DomainError
from .pointing import PointingGeometry, fade_params

__all__ = [
    "WidthSearch",
    "OptimumPoint",
    "BracketError",
    "abep_at_width",
    "optimize_width",
    "optimal_width_curve",
]

# the span of a warm-started bracket, in coarse steps either side
WARM_HALF_SPAN = 5


class BracketError(ValueError):
    """The coarse minimum sits on the edge of the search bracket."""

    def __init__(self, message: str, edge: float):
        super().__init__(message)
        self.edge = edge


@dataclass(frozen=True)
class WidthSearch:
    w_min: float = 1.0
    w_max: float = 60.0
    coarse_step: float = 1.0
    fine_step: float = 0.1

    def __post_init__(self):
        if not 0 < self.w_min < self.w_max:
            raise DomainError(f"need 0 < w_min < w_max, got [{self.w_min}, {self.w_max}]")
        if not 0 < self.fine_step < self.coarse_step:
            raise DomainError("need 0 < fine_step < coarse_step")

    def coarse_grid(self) -> np.ndarray:
        count = int(np.floor((self.w_max - self.w_min) / self.coarse_step + 1e-9))
        return self.w_min + self.coarse_step * np.arange(count + 1)

    def fine_grid(self, center: float) -> np.ndarray:
        half = int(round(self.coarse_step / self.fine_step))
        grid = center + self.fine_step * np.arange(-half, half + 1)
        return grid[(grid >= self.w_min - 1e-12) & (grid <= self.w_max + 1e-12)]


@dataclass(frozen=True)
class OptimumPoint:
    ebn0_db: float
    w_opt: float
    abep_min: float
    w_coarse: float


def abep_at_width(config: PpmConfig, ebn0: float, g: PointingGeometry, w_z: float) -> float:
    """ABEP with the beam width of ``g`` replaced by ``w_z`` (units of ``g.a``)."""
    return abep(config, ebn0, fade_params(g.with_width(w_z * g.a)))


def _argmin(values: list[float]) -> int:
    # first index of the minimum, i.e. ties go to the narrower beam
    return int(np.argmin(np.asarray(values)))


def optimize_width(
    config: PpmConfig,
    ebn0_db: float,
    g_template: PointingGeometry,
    search: WidthSearch = WidthSearch(),
) -> OptimumPoint:
    """Beam width minimising the ABEP at ``ebn0_db``.

    The width field of ``g_template`` is ignored.

    Raises
    ------
    BracketError
        If the coarse minimum falls on either end of the bracket.
    """
    ebn0 = db_to_linear(ebn0_db)
    coarse = search.coarse_grid()
    values = [abep_at_width(config, ebn0, g_template, w) for w in coarse]
    k = _argmin(values)
    if k == 0 or k == len(coarse) - 1:
        raise BracketError(
            f"coarse minimum at bracket edge w={coarse[k]:g}a for Eb/N0={ebn0_db:g} dB; "
            f"widen [{search.w_min:g}, {search.w_max:g}]",
            float(coarse[k]),
        )
    w_coarse = float(coarse[k])
    fine = search.fine_grid(w_coarse)
    fine_values = [
        values[k] if abs(w - w_coarse) < 1e-12 else abep_at_width(config, ebn0, g_template, w)
        for w in fine
    ]
    j = _argmin(fine_values)
    return OptimumPoint(
        ebn0_db=float(ebn0_db),
        w_opt=float(np.round(fine[j], 10)),
        abep_min=fine_values[j],
        w_coarse=w_coarse,
    )


def optimal_width_curve(
    config: PpmConfig,
    ebn0_grid_db: Sequence[float],
    g_template: PointingGeometry,
    search: WidthSearch = WidthSearch(),
    warm_start: bool = True,
    strict: bool = True,
) -> list[OptimumPoint]:
    """Optimal width at every grid value.

    With ``warm_start`` each point searches a bracket of ``WARM_HALF_SPAN``
    coarse steps around the previous optimum.  If its minimum lands on an
    edge of that narrowed bracket the point is searched again over the full
    bracket, whose own edges still raise :class:`BracketError`.

    With ``strict=False`` a full-bracket edge hit does not abort the curve;
    that point comes back with ``w_opt`` and ``abep_min`` set to NaN and
    ``w_coarse`` set to the offending edge.
    """
    if len(ebn0_grid_db) == 0:
        raise DomainError("empty Eb/N0 grid")
    points: list[OptimumPoint] = []
    for db in ebn0_grid_db:
        valid = [p for p in points if not np.isnan(p.w_opt)]
        if warm_start and valid:
            prev = valid[-1].w_opt
            span = WARM_HALF_SPAN * search.coarse_step
            lo = max(search.w_min, search.w_min + search.coarse_step
                     * np.floor((prev - span - search.w_min) / search.coarse_step))
            hi = min(search.w_max, lo + 2 * span)
            try:
                points.append(optimize_width(
                    config, db, g_template,
                    WidthSearch(lo, hi, search.coarse_step, search.fine_step)))
                continue
            except BracketError:
                pass
        try:
            points.append(optimize_width(config, db, g_template, search))
        except BracketError as err:
            if strict:
                raise
            points.append(OptimumPoint(float(db), math.nan, math.nan, err.edge))
    return points
