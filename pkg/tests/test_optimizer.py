import math

import numpy as np
import pytest
from scipy.optimize import brentq

from ppm_pointing.abep import PpmConfig, abep, db_to_linear
from ppm_pointing.numerics import DomainError
from ppm_pointing.optimizer import (
    BracketError,
    OptimumPoint,
    WidthSearch,
    abep_at_width,
    optimal_width_curve,
    optimize_width,
)
from ppm_pointing.pointing import PointingGeometry, fade_params

C16 = PpmConfig(16, 2)
STATIC = PointingGeometry(mu_x=10.0)
JITTER = PointingGeometry(mu_x=10.0, sigma_x=1.0, sigma_y=1.0)


def energy_for(config, g, target):
    """Eb/N0 in dB at which the ABEP of geometry ``g`` equals ``target``."""
    f = lambda db: math.log(abep(config, db_to_linear(db), fade_params(g)) / target)
    return brentq(f, 0.0, 45.0, xtol=1e-10)


class TestWidthSearch:
    def test_grids(self):
        s = WidthSearch(1.0, 60.0, 1.0, 0.1)
        assert s.coarse_grid()[[0, -1]].tolist() == [1.0, 60.0]
        assert len(s.coarse_grid()) == 60
        fine = s.fine_grid(15.0)
        assert len(fine) == 21 and fine[0] == pytest.approx(14.0) and fine[-1] == pytest.approx(16.0)

    def test_fine_grid_clipped(self):
        assert WidthSearch(1.0, 60.0).fine_grid(1.0)[0] == pytest.approx(1.0)

    @pytest.mark.parametrize("args", [(0.0, 10.0), (10.0, 5.0), (1.0, 10.0, 0.1, 0.5)])
    def test_invalid(self, args):
        with pytest.raises(DomainError):
            WidthSearch(*args)


class TestAnchors:
    def test_static_optimum_near_fifteen(self):
        db = energy_for(C16, STATIC.with_width(15.0), 1e-6)
        assert abs(optimize_width(C16, db, STATIC).w_opt - 15.0) <= 1.0

    def test_jitter_high_energy_near_twenty(self):
        # ABEP near 1e-10 at the optimum, well under 1e-6
        p = optimize_width(C16, 37.0, JITTER)
        assert p.abep_min < 1e-9
        assert abs(p.w_opt - 20.0) <= 1.5

    def test_jitter_low_energy_near_one_and_a_half_offsets(self):
        p = optimize_width(C16, 10.0, JITTER)
        assert abs(p.w_opt - 15.0) <= 1.5


class TestProperties:
    @pytest.mark.parametrize("db", [5.0, 25.0, 33.0, 38.0])
    @pytest.mark.parametrize("g", [STATIC, JITTER], ids=["static", "jitter"])
    def test_local_optimality(self, g, db):
        p = optimize_width(C16, db, g)
        ebn0 = db_to_linear(db)
        centre = abep_at_width(C16, ebn0, g, p.w_opt)
        assert centre == p.abep_min
        for w in (p.w_opt - 0.1, p.w_opt + 0.1):
            assert centre <= abep_at_width(C16, ebn0, g, w)

    @pytest.mark.parametrize("db", [0.0, 20.0, 36.0])
    def test_refinement_consistency(self, db):
        p = optimize_width(C16, db, JITTER)
        assert abs(p.w_opt - p.w_coarse) <= 1.0 + 1e-12

    def test_deterministic(self):
        assert optimize_width(C16, 31.0, JITTER) == optimize_width(C16, 31.0, JITTER)

    def test_template_width_ignored(self):
        a = optimize_width(C16, 31.0, JITTER.with_width(3.0))
        b = optimize_width(C16, 31.0, JITTER.with_width(40.0))
        assert a == b

    def test_scale_of_aperture(self):
        # widths are reported in units of a whatever the length unit is
        g = PointingGeometry(a=0.02, mu_x=0.2, sigma_x=0.02, sigma_y=0.02)
        assert optimize_width(C16, 31.0, g).w_opt == optimize_width(C16, 31.0, JITTER).w_opt

    def test_bracket_edge(self):
        with pytest.raises(BracketError) as err:
            optimize_width(C16, 40.0, JITTER, WidthSearch(1.0, 18.0))
        assert err.value.edge == 18.0

    def test_lower_edge(self):
        with pytest.raises(BracketError) as err:
            optimize_width(C16, 20.0, JITTER, WidthSearch(20.0, 40.0))
        assert err.value.edge == 20.0

    @pytest.mark.parametrize("db", [34.0, 36.0, 38.0, 40.0])
    def test_higher_order_allows_broader_beam(self, db):
        wide = optimize_width(PpmConfig(16, 2), db, JITTER).w_opt
        narrow = optimize_width(PpmConfig(2, 2), db, JITTER).w_opt
        assert wide >= narrow - 0.2


class TestCurve:
    GRID = list(np.arange(0.0, 41.0, 2.0))

    def test_static_flat(self):
        w = [p.w_opt for p in optimal_width_curve(C16, self.GRID, STATIC)]
        assert max(w) - min(w) <= 1.0

    def test_jitter_non_decreasing(self):
        w = np.array([p.w_opt for p in optimal_width_curve(C16, self.GRID, JITTER)])
        assert np.all(np.diff(w) >= -0.2)

    def test_warm_equals_cold(self):
        warm = optimal_width_curve(C16, self.GRID, JITTER, warm_start=True)
        cold = optimal_width_curve(C16, self.GRID, JITTER, warm_start=False)
        assert [p.w_opt for p in warm] == [p.w_opt for p in cold]

    def test_warm_start_recovers_from_narrow_edge(self):
        # jump far enough that the optimum leaves the warm bracket
        warm = optimal_width_curve(C16, [0.0, 44.0], JITTER)
        cold = optimize_width(C16, 44.0, JITTER)
        assert warm[1].w_opt == cold.w_opt

    def test_modulation_and_modes_comparable(self):
        a = optimal_width_curve(PpmConfig(2, 2), self.GRID, JITTER)
        b = optimal_width_curve(PpmConfig(16, 200), self.GRID, JITTER)
        assert max(abs(p.w_opt - q.w_opt) for p, q in zip(a, b)) <= 2.0

    def test_empty_grid(self):
        with pytest.raises(DomainError):
            optimal_width_curve(C16, [], JITTER)

    def test_strict_propagates(self):
        with pytest.raises(BracketError):
            optimal_width_curve(C16, [30.0, 44.0], JITTER, WidthSearch(1.0, 25.0))

    def test_lenient_flags_point(self):
        pts = optimal_width_curve(C16, [30.0, 44.0], JITTER, WidthSearch(1.0, 25.0), strict=False)
        assert isinstance(pts[0], OptimumPoint) and not math.isnan(pts[0].w_opt)
        assert math.isnan(pts[1].w_opt) and pts[1].w_coarse == 25.0

    def test_aligned_jitter_golden(self):
        # perfect alignment: below about 11 dB the optimum is pinned to the
        # narrow end of the bracket, then it opens up with energy
        g = PointingGeometry(sigma_x=1.0, sigma_y=1.0)
        pts = optimal_width_curve(C16, [6.0, 10.0, 20.0, 30.0, 40.0], g, strict=False)
        assert [p.w_coarse for p in pts[:2]] == [1.0, 1.0]
        assert all(math.isnan(p.w_opt) for p in pts[:2])
        assert [p.w_opt for p in pts[2:]] == [4.4, 8.5, 15.4]
