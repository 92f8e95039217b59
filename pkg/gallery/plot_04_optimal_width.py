"""
Optimal beam width against energy
=================================

A coarse grid at one aperture radius locates the minimum and a fine grid at
a tenth of a radius refines it.  With jitter the best width grows with
energy; with a purely static offset it stays put.
"""

from ppm_pointing import PointingGeometry, PpmConfig, optimal_width_curve

config = PpmConfig(16, 2)
grid = list(range(0, 41, 5))
static = optimal_width_curve(config, grid, PointingGeometry(mu_x=10.0))
jitter = optimal_width_curve(config, grid, PointingGeometry(mu_x=10.0, sigma_x=1.0, sigma_y=1.0))
for s, j in zip(static, jitter):
    print(f"{s.ebn0_db:5.1f} dB  static w_opt={s.w_opt:5.1f}a  jitter w_opt={j.w_opt:5.1f}a"
          f"  (ABEP {j.abep_min:.2e})")
