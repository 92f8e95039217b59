"""
From pointing geometry to a fade law
====================================

A Gaussian beam of width ``w_z`` lands on an aperture of radius ``a``
with Gaussian offsets.  The collected fraction ``t`` is approximated by a
power law ``F(t) = (t / A) ** phi2`` whose two parameters follow from the
geometry.  Lengths below are in units of ``a``.
"""

from ppm_pointing import PointingGeometry, fade_params
from ppm_pointing.pointing import equivalent_beam

for w in (1.0, 5.0, 15.0, 25.0):
    beam = equivalent_beam(PointingGeometry(w_z=w))
    print(f"w_z={w:4.1f}a  v={beam.v:.4f}  A0={beam.A0:.4e}  w_zeq={beam.w_zeq:.4f}a")

###############################################################################
# Boresight error alone gives a fixed loss; jitter gives a random one.

for g in (PointingGeometry(w_z=15.0, mu_x=10.0),
          PointingGeometry(w_z=15.0, sigma_x=1.0, sigma_y=1.0),
          PointingGeometry(w_z=15.0, mu_x=10.0, sigma_x=1.0, sigma_y=1.0)):
    print(g, "->", fade_params(g))
