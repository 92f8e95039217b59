"""
Narrow or wide beam?
====================

A narrow beam puts more energy on the aperture when it hits, but a
boresight offset of ten aperture radii pushes it off target.  Sweeping the
width at a few energies shows the trade-off that the optimizer resolves.
"""

import numpy as np

from ppm_pointing import PointingGeometry, PpmConfig
from ppm_pointing.optimizer import abep_at_width

config = PpmConfig(16, 2)
g = PointingGeometry(mu_x=10.0, sigma_x=1.0, sigma_y=1.0)
widths = np.arange(10.0, 26.0, 5.0)
print("Eb/N0 dB  " + "  ".join(f"w={w:4.1f}a" for w in widths))
for db in (25.0, 30.0, 35.0, 40.0):
    row = [abep_at_width(config, 10 ** (db / 10), g, w) for w in widths]
    print(f"{db:8.1f}  " + "  ".join(f"{p:.2e}" for p in row))
