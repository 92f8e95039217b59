"""
ABEP of a pre-amplified PPM receiver
====================================

The error probability is a series over the order ``q`` of the competing
noise slots.  For binary PPM with a single noise mode and a fixed
collected fraction it collapses to ``0.5 * exp(-Eb/N0 / 2)``, which gives
a first sanity check before any pointing loss is involved.
"""

import numpy as np

from ppm_pointing import Deterministic, PpmConfig, abep

ebn0 = np.array([0.0, 1.0, 2.0, 5.0, 10.0, 20.0])
series = [abep(PpmConfig(2, 1), x, Deterministic(1.0)) for x in ebn0]
closed = 0.5 * np.exp(-ebn0 / 2)
for x, s, c in zip(ebn0, series, closed):
    print(f"Eb/N0={x:5.1f}  series={s:.15e}  closed form={c:.15e}")

###############################################################################
# Higher orders and more noise modes
# ----------------------------------
# More slots spread the energy of one symbol over more bits, which helps at
# a fixed Eb/N0; more noise modes widen the noise distribution and hurt.
# The first call for ``M = 200`` builds the coefficient tables, which takes
# a few seconds; later calls reuse them.

for Q in (2, 4, 16):
    for M in (1, 2, 200):
        p = abep(PpmConfig(Q, M), 10 ** 1.5, Deterministic(1.0))
        print(f"Q={Q:2d} M={M:3d}  ABEP at 15 dB = {p:.3e}")
