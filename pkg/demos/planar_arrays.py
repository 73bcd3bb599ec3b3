"""
Planar arrays: closed form, quadrature and Monte Carlo
=======================================================

For uniform azimuth and zenith angles every lag term of mu_UPA is
J0(pi nu)^2 squared, giving a closed form. General angle laws go through
a 2-D quadrature, and Monte Carlo over ray pairs checks both.
"""

import numpy as np

from raymimo.angular import RNGStream, Uniform, VonMises
from raymimo.asymptotics import (MuRow, MuSeries, fit_log_slope, mu_upa,
                                 mu_upa_uniform_closed, polar_bound)

half_turn = Uniform(0.0, np.pi)
for side in (4, 8, 16):
    closed = mu_upa_uniform_closed(side, side, 0.5, 0.5)
    quad = mu_upa(Uniform(), half_turn, side, side, 0.5, 0.5)
    mc = mu_upa(Uniform(), half_turn, side, side, 0.5, 0.5, "monte-carlo",
                rng=RNGStream(0, side), pairs=100_000)
    print(f"{side:2d}x{side:<2d} closed {closed:.6f}  quadrature {quad:.6f}"
          f"  Monte Carlo {mc.mean:.4f} +- {mc.stderr:.4f}")

# growth per ln N, and the polar envelope with its offset
series = MuSeries([MuRow(s * s, mu_upa_uniform_closed(s, s, 0.5, 0.5), "exact-series")
                   for s in range(10, 101)])
for lo, hi in ((1e2, 1e3), (1e3, 1e4)):
    print(f"slope over [{lo:.0e}, {hi:.0e}]: {fit_log_slope(series, lo, hi).slope:.4f}")
gap = series.mu - np.array([polar_bound(s, s, 0.5, 0.5) for s in range(10, 101)])
print(f"mu - envelope runs from {gap[0]:.3f} down to {gap[-1]:.3f}")

# a concentrated azimuth with a 60 degree zenith band
az, el = VonMises(0.0, 1.49), Uniform(np.radians(60), np.radians(120))
print("von Mises / band, 8x8:", round(mu_upa(az, el, 8, 8, 0.5, 0.5), 4))
