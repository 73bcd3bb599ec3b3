"""
Channel hardening with random-phase and complex-Gaussian ray gains
===================================================================

A user's channel is a sum of a few hundred rays. With random-phase gains
the normalized power h^H h / N settles at the link gain as the array grows;
with complex-Gaussian gains it keeps a random limit sum |gamma_r|^2.
"""

import numpy as np

from raymimo.angular import RNGStream
from raymimo.array import ULA, generate_channel
from raymimo.experiments.config import parse_angular
from raymimo.experiments.figures import THREE_GPP_ULA, build_spec
from raymimo.metrics import ch_statistic

# 20 clusters of 20 subrays, angles in degrees as in a config file
azimuth = parse_angular(THREE_GPP_ULA)

for model in ("random_phase", "complex_gaussian"):
    spec = build_spec(azimuth, model)
    print(model)
    for n in (16, 64, 256, 1024):
        stream = RNGStream(0, n)
        s = np.array([ch_statistic(generate_channel(spec, ULA(n, 0.5), stream.child(t)))
                      for t in range(300)])
        print(f"  N={n:5d}  mean {s.mean():.3f}  variance {s.var(ddof=1):.5f}")

# the complex-Gaussian variance cannot fall below sum beta_r^2 = 1/400
print("complex-Gaussian floor:", 1 / 400)
