"""
Logarithmic growth of the interference kernel
==============================================

mu_ULA measures how much two rays overlap on average. It grows like
m_slope * ln N, with m_slope set by the angular density at end-fire.
Mean interference is mu / alpha, so it never settles at the i.i.d.
Rayleigh value 1 / alpha.
"""

import numpy as np

from raymimo.angular import RNGStream, Uniform, VonMises
from raymimo.asymptotics import expected_eta, fit_log_slope, m_slope, mu_ula_series
from raymimo.metrics import rayleigh_baseline

ns = sorted({int(round(x)) for x in np.logspace(1, 5, 41)})
models = {"uniform": Uniform(), "von Mises k=4.23": VonMises(0.0, 4.23),
          "von Mises k=1.49, 30 deg": VonMises(np.radians(30), 1.49)}

for label, model in models.items():
    series = mu_ula_series(model, 0.5, ns)
    fit = fit_log_slope(series, 1e3, 1e5)
    print(f"{label:26s} mu(1e5) = {series.mu[-1]:6.3f}   fitted slope {fit.slope:.4f}"
          f"   predicted {m_slope(model, 0.5):.4f}")

# mean interference at alpha = 2 next to the Rayleigh baseline
alpha = 2.0
uniform = mu_ula_series(Uniform(), 0.5, [64, 256, 1024, 4096])
for row in uniform:
    ray = rayleigh_baseline(row.N, int(row.N / alpha), 500, RNGStream(1, row.N)).rows[0]
    print(f"N={row.N:5d}  E[eta] uniform rays {expected_eta(1, 1, alpha, row.mu):.3f}"
          f"   Rayleigh {ray.mean:.3f}")
