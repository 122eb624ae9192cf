"""
Outage over a block-fading channel
==================================

With one gain per block the rate is a random variable. Its CDF for a fixed
alpha lies above the interference-free reference and touches it at the
single rate ``-log(1 - alpha)``; choosing ``alpha = 1 - exp(-R)`` makes the
outage at rate R equal to the interference-free outage.
"""

import math

import numpy as np

import dpcfading as dp

cfg = dp.ChannelConfig(snr=10.0, ipr=1.0)
model = dp.Rayleigh()
grid = np.linspace(0, 4, 401)
reference = dp.rate_cdf(dp.ChannelConfig(10.0, 0.0), 0.0, model, grid)

for alpha in (0.3, 0.7):
    curve = dp.rate_cdf(cfg, alpha, model, grid)
    touch = -math.log(1 - alpha)
    live = (grid > 0) & (curve < 1)
    closest = grid[live][np.argmin((curve - reference)[live])]
    print(f"alpha={alpha}: curve meets the reference near r={closest:.2f} (predicted {touch:.4f})")

spec = dp.OutageSpec(target_rate=math.log(2))
alpha_star = dp.optimal_alpha_outage(spec)
for beta in (0.0, 1.0, 100.0):
    c = dp.ChannelConfig(10.0, beta)
    print(f"beta={beta:<5g} outage at alpha*={alpha_star}: {dp.outage_probability(c, alpha_star, spec, model):.6f}")
