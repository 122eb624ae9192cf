"""
Low- and high-SNR behaviour of the ergodic rate
===============================================

At high SNR the rate approaches ``log(rho) + E[log A]`` with a ``1/rho``
correction that needs ``E[1/A] < inf``. At low SNR it starts as ``rho``
with a quadratic term driven by ``E[A^2]``.
"""

import math

import dpcfading as dp

model = dp.Nakagami(2)
for beta in (0.0, 1.0):
    hi = dp.expand_high_snr(dp.ChannelConfig(1.0, beta), model)
    lo = dp.expand_low_snr(dp.ChannelConfig(1.0, beta), model)
    print(f"beta={beta}: 1/rho coefficient {hi.rate_coeff:.4f}, rho^2 coefficient {lo.quadratic_coeff_R:.4f}")
    for rho in (1e-3, 5e-4):
        r = dp.rate_dpc(dp.ChannelConfig(rho, beta), model)
        print(f"  rho={rho:g}: (R - rho)/rho^2 = {(r - rho) / rho**2:.4f}")
    rho = 1e4
    r = dp.rate_dpc(dp.ChannelConfig(rho, beta), model)
    print(f"  rho=1e4: rho (R - log rho - E[log A]) = {rho * (r - math.log(rho) - hi.constant_term):.4f}")

# Rayleigh has E[1/A] = inf, so only the vanishing gap can be checked.
print(dp.expand_high_snr(dp.ChannelConfig(1.0, 1.0), dp.Rayleigh()))
for rho in (1e2, 1e3, 1e4):
    print(f"Rayleigh bound at rho={rho:g}: {dp.gap_bound(rho, dp.Rayleigh()):.5f}")
