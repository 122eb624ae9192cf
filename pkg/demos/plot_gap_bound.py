"""
How much does average-SNR precoding lose under fading?
======================================================

The encoder knows the interference but not the fading gain, so it picks
the inflation factor for the average SNR. The loss against a decoder that
also knows the interference is bounded by the large-interference limit,
which peaks near 0 dB.
"""

import numpy as np

import dpcfading as dp

snr_db = np.arange(-20.0, 30.0 + 1e-9, 0.25)
snr = 10 ** (snr_db / 10)

# Rayleigh first: the bound stays below half a nat everywhere.
best = dp.gap_bound_max(dp.Rayleigh(), snr)
print(f"Rayleigh: max bound {best.max_value:.4f} nats at {10 * np.log10(best.argmax_snr):.2f} dB")

# Less severe fading (larger m) shrinks the bound.
for m in (0.5, 1, 2, 4, 8):
    res = dp.gap_bound_max(dp.Nakagami(m), snr)
    print(f"Nakagami m={m:<4g} max bound {res.max_value:.4f}")

# A line-of-sight component helps too; K = 0 is Rayleigh again.
for k in (0, 1, 2, 5, 10):
    res = dp.gap_bound_max(dp.Rician(k), snr)
    print(f"Rician K={k:<3g} max bound {res.max_value:.4f}")

# The actual gap at finite interference sits under the bound.
cfg = dp.ChannelConfig(1.0, 1.0)
print(f"rho=0 dB, beta=1: gap {dp.gap(cfg, dp.Rayleigh()):.4f} <= bound {dp.gap_bound(1.0, dp.Rayleigh()):.4f}")
