"""
Outage rate regions of a two-user fading broadcast channel
==========================================================

Each user accepts an outage probability, which turns its fading into a
fixed effective gain. Superposition with dirty-paper coding then contains
the time-division region, strictly so when the effective gains differ.
"""

import dpcfading as dp

cfg = dp.BroadcastConfig(snr=10.0, users=((dp.Rayleigh(), 0.5), (dp.Rayleigh(), 0.1)))
print("effective gains:", dp.effective_gains(cfg))

td = dp.td_region(cfg)
dpc = dp.dpc_region(cfg)
print(f"{len(td)} time-division and {len(dpc)} dirty-paper boundary points")

res = dp.verify_dominance(cfg, td)
print(f"contained: {res.dominated}, strict witness {res.witness_strict}, excess {res.excess:.4f} nats")

# The same regions come from an unfaded channel with the effective gains.
same = dp.dpc_region(dp.unfaded_config(cfg))
print("unfaded equivalent matches:", bool(abs(same.rates - dpc.rates).max() < 1e-12))

# Three users on a coarse simplex grid.
three = dp.BroadcastConfig(10.0, ((dp.Nakagami(4), 0.1), (dp.Rician(2), 0.1), (dp.Rayleigh(), 0.1)))
print(f"three users: {len(dp.dpc_region(three, 30))} boundary points")
