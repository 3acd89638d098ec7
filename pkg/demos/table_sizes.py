"""
Routing state versus forwarding state
=====================================

Runs the bundled 153-router network under both forwarding schemes at a few
request rates and prints how large each table gets. The anchor tables stay
put as load grows while the NDN pending-interest table keeps climbing.

Takes about two minutes on one core.
"""

from ccnramp import bundled
from ccnramp.expcli import build_scenario
from ccnramp.simcore.sim import run

topo, anchors, settings = bundled.topology(), bundled.anchors(), bundled.scenario_settings()

# short runs; the first half is warmup
rates = [100, 500, 1000]
print(f"{'rate':>6} {'PRT':>8} {'FAB':>6} {'LSAT':>6} {'PIT':>7}")
for rate in rates:
    kw = dict(rate=rate, horizon=1.0, warmup=0.5)
    ramp = run(build_scenario(topo, anchors, settings, mode="ramp", **kw)).metrics
    ndn = run(build_scenario(topo, anchors, settings, mode="ndn", **kw)).metrics
    print(f"{rate:>6} {ramp.mean_table('prt'):>8.0f} {ramp.mean_table('fab'):>6.2f} "
          f"{ramp.mean_table('lsat'):>6.1f} {ndn.mean_table('pit'):>7.1f}")

# PRT holds every prefix and FAB one entry per anchor, whatever the load.
# LSAT entries are per (neighbor, anchor) flow and get reused, so they
# saturate; a PIT entry lives for one round trip per outstanding name.
