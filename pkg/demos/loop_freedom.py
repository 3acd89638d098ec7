"""
Forwarding on inconsistent routes
=================================

Scrambles the distance tables of random 30-router networks and checks every
forwarded Interest against the audit: distances must strictly shrink and no
Interest may visit a router twice. Loops that the tables would have caused
come back to the consumer as loop-coded errors instead.
"""

from ccnramp.simcore.fuzz import fuzz_loop_freedom, summarize

for severity in (0.0, 0.1, 0.5, 1.0):
    outcomes = fuzz_loop_freedom(20, (severity,), base_seed=7)
    t = summarize(outcomes)
    print(f"severity {severity:.1f}: {t['interests']:5d} interests, "
          f"{t['revisits']} revisits, {t['distance_violations']} distance violations, "
          f"{t['loop_errors']:5d} loop errors")
