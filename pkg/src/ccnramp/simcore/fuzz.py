"""Loop-freedom fuzzing: random graphs, corrupted FABs, audited traces."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from ..control_plane import generate_anchors, generate_topology
from .audit import (ConservationAudit, LoopAudit, ReversePathAudit, audit_conservation,
                    audit_interest_paths, audit_reverse_paths)
from .scenario import Scenario
from .sim import run


@dataclass
class FuzzOutcome:
    seed: int
    severity: float
    loops: LoopAudit
    conservation: ConservationAudit
    reverse: ReversePathAudit

    @property
    def ok(self) -> bool:
        return self.loops.ok and self.conservation.ok and self.reverse.ok


def fuzz_scenario(seed: int, severity: float, n_routers: int = 30, horizon: float = 1.0) -> Scenario:
    """A random small network with a random workload, FABs corrupted at ``severity``."""
    rng = np.random.default_rng([seed, 7919])
    n_links = n_routers + int(rng.integers(0, n_routers))
    topo = generate_topology(n_routers, n_links, seed)
    anchors = generate_anchors(topo, int(rng.integers(2, 6)), int(rng.integers(2, 8)), seed)
    pool = sorted(set(topo.routers) - set(anchors.anchors))
    n_consumers = int(rng.integers(3, min(12, len(pool)) + 1))
    consumers = tuple(sorted(int(x) for x in rng.choice(pool, size=n_consumers, replace=False)))
    catalog = len(anchors.prefixes) * 10
    return Scenario(topo, anchors, consumers, rate=float(rng.integers(5, 40)), catalog=catalog,
                    cos_per_prefix=10, seed=seed, horizon=horizon, warmup=0.0,
                    inconsistency=(severity, seed), trace=True)


def fuzz_once(seed: int, severity: float, n_routers: int = 30) -> FuzzOutcome:
    result = run(fuzz_scenario(seed, severity, n_routers))
    return FuzzOutcome(seed, severity, audit_interest_paths(result.trace),
                       audit_conservation(result), audit_reverse_paths(result.trace))


def fuzz_loop_freedom(runs: int, severities: Sequence[float] = (0.1, 0.5, 1.0),
                      base_seed: int = 0, n_routers: int = 30) -> list[FuzzOutcome]:
    """``runs`` fuzz runs cycling through ``severities``."""
    return [fuzz_once(base_seed + k, severities[k % len(severities)], n_routers)
            for k in range(runs)]


def summarize(outcomes: Iterable[FuzzOutcome]) -> dict:
    outcomes = list(outcomes)
    return {
        "runs": len(outcomes),
        "interests": sum(o.loops.interests for o in outcomes),
        "hops": sum(o.loops.hops for o in outcomes),
        "distance_violations": sum(len(o.loops.distance_violations) for o in outcomes),
        "revisits": sum(len(o.loops.revisits) for o in outcomes),
        "loop_errors": sum(o.loops.loop_errors for o in outcomes),
        "reverse_mismatches": sum(len(o.reverse.mismatches) for o in outcomes),
        "unaccounted": sum(len(o.conservation.unaccounted) + len(o.conservation.duplicated)
                           for o in outcomes),
    }
