"""The bundled desk-scale scenario.

The topology is synthetic: a seeded random graph with the node and link
counts of the AT&T backbone (153 routers, 184 links, 30 ms, 10 Gbps) but not
its actual structure. Twenty routers anchor 500 single-homed prefixes each,
and 70 other routers host consumers.
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

import numpy as np

from .control_plane import (AnchorAssignment, Topology, generate_anchors, generate_topology,
                            load_anchors, load_topology)

N_ROUTERS = 153
N_LINKS = 184
N_ANCHORS = 20
PREFIXES_PER_ANCHOR = 500
N_CONSUMERS = 70
TOPOLOGY_SEED = 3
ANCHOR_SEED = 11
CONSUMER_SEED = 17

TOPOLOGY_FILE = "att153_synthetic.topo"
ANCHORS_FILE = "att153_synthetic.anchors"
SCENARIO_FILE = "att153_synthetic.json"


def data_path(filename: str) -> Path:
    return Path(str(resources.files("ccnramp") / "data" / filename))


def topology() -> Topology:
    return load_topology(data_path(TOPOLOGY_FILE))


def anchors() -> AnchorAssignment:
    return load_anchors(data_path(ANCHORS_FILE))


def scenario_settings() -> dict:
    return json.loads(data_path(SCENARIO_FILE).read_text(encoding="utf-8"))


def consumers() -> list[int]:
    return list(scenario_settings()["consumers"])


def generate(out_dir) -> None:
    """Regenerate the bundled files; the output is a pure function of the seeds."""
    out = Path(out_dir)
    topo = generate_topology(N_ROUTERS, N_LINKS, TOPOLOGY_SEED)
    assignment = generate_anchors(topo, N_ANCHORS, PREFIXES_PER_ANCHOR, ANCHOR_SEED)
    rng = np.random.default_rng(CONSUMER_SEED)
    pool = sorted(set(topo.routers) - set(assignment.anchors))
    chosen = sorted(int(x) for x in rng.choice(pool, size=N_CONSUMERS, replace=False))
    header = (f"# synthetic stand-in for the AT&T backbone: {N_ROUTERS} routers, {N_LINKS} links\n"
              f"# generated by ccnramp.bundled.generate (seed {TOPOLOGY_SEED})\n")
    (out / TOPOLOGY_FILE).write_text(header + topo.dumps(), encoding="utf-8")
    (out / ANCHORS_FILE).write_text(
        f"# {N_ANCHORS} anchors x {PREFIXES_PER_ANCHOR} prefixes (seed {ANCHOR_SEED})\n"
        + assignment.dumps(), encoding="utf-8")
    settings = {
        "consumers": chosen,
        "zipf_alpha": 0.7,
        "catalog": 100_000,
        "cos_per_prefix": 10,
        "rate": 100,
        "cache": "none",
        "horizon": 30.0,
        "sample_interval": 0.1,
        "rto": 1.0,
        "max_retx": 3,
        "pit_lifetime": 2.0,
    }
    (out / SCENARIO_FILE).write_text(json.dumps(settings, indent=2) + "\n", encoding="utf-8")
