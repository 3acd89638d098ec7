import numpy as np
import pytest

from ccnramp.control_plane import AnchorAssignment, Link, Topology, build_ndn_fibs
from ccnramp.names import PrefixTrie, parse_name
from ccnramp.ndn_router import NdnData, NdnInterest, NdnRouter
from ccnramp.ramp_router import CONTENT, Local
from ccnramp.simcore.scenario import Scenario
from ccnramp.simcore.sim import run

Q = parse_name("/Q")
OBJ = parse_name("/Q/song")


def line(n, links=None):
    topo = Topology()
    for k in range(n - 1):
        topo.add_link(Link(k, k + 1) if links is None else links(k))
    assignment = AnchorAssignment()
    assignment.announce(n - 1, [Q])
    return topo, assignment


def routers(topo, assignment, **kw):
    fibs = build_ndn_fibs(topo, assignment)
    anchor = assignment.anchors_of(Q)[0]
    return {i: NdnRouter(i, fibs[i], PrefixTrie([Q]) if i == anchor else None, **kw)
            for i in topo.routers}


def deliver(nodes, start, sender, pkt, now=0.0):
    """Run handlers to quiescence; returns packets that left the network."""
    pending = [(start, sender, pkt)]
    out = []
    while pending:
        node, frm, p = pending.pop(0)
        handler = nodes[node].on_interest if isinstance(p, NdnInterest) else nodes[node].on_data
        for dest, q in handler(frm, p, now):
            if isinstance(dest, Local):
                out.append((dest, q))
            else:
                pending.append((dest, node, q))
    return out


def test_aggregation():
    # two downstreams 0 and 2 both reach the anchor 3 through router 1
    topo = Topology()
    for u, v in [(0, 1), (2, 1), (1, 3)]:
        topo.add_link(Link(u, v))
    assignment = AnchorAssignment()
    assignment.announce(3, [Q])
    r1 = routers(topo, assignment)[1]
    assert r1.on_interest(0, NdnInterest(OBJ, 11)) == [(3, NdnInterest(OBJ, 11))]
    assert r1.on_interest(2, NdnInterest(OBJ, 22)) == []
    assert len(r1.pit) == 1
    fanout = r1.on_data(3, NdnData(OBJ))
    assert sorted(d for d, _ in fanout) == [0, 2]
    assert r1.pit == {}


def test_duplicate_nonce_dropped():
    topo, assignment = line(3)
    r1 = routers(topo, assignment)[1]
    r1.on_interest(0, NdnInterest(OBJ, 5))
    assert r1.on_interest(2, NdnInterest(OBJ, 5)) == []
    assert r1.drops[-1][0] == "duplicate-nonce"
    assert r1.pit[OBJ].downstreams == {0: -1}


def test_unmatched_data_dropped():
    topo, assignment = line(3)
    r1 = routers(topo, assignment)[1]
    assert r1.on_data(2, NdnData(OBJ)) == []
    assert r1.drops[-1][0] == "unsolicited"


def test_no_fib_match_dropped():
    topo, assignment = line(3)
    r0 = routers(topo, assignment)[0]
    assert r0.on_interest(Local(1), NdnInterest(parse_name("/elsewhere/x"), 1)) == []
    assert r0.drops[-1][0] == "no-route"


@pytest.mark.parametrize("hops", [1, 3, 6])
def test_lookups_on_a_line(hops):
    topo, assignment = line(hops + 1)
    nodes = routers(topo, assignment)
    out = deliver(nodes, 0, Local(1), NdnInterest(OBJ, 9))
    assert out == [(Local(1), NdnData(OBJ, CONTENT))]
    # the anchor answers from its own content, so H routers do PIT and FIB work
    fib = sum(n.lookups["fib"] for n in nodes.values())
    pit = sum(n.lookups["pit"] for n in nodes.values())
    assert fib == hops
    assert pit == 2 * hops


def test_cache_answers_second_request():
    topo, assignment = line(4)
    nodes = routers(topo, assignment, cs_capacity=10)
    deliver(nodes, 0, Local(1), NdnInterest(OBJ, 1))
    before = sum(n.lookups["fib"] for n in nodes.values())
    assert deliver(nodes, 0, Local(2), NdnInterest(OBJ, 2)) == [(Local(2), NdnData(OBJ, CONTENT))]
    assert sum(n.lookups["fib"] for n in nodes.values()) == before


def test_pit_expiry_boundary():
    topo, assignment = line(3)
    r1 = routers(topo, assignment, pit_lifetime=2.0)[1]
    r1.on_interest(0, NdnInterest(OBJ, 1), now=10.0)
    assert r1.expire_pit(12.0 - 1e-9) == 0
    assert OBJ in r1.pit
    assert r1.expire_pit(12.0 + 1e-9) == 1
    assert r1.pit == {}


def test_expired_entry_not_aggregated():
    topo, assignment = line(3)
    r1 = routers(topo, assignment, pit_lifetime=2.0)[1]
    r1.on_interest(0, NdnInterest(OBJ, 1), now=0.0)
    assert r1.on_interest(0, NdnInterest(OBJ, 2), now=2.5) == [(2, NdnInterest(OBJ, 2))]


def test_pit_size_matches_md_infinity():
    """Poisson arrivals, fixed residence: mean occupancy is rate x round trip."""
    delay_ms, rate = 30.0, 1000.0
    topo, assignment = line(2, lambda k: Link(k, k + 1, delay_ms=delay_ms, rate_bps=10e9))
    s = Scenario(topo, assignment, consumers=(0,), mode="ndn", rate=rate, zipf_alpha=0.0,
                 catalog=100_000, cos_per_prefix=100_000, seed=4, horizon=12.0, warmup=2.0,
                 sample_interval=0.01)
    m = run(s).metrics
    rtt = 2 * delay_ms / 1000 + (64 + 1064) * 8 / 10e9
    expected = rate * rtt
    pit = m.table_means["pit"][m.routers.index(0)]
    assert abs(pit - expected) / expected < 0.10
    # a few requests join a pending entry or queue behind another packet
    assert np.median(m.delays) == pytest.approx(rtt)
    assert np.isclose(m.delays, rtt).mean() > 0.99
