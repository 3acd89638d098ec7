"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

The simulation criteria run on the bundled 153-router network with a 1.5 s
horizon and 0.75 s warmup per run, short enough that the whole rate sweep
fits in a few minutes on one CPU. Run with ``pytest tests/test_acceptance.py -s``
to see the lines as they are produced; they are also repeated at the end of
the session.
"""

import subprocess
import sys
from pathlib import Path

import networkx as nx
import numpy as np
import pytest

from ccnramp import bundled
from ccnramp.control_plane import fab_route, compute_routes, hop_cost, verify_path_equivalence
from ccnramp.expcli import build_scenario, main
from ccnramp.simcore.fuzz import fuzz_loop_freedom, summarize
from ccnramp.simcore.metrics import write_csvs
from ccnramp.simcore.sim import run

pytestmark = pytest.mark.slow

RATES = (100, 500, 1000, 2000)
PARITY_RATE = 100
PARITY_SEEDS = (0, 1, 2)
HORIZON, WARMUP = 1.5, 0.75
TESTS = Path(__file__).parent


@pytest.fixture(scope="module")
def network():
    return bundled.topology(), bundled.anchors(), bundled.scenario_settings()


def path_hops(result, topo, assignment):
    """Shortest-path hop count from each retrieval's origin to its content's anchor."""
    g = nx.Graph([(l.u, l.v) for l in topo.links.values()])
    trie = assignment.prefix_trie()
    dist = {a: nx.single_source_shortest_path_length(g, a) for a in assignment.anchors}
    warmup = result.simulator.s.effective_warmup
    hops = []
    for req in result.requests:
        if req.issued >= warmup and req.outcome == "data":
            (anchor,) = assignment.anchors_of(trie.longest_match(req.name))
            hops.append(dist[anchor][req.router])
    return np.array(hops, dtype=float)


@pytest.fixture(scope="module")
def sweep(network):
    """(mode, rate, seed) -> (metrics, oracle path hops); no caching."""
    topo, assignment, settings = network
    runs = {}
    jobs = [(mode, rate, 0) for rate in RATES for mode in ("ramp", "ndn")]
    jobs += [(mode, PARITY_RATE, seed) for seed in PARITY_SEEDS[1:] for mode in ("ramp", "ndn")]
    for mode, rate, seed in jobs:
        s = build_scenario(topo, assignment, settings, mode=mode, rate=rate, seed=seed,
                           horizon=HORIZON, warmup=WARMUP, cache="none")
        result = run(s)
        hops = path_hops(result, topo, assignment) if mode == "ndn" else None
        runs[(mode, rate, seed)] = (result.metrics, hops)
    return runs


def test_criterion_1_path_equivalence(network, record_criterion):
    topo, assignment, _ = network
    report = verify_path_equivalence(topo, assignment, hop_cost)
    # independent check that the anchor routes are shortest paths
    g = nx.Graph([(l.u, l.v) for l in topo.links.values()])
    rt = compute_routes(topo, assignment)
    not_shortest = 0
    for a in assignment.anchors:
        lengths = nx.single_source_shortest_path_length(g, a)
        for o in topo.routers:
            not_shortest += len(fab_route(rt, o, a)) - 1 != lengths[o]
    ok = report.single_anchor_checked == 153 * 10_000 and not report.divergences and not_shortest == 0
    assert record_criterion(
        1, "path equivalence", ok,
        f"{report.single_anchor_checked} (origin, single-anchor prefix) pairs, "
        f"{len(report.divergences)} divergences, {not_shortest} non-shortest anchor routes")


def test_criterion_2_loop_freedom(record_criterion):
    outcomes = fuzz_loop_freedom(100, (0.1, 0.5, 1.0), base_seed=0, n_routers=30)
    t = summarize(outcomes)
    ok = t["runs"] == 100 and t["distance_violations"] == 0 and t["revisits"] == 0
    assert record_criterion(
        2, "loop freedom under inconsistency", ok,
        f"{t['runs']} runs, {t['interests']} interests over {t['hops']} hops, "
        f"{t['distance_violations']} distance violations, {t['revisits']} revisits, "
        f"{t['loop_errors']} loop-coded errors (permitted)")


def test_criterion_3_table_sizes(network, sweep, record_criterion):
    topo, assignment, _ = network
    anchors = set(assignment.anchors)
    prt_exact = fab_ok = True
    for rate in RATES:
        m, _ = sweep[("ramp", rate, 0)]
        prt_exact &= bool(np.all(m.table_means["prt"] == 10_000))
        for router, fab in zip(m.routers, m.table_means["fab"]):
            reachable = len(anchors - {router})
            fab_ok &= fab == reachable and fab <= 20
    lsat = [sweep[("ramp", r, 0)][0].mean_table("lsat") for r in RATES]
    pit = [sweep[("ndn", r, 0)][0].mean_table("pit") for r in RATES]
    lsat_spread = (max(lsat) - min(lsat)) / min(lsat)
    pit_growth = pit[-1] / pit[0]
    fab_mean = sweep[("ramp", RATES[0], 0)][0].mean_table("fab")
    ok = prt_exact and fab_ok and lsat_spread < 0.20 and pit_growth >= 5
    assert record_criterion(
        3, "table-size separation", ok,
        f"(a) PRT=10000 everywhere: {prt_exact}; (b) FAB = reachable anchors <= 20: {fab_ok} "
        f"(mean {fab_mean:.2f}); (c) LSAT means {', '.join(f'{x:.1f}' for x in lsat)}, "
        f"spread {lsat_spread:.1%} (< 20%); (d) PIT means {', '.join(f'{x:.1f}' for x in pit)}, "
        f"2000/100 = {pit_growth:.1f}x (>= 5x)")


def test_criterion_4_lookups(sweep, record_criterion):
    ok, parts = True, []
    for rate in RATES:
        ndn, oracle = sweep[("ndn", rate, 0)]
        ramp, _ = sweep[("ramp", rate, 0)]
        fib, hops = ndn.lookups_per_retrieval("fib"), ndn.mean_hops
        fab = ramp.lookups_per_retrieval("fab")
        prt_exact = bool(np.all(ramp.lookups["prt"] == 1))
        ok &= abs(fib - hops) <= 1 and fab < 0.5 and prt_exact
        parts.append(f"{rate}/s FIB {fib:.2f} vs Interest hops {hops:.2f} (shortest path "
                     f"{oracle.mean():.2f}), FAB {fab:.3f}, PRT=1 {prt_exact}")
    assert record_criterion(4, "lookup accounting", ok, "; ".join(parts))


def _gap(sweep, quantity, rate):
    seeds = PARITY_SEEDS if rate == PARITY_RATE else (0,)
    ramp = sum(quantity(sweep[("ramp", rate, seed)][0]) for seed in seeds)
    ndn = sum(quantity(sweep[("ndn", rate, seed)][0]) for seed in seeds)
    return ramp / ndn - 1


def _parity(number, title, sweep, quantity, record_criterion):
    gaps = {rate: _gap(sweep, quantity, rate) for rate in RATES}
    ok = all(abs(g) <= 0.05 for g in gaps.values())
    detail = "RAMP/NDN - 1 (within 5%): " + ", ".join(f"{r}/s {g:+.2%}" for r, g in gaps.items())
    detail += f"; {PARITY_RATE}/s pooled over seeds {PARITY_SEEDS}"
    return record_criterion(number, title, ok, detail)


def test_criterion_5_interest_parity(sweep, record_criterion):
    ok = _parity(5, "interest-count parity", sweep, lambda m: m.mean_interests_per_router,
                 record_criterion)
    assert ok


def test_criterion_6_delay_parity(sweep, record_criterion):
    ok = _parity(6, "delay parity", sweep, lambda m: m.mean_delay, record_criterion)
    assert ok


def test_criterion_7_protocol_units(record_criterion):
    files = ["test_names.py", "test_control_plane.py", "test_ramp_router.py",
             "test_ndn_router.py", "test_simcore.py"]
    proc = subprocess.run([sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider",
                           *[str(TESTS / f) for f in files]],
                          capture_output=True, text=True, cwd=TESTS.parent)
    summary = proc.stdout.strip().splitlines()[-1] if proc.stdout.strip() else proc.stderr[-200:]
    assert record_criterion(7, "protocol-unit suite", proc.returncode == 0, summary.strip("= "))


def test_criterion_8_determinism(network, tmp_path, record_criterion):
    topo, assignment, settings = network
    same = True
    for mode in ("ramp", "ndn"):
        s = build_scenario(topo, assignment, settings, mode=mode, rate=200, horizon=0.5, trace=True)
        a, b = run(s), run(s)
        same &= a.trace == b.trace
        write_csvs([a.metrics], tmp_path / mode / "a")
        write_csvs([b.metrics], tmp_path / mode / "b")
        for f in (tmp_path / mode / "a").iterdir():
            same &= f.read_bytes() == (tmp_path / mode / "b" / f.name).read_bytes()
    args = ["run", "--topology", "bundled", "--anchors", "bundled", "--scenario", "bundled",
            "--mode", "both", "--rate", "100", "--horizon", "0.4", "--seed", "5", "--trace"]
    codes = [main([*args, "--out", str(tmp_path / f"cli{k}")]) for k in (1, 2)]
    files = sorted(p.name for p in (tmp_path / "cli1").iterdir())
    for name in files:
        same &= (tmp_path / "cli1" / name).read_bytes() == (tmp_path / "cli2" / name).read_bytes()
    ok = same and codes == [0, 0]
    assert record_criterion(
        8, "determinism", ok,
        f"repeated runs (both modes, traces on) and repeated CLI invocations produced "
        f"byte-identical traces and {len(files)} output files: {same}")
