"""Command-line front end.

    ccnramp run --topology bundled --anchors bundled --scenario bundled --mode both --rate 100 --out out/
    ccnramp verify paths --topology bundled --anchors bundled
    ccnramp verify loops --runs 100
    ccnramp verify multihoming

``bundled`` in place of a path selects the packaged synthetic 153-router
network. Exit codes: 0 success, 1 usage error, 2 runtime error or a failed
verification.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import fields
from pathlib import Path

from . import bundled
from .control_plane import (AnchorAssignment, InvalidScenario, Link, Topology, TopologyError, hop_cost,
                            load_anchors, load_topology, multihoming_advantage,
                            verify_path_equivalence)
from .names import MalformedName, Name
from .simcore.fuzz import fuzz_loop_freedom, summarize
from .simcore.metrics import write_csvs
from .simcore.scenario import MODES, ConfigInvalid, Scenario
from .simcore.sim import run

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2

BUNDLED = "bundled"

# JSON scenario keys that map onto Scenario fields
_SETTABLE = {f.name for f in fields(Scenario)} - {"topology", "anchors", "mode", "trace"}


class UsageError(Exception):
    pass


def _load_topology(arg: str) -> Topology:
    return bundled.topology() if arg == BUNDLED else load_topology(arg)


def _load_anchors(arg: str) -> AnchorAssignment:
    return bundled.anchors() if arg == BUNDLED else load_anchors(arg)


def _load_settings(arg) -> dict:
    if arg is None:
        return {}
    if arg == BUNDLED:
        return bundled.scenario_settings()
    with open(arg, encoding="utf-8") as fh:
        settings = json.load(fh)
    if not isinstance(settings, dict):
        raise UsageError(f"{arg}: expected a JSON object")
    return settings


def build_scenario(topo: Topology, anchors: AnchorAssignment, settings: dict, **overrides) -> Scenario:
    """Scenario from file settings; ``overrides`` (flag values, None = unset) win."""
    unknown = sorted(set(settings) - _SETTABLE)
    if unknown:
        raise UsageError(f"unknown scenario settings: {', '.join(unknown)}")
    merged = dict(settings)
    merged.update({k: v for k, v in overrides.items() if v is not None})
    if "consumers" in merged:
        merged["consumers"] = tuple(int(c) for c in merged["consumers"])
    else:
        merged["consumers"] = tuple(sorted(set(topo.routers) - set(anchors.anchors)))
    if "failures" in merged:
        merged["failures"] = tuple(tuple(f) for f in merged["failures"])
    if merged.get("inconsistency") is not None:
        merged["inconsistency"] = tuple(merged["inconsistency"])
    scenario = Scenario(topo, anchors, **merged)
    scenario.validate()
    return scenario


def _run_one(scenario: Scenario):
    result = run(scenario)
    return result.metrics, result.trace


def _parse_rates(args) -> list:
    if args.sweep:
        try:
            return [float(x) for x in args.sweep.split(",") if x.strip()]
        except ValueError:
            raise UsageError(f"--sweep expects comma-separated numbers, got {args.sweep!r}")
    return [args.rate]


def cmd_run(args) -> int:
    topo = _load_topology(args.topology)
    anchors = _load_anchors(args.anchors)
    settings = _load_settings(args.scenario)
    modes = list(MODES) if args.mode == "both" else [args.mode]
    scenarios = []
    for rate in _parse_rates(args):
        for mode in modes:
            scenarios.append(build_scenario(topo, anchors, settings, mode=mode, rate=rate,
                                            cache=args.cache, seed=args.seed, horizon=args.horizon,
                                            warmup=args.warmup, trace=args.trace))
    if args.jobs > 1 and len(scenarios) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            outputs = list(pool.map(_run_one, scenarios))
    else:
        outputs = [_run_one(s) for s in scenarios]

    out = Path(args.out)
    records = [m for m, _ in outputs]
    for path in write_csvs(records, out):
        print(f"wrote {path}")
    if args.trace:
        for (m, trace) in outputs:
            (out / f"trace_{m.mode}_{m.rate:g}.txt").write_text(
                "".join(line + "\n" for line in trace), encoding="utf-8")
    for m in sorted(records, key=lambda r: (r.rate, r.mode)):
        _print_summary(m)
    return EXIT_OK


def _print_summary(m) -> None:
    tag = f"{m.mode} rate={m.rate:g}"
    s = m.summary()
    tables = " ".join(f"{k[5:]}={s[k]:.2f}" for k in s if k.startswith("mean_") and k not in
                      ("mean_delay_s", "mean_hops"))
    lookups = " ".join(f"{k[:-8]}={v:.3f}" for k, v in s.items() if k.endswith("_lookups"))
    print(f"[{tag}] table sizes: {tables}")
    print(f"[{tag}] lookups per retrieval: {lookups}")
    print(f"[{tag}] delay: mean={s['mean_delay_s'] * 1000:.2f} ms over {m.retrievals} retrievals "
          f"({m.failed} failed), mean hops={s['mean_hops']:.2f}")
    print(f"[{tag}] interests forwarded per router: {s['interests_per_router']:.1f}")


def cmd_verify_paths(args) -> int:
    topo = _load_topology(args.topology)
    anchors = _load_anchors(args.anchors)
    report = verify_path_equivalence(topo, anchors, hop_cost)
    print(f"checked {report.checked} (origin, prefix) pairs, "
          f"{report.single_anchor_checked} single-anchor; divergences: {len(report.divergences)}, "
          f"length mismatches: {len(report.length_mismatches)}")
    for d in report.divergences[:10]:
        print(f"  divergence: {d}")
    return EXIT_OK if report.ok else EXIT_RUNTIME


def cmd_verify_loops(args) -> int:
    try:
        severities = [float(x) for x in args.severities.split(",")]
    except ValueError:
        raise UsageError(f"--severities expects comma-separated numbers, got {args.severities!r}")
    if any(not 0 <= s <= 1 for s in severities):
        raise UsageError("severities must lie in [0, 1]")
    outcomes = fuzz_loop_freedom(args.runs, severities, args.seed)
    totals = summarize(outcomes)
    traversals = totals["distance_violations"] + totals["revisits"]
    print(f"{totals['runs']} runs, {totals['interests']} interests, {totals['hops']} hops")
    print(f"loop traversals: {traversals} (distance violations {totals['distance_violations']}, "
          f"revisits {totals['revisits']})")
    print(f"loop-coded error messages: {totals['loop_errors']}")
    print(f"reverse-path mismatches: {totals['reverse_mismatches']}, "
          f"unaccounted interests: {totals['unaccounted']}")
    bad = traversals + totals["reverse_mismatches"] + totals["unaccounted"]
    return EXIT_OK if bad == 0 else EXIT_RUNTIME


def multihoming_cases():
    """Scripted cases around a prefix homed at anchors 4 and 6.

    Origin 1 binds to anchor 4 through relay 2 and router 3; anchor 6 hangs
    off the relay through router 5. Failing link 2-3 either leaves a detour
    7-8-9 to anchor 4 or, in the bare variant, no path at all.
    """
    prefix = Name(("multi", "homed"))
    base = [(1, 2), (2, 3), (3, 4), (2, 5), (5, 6)]
    detour = [(2, 7), (7, 8), (8, 9), (9, 4)]

    def net(links):
        topo = Topology()
        for u, v in links:
            topo.add_link(Link(u, v))
        assignment = AnchorAssignment()
        assignment.announce(4, [prefix])
        assignment.announce(6, [prefix])
        return topo, assignment

    cases = []
    for label, links, failed in (("detour, link 2-3 down", base + detour, (2, 3)),
                                 ("no detour, link 2-3 down", base, (2, 3)),
                                 ("intact", base + detour, None)):
        topo, assignment = net(links)
        cases.append((label, topo, assignment, dict(failed_link=failed, origin=1, relay=2,
                                                    bound_anchor=4, prefix=prefix)))
    return cases


def cmd_verify_multihoming(args) -> int:
    for label, topo, assignment, kw in multihoming_cases():
        v = multihoming_advantage(topo, assignment, hop_cost, **kw)
        print(f"{label}: condition={v.condition or 'none'} alternate={v.alternate_anchor} "
              f"D*={v.d_star_relay_bound:g} D(relay,alt)={v.d_relay_alternate:g} "
              f"D(relay,origin)={v.d_relay_origin:g} D(origin,alt)={v.d_origin_alternate:g}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ccnramp", description="Anchor-based label-swapping "
                                "forwarding versus a PIT/FIB baseline.")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="simulate and write metric CSVs")
    r.add_argument("--topology", required=True, help="topology file or 'bundled'")
    r.add_argument("--anchors", required=True, help="anchor file or 'bundled'")
    r.add_argument("--scenario", help="JSON settings file or 'bundled'")
    r.add_argument("--mode", choices=("ramp", "ndn", "both"), default="both")
    r.add_argument("--rate", type=float, default=None, help="Interests/s per consumer router")
    r.add_argument("--sweep", help="comma-separated rates, e.g. 100,500,1000,2000")
    r.add_argument("--cache", help="none or lru:N")
    r.add_argument("--seed", type=int)
    r.add_argument("--horizon", type=float, help="simulated seconds")
    r.add_argument("--warmup", type=float, help="seconds excluded from metrics")
    r.add_argument("--trace", action="store_true", help="also write per-run packet traces")
    r.add_argument("--jobs", type=int, default=1, help="parallel runs")
    r.add_argument("--out", required=True, help="output directory")
    r.set_defaults(func=cmd_run)

    v = sub.add_parser("verify", help="analyzers")
    vsub = v.add_subparsers(dest="check", required=True)
    vp = vsub.add_parser("paths", help="prefix routing versus anchor routing paths")
    vp.add_argument("--topology", required=True)
    vp.add_argument("--anchors", required=True)
    vp.set_defaults(func=cmd_verify_paths)
    vl = vsub.add_parser("loops", help="loop-freedom fuzz under corrupted FABs")
    vl.add_argument("--runs", type=int, default=100)
    vl.add_argument("--severities", default="0.1,0.5,1.0")
    vl.add_argument("--seed", type=int, default=0)
    vl.set_defaults(func=cmd_verify_loops)
    vm = vsub.add_parser("multihoming", help="multihoming advantage verdicts")
    vm.set_defaults(func=cmd_verify_multihoming)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return args.func(args)
    except (UsageError, ConfigInvalid) as exc:
        print(f"ccnramp: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, TopologyError, InvalidScenario, MalformedName, ValueError) as exc:
        print(f"ccnramp: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
