"""Topology, centralized route computation and route analyzers.

A routing protocol is assumed to have converged; instead of simulating it,
routes to anchors (FAB + PRT) and routes to name prefixes (NDN FIB) are
computed directly from the topology with Dijkstra. Both planes share the same
equal-cost tie-break (lower router id first), so path comparisons between
them are exact.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Mapping, Optional, Sequence

import numpy as np

from .names import Name, PrefixTrie, parse_name

RouterId = int
INF = math.inf


class TopologyError(ValueError):
    pass


class InvalidScenario(ValueError):
    pass


@dataclass(frozen=True)
class Link:
    u: RouterId
    v: RouterId
    delay_ms: float = 30.0
    rate_bps: float = 10e9

    @property
    def key(self) -> frozenset:
        return frozenset((self.u, self.v))

    def other(self, node: RouterId) -> RouterId:
        return self.v if node == self.u else self.u


def hop_cost(link: Link) -> float:
    return 1


CostFn = Callable[[Link], float]


class Topology:
    """Undirected router graph with at most one link per router pair."""

    def __init__(self, routers: Iterable[RouterId] = (), links: Iterable[Link] = ()):
        self.routers: set[RouterId] = set(routers)
        self.links: dict[frozenset, Link] = {}
        self._adj: dict[RouterId, dict[RouterId, Link]] = {r: {} for r in self.routers}
        for link in links:
            self.add_link(link)

    def add_router(self, r: RouterId) -> None:
        self.routers.add(r)
        self._adj.setdefault(r, {})

    def add_link(self, link: Link) -> None:
        if link.u == link.v:
            raise TopologyError(f"self-link at router {link.u}")
        if link.key in self.links:
            raise TopologyError(f"duplicate link {link.u}-{link.v}")
        for r in (link.u, link.v):
            self.add_router(r)
        self.links[link.key] = link
        self._adj[link.u][link.v] = link
        self._adj[link.v][link.u] = link

    def link(self, u: RouterId, v: RouterId) -> Link:
        return self._adj[u][v]

    def has_link(self, u: RouterId, v: RouterId) -> bool:
        return v in self._adj.get(u, ())

    def neighbors(self, r: RouterId) -> list[RouterId]:
        return sorted(self._adj[r])

    def without_link(self, u: RouterId, v: RouterId) -> "Topology":
        key = frozenset((u, v))
        return Topology(self.routers, (l for k, l in self.links.items() if k != key))

    def is_connected(self) -> bool:
        if not self.routers:
            return True
        start = min(self.routers)
        seen = {start}
        stack = [start]
        while stack:
            for q in self._adj[stack.pop()]:
                if q not in seen:
                    seen.add(q)
                    stack.append(q)
        return len(seen) == len(self.routers)

    def __len__(self) -> int:
        return len(self.routers)

    def dumps(self) -> str:
        lines = [f"node {r}" for r in sorted(self.routers)]
        for link in sorted(self.links.values(), key=lambda l: (min(l.u, l.v), max(l.u, l.v))):
            lines.append(f"link {link.u} {link.v} {link.delay_ms:g} {link.rate_bps / 1e6:g}")
        return "\n".join(lines) + "\n"


def parse_topology(text: str) -> Topology:
    """Parse ``node <id>`` / ``link <u> <v> <delay_ms> <rate_mbps>`` records."""
    topo = Topology()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if parts[0] == "node" and len(parts) == 2:
                topo.add_router(int(parts[1]))
            elif parts[0] == "link" and len(parts) == 5:
                u, v = int(parts[1]), int(parts[2])
                topo.add_link(Link(u, v, float(parts[3]), float(parts[4]) * 1e6))
            else:
                raise TopologyError(f"unrecognized record {line!r}")
        except (ValueError, TopologyError) as exc:
            raise TopologyError(f"line {lineno}: {exc}") from None
    return topo


def load_topology(path) -> Topology:
    return parse_topology(Path(path).read_text(encoding="utf-8"))


class AnchorAssignment:
    """Which anchors announce which name prefixes."""

    def __init__(self, bindings: Mapping[RouterId, Iterable[Name]] = ()):
        self.bindings: dict[RouterId, tuple[Name, ...]] = {}
        self._anchors_of: dict[Name, tuple[RouterId, ...]] = {}
        for anchor, prefixes in dict(bindings).items():
            self.announce(anchor, prefixes)

    def announce(self, anchor: RouterId, prefixes: Iterable[Name]) -> None:
        current = list(self.bindings.get(anchor, ()))
        for p in prefixes:
            if p in current:
                raise TopologyError(f"anchor {anchor} announces {p} twice")
            current.append(p)
            self._anchors_of[p] = tuple(sorted(self._anchors_of.get(p, ()) + (anchor,)))
        self.bindings[anchor] = tuple(current)

    @property
    def anchors(self) -> list[RouterId]:
        return sorted(self.bindings)

    @property
    def prefixes(self) -> list[Name]:
        return sorted(self._anchors_of)

    def anchors_of(self, prefix: Name) -> tuple[RouterId, ...]:
        return self._anchors_of.get(prefix, ())

    def anchor_groups(self) -> dict[tuple[RouterId, ...], int]:
        """Number of prefixes announced by each distinct set of anchors."""
        groups: dict[tuple[RouterId, ...], int] = {}
        for anchors in self._anchors_of.values():
            groups[anchors] = groups.get(anchors, 0) + 1
        return groups

    def prefix_trie(self) -> PrefixTrie:
        return PrefixTrie(self._anchors_of)

    def dumps(self) -> str:
        return "".join(
            f"anchor {a} " + " ".join(str(p) for p in self.bindings[a]) + "\n" for a in self.anchors
        )


def parse_anchors(text: str) -> AnchorAssignment:
    assignment = AnchorAssignment()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] != "anchor" or len(parts) < 3:
            raise TopologyError(f"line {lineno}: expected 'anchor <router> <prefix>...'")
        try:
            assignment.announce(int(parts[1]), [parse_name(p) for p in parts[2:]])
        except ValueError as exc:
            raise TopologyError(f"line {lineno}: {exc}") from None
    return assignment


def load_anchors(path) -> AnchorAssignment:
    return parse_anchors(Path(path).read_text(encoding="utf-8"))


def shortest_distances(topo: Topology, sources: Iterable[RouterId],
                       cost: CostFn = hop_cost) -> dict[RouterId, float]:
    """Multi-source Dijkstra; unreachable routers are absent from the result."""
    dist: dict[RouterId, float] = {}
    heap = [(0, s) for s in sorted(set(sources)) if s in topo.routers]
    heapq.heapify(heap)
    while heap:
        d, u = heapq.heappop(heap)
        if u in dist:
            continue
        dist[u] = d
        for v, link in topo._adj[u].items():
            if v not in dist:
                heapq.heappush(heap, (d + cost(link), v))
    return dist


def _ranked_hops(topo: Topology, node: RouterId, dist: Mapping[RouterId, float],
                 cost: CostFn) -> tuple[tuple[RouterId, float], ...]:
    # admissible next hops are the neighbors strictly closer to the destination
    mine = dist[node]
    hops = [
        (cost(link) + dist[q], q)
        for q, link in topo._adj[node].items()
        if q in dist and dist[q] < mine
    ]
    hops.sort()
    return tuple((q, d) for d, q in hops)


class Prt:
    """Prefix Resolution Table of one router.

    Maps every known name prefix to its anchors ranked by this router's
    distance to them (ties to the lower router id). The prefix-to-anchor map
    and the trie are shared between routers; only distances are per router.
    """

    def __init__(self, router: RouterId, assignment: AnchorAssignment, trie: PrefixTrie,
                 anchor_dist: Mapping[RouterId, float]):
        self.router = router
        self._assignment = assignment
        self._trie = trie
        self._dist = anchor_dist
        self._size = sum(
            n for group, n in assignment.anchor_groups().items()
            if any(a in anchor_dist for a in group)
        )

    def __len__(self) -> int:
        return self._size

    def ranked(self, prefix: Name) -> tuple[tuple[RouterId, float], ...]:
        dist = self._dist
        anchors = [(dist[a], a) for a in self._assignment.anchors_of(prefix) if a in dist]
        anchors.sort()
        return tuple((a, d) for d, a in anchors)

    def resolve(self, name: Name) -> tuple[Optional[Name], tuple[tuple[RouterId, float], ...]]:
        """Longest-prefix match of ``name`` and the ranked anchors of that prefix."""
        prefix = self._trie.longest_match(name)
        if prefix is None:
            return None, ()
        return prefix, self.ranked(prefix)


class Fib:
    """Per-prefix NDN FIB of one router.

    Prefixes announced by the same set of anchors share next-hop rankings, so
    entries are stored once per anchor set. Prefixes anchored at this router
    are local and have no next hop.
    """

    def __init__(self, router: RouterId, group_of: Mapping[Name, frozenset],
                 group_hops: Mapping[frozenset, tuple], trie: PrefixTrie, size: int):
        self.router = router
        self._group_of = group_of
        self._hops = group_hops
        self._trie = trie
        self._size = size

    def __len__(self) -> int:
        return self._size

    def entries(self, prefix: Name) -> tuple[tuple[RouterId, float], ...]:
        return self._hops.get(self._group_of.get(prefix), ())

    def is_local(self, prefix: Name) -> bool:
        return self.router in self._group_of.get(prefix, ())

    def lookup(self, name: Name) -> tuple[Optional[Name], tuple[tuple[RouterId, float], ...]]:
        prefix = self._trie.longest_match(name)
        if prefix is None:
            return None, ()
        return prefix, self.entries(prefix)


@dataclass
class RouteTables:
    """Routes to anchors for every router.

    ``fab[i][a]`` is the ranked tuple of ``(next_hop, D(i, a, next_hop))``;
    ``anchor_dist[i][a]`` is router i's own shortest distance to anchor a
    (0 when i is a).
    """

    topology: Topology
    assignment: AnchorAssignment
    cost: CostFn
    fab: dict[RouterId, dict[RouterId, tuple]]
    anchor_dist: dict[RouterId, dict[RouterId, float]]
    trie: PrefixTrie
    prt: dict[RouterId, Prt] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.prt:
            self.prt = {
                i: Prt(i, self.assignment, self.trie, self.anchor_dist[i])
                for i in sorted(self.topology.routers)
            }


def compute_routes(topo: Topology, assignment: AnchorAssignment,
                   cost: CostFn = hop_cost, trie: Optional[PrefixTrie] = None) -> RouteTables:
    fab: dict[RouterId, dict[RouterId, tuple]] = {i: {} for i in topo.routers}
    anchor_dist: dict[RouterId, dict[RouterId, float]] = {i: {} for i in topo.routers}
    for a in assignment.anchors:
        dist = shortest_distances(topo, [a], cost)
        for i, d in dist.items():
            anchor_dist[i][a] = d
            if i != a:
                fab[i][a] = _ranked_hops(topo, i, dist, cost)
    return RouteTables(topo, assignment, cost, fab, anchor_dist,
                       trie if trie is not None else assignment.prefix_trie())


def build_ndn_fibs(topo: Topology, assignment: AnchorAssignment, cost: CostFn = hop_cost,
                   trie: Optional[PrefixTrie] = None) -> dict[RouterId, Fib]:
    """Per-prefix FIBs; the distance to a prefix is the minimum over its anchors."""
    trie = trie if trie is not None else assignment.prefix_trie()
    group_of = {p: frozenset(assignment.anchors_of(p)) for p in assignment.prefixes}
    hops: dict[RouterId, dict[frozenset, tuple]] = {i: {} for i in topo.routers}
    known: dict[RouterId, int] = {i: 0 for i in topo.routers}
    group_sizes: dict[frozenset, int] = {}
    for g in group_of.values():
        group_sizes[g] = group_sizes.get(g, 0) + 1
    for group in sorted(group_sizes, key=sorted):
        dist = shortest_distances(topo, group, cost)
        for i in dist:
            known[i] += group_sizes[group]
            if i not in group:
                hops[i][group] = _ranked_hops(topo, i, dist, cost)
    return {i: Fib(i, group_of, hops[i], trie, known[i]) for i in sorted(topo.routers)}


# -- path analysis -----------------------------------------------------------------

def fab_route(rt: RouteTables, origin: RouterId, anchor: RouterId) -> Optional[list[RouterId]]:
    """Routers visited following rank-1 FAB hops; None if unreachable or looping."""
    path = [origin]
    cur = origin
    while cur != anchor:
        ranks = rt.fab[cur].get(anchor)
        if not ranks:
            return None
        cur = ranks[0][0]
        if cur in path:
            return None
        path.append(cur)
    return path


def fib_route(fibs: Mapping[RouterId, Fib], origin: RouterId, prefix: Name) -> Optional[list[RouterId]]:
    path = [origin]
    cur = origin
    while not fibs[cur].is_local(prefix):
        ranks = fibs[cur].entries(prefix)
        if not ranks:
            return None
        cur = ranks[0][0]
        if cur in path:
            return None
        path.append(cur)
    return path


def anchor_bound_route(rt: RouteTables, origin: RouterId, prefix: Name) -> Optional[list[RouterId]]:
    ranked = rt.prt[origin].ranked(prefix)
    if not ranked:
        return None
    return fab_route(rt, origin, ranked[0][0])


@dataclass
class PathReport:
    checked: int = 0
    single_anchor_checked: int = 0
    divergences: list = field(default_factory=list)
    length_mismatches: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.divergences and not self.length_mismatches


def verify_path_equivalence(topo: Topology, assignment: AnchorAssignment, cost: CostFn = hop_cost,
                            origins: Optional[Iterable[RouterId]] = None,
                            prefixes: Optional[Iterable[Name]] = None) -> PathReport:
    """Compare per-prefix FIB forwarding with PRT binding + FAB forwarding.

    Single-anchor prefixes must yield identical router sequences; multi-homed
    prefixes must yield routes of equal length. Divergences are collected in
    the report rather than raised.
    """
    rt = compute_routes(topo, assignment, cost)
    fibs = build_ndn_fibs(topo, assignment, cost, rt.trie)
    report = PathReport()
    origins = sorted(topo.routers) if origins is None else sorted(origins)
    prefixes = assignment.prefixes if prefixes is None else list(prefixes)
    for o in origins:
        for p in prefixes:
            by_prefix = fib_route(fibs, o, p)
            by_anchor = anchor_bound_route(rt, o, p)
            report.checked += 1
            if len(assignment.anchors_of(p)) == 1:
                report.single_anchor_checked += 1
                if by_prefix != by_anchor:
                    report.divergences.append((o, p, by_prefix, by_anchor))
            else:
                lp = None if by_prefix is None else len(by_prefix)
                la = None if by_anchor is None else len(by_anchor)
                if lp != la:
                    report.length_mismatches.append((o, p, by_prefix, by_anchor))
    return report


@dataclass
class AdvantageVerdict:
    condition: Optional[str]  # "eq1", "eq2" or None
    alternate_anchor: Optional[RouterId]
    d_star_relay_bound: float
    d_relay_alternate: float
    d_relay_origin: float
    d_origin_alternate: float


def multihoming_advantage(topo: Topology, assignment: AnchorAssignment, cost: CostFn,
                          failed_link: Optional[tuple[RouterId, RouterId]], origin: RouterId,
                          relay: RouterId, bound_anchor: RouterId, prefix: Name) -> AdvantageVerdict:
    """Decide whether routing on the prefix would beat routing on the bound anchor.

    After ``failed_link`` (incident to ``relay``) goes down, the relay either
    still reaches ``bound_anchor`` at distance D* or cannot reach it at all.
    Prefix routing helps only when the nearest other anchor a_j of ``prefix``
    is strictly closer than D* (first condition), or, when D* is infinite,
    closer than going back through the origin (second condition).
    """
    rt = compute_routes(topo, assignment, cost)
    route = fab_route(rt, origin, bound_anchor)
    if route is None or relay not in route:
        raise InvalidScenario(f"router {relay} is not on the route from {origin} to {bound_anchor}")
    if bound_anchor not in assignment.anchors_of(prefix):
        raise InvalidScenario(f"{bound_anchor} does not anchor {prefix}")
    after = topo
    if failed_link is not None:
        if relay not in failed_link:
            raise InvalidScenario("failed link must be incident to the relay")
        after = topo.without_link(*failed_link)

    from_relay = shortest_distances(after, [relay], cost)
    d_star = from_relay.get(bound_anchor, INF)
    others = [a for a in assignment.anchors_of(prefix) if a != bound_anchor]
    if not others:
        raise InvalidScenario(f"{prefix} is not multi-homed")
    a_j = min(others, key=lambda a: (from_relay.get(a, INF), a))
    d_rj = from_relay.get(a_j, INF)
    d_ro = from_relay.get(origin, INF)
    d_oj = shortest_distances(after, [origin], cost).get(a_j, INF)

    condition = None
    if d_star < INF and d_rj < d_star:
        condition = "eq1"
    elif d_star == INF and d_rj < d_ro + d_oj:
        condition = "eq2"
    return AdvantageVerdict(condition, a_j, d_star, d_rj, d_ro, d_oj)


def inject_inconsistency(rt: RouteTables, seed: int, severity: float) -> RouteTables:
    """Return a copy of ``rt`` with a fraction ``severity`` of FAB entries corrupted.

    A corrupted entry is, with equal odds: rerouted to a random other neighbor
    with that neighbor's true distance plus the link cost; rerouted while
    keeping its old (now stale) distance; or left on its next hop with the
    distance shifted by one or two link costs. Ranks are re-sorted by the
    stored distances afterwards. PRTs and true distances are untouched.
    """
    if not 0.0 <= severity <= 1.0:
        raise ValueError("severity must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    topo, cost = rt.topology, rt.cost
    fab = {i: dict(entries) for i, entries in rt.fab.items()}
    if severity > 0:
        for i in sorted(fab):
            nbrs = topo.neighbors(i)
            for a in sorted(fab[i]):
                ranks = fab[i][a]
                if not ranks or rng.random() >= severity:
                    continue
                kind = int(rng.integers(3))
                best, best_d = ranks[0]
                others = [q for q in nbrs if q != best]
                if kind < 2 and others:
                    q = others[int(rng.integers(len(others)))]
                    if kind == 0:
                        d = cost(topo.link(i, q)) + rt.anchor_dist[q].get(a, INF)
                    else:
                        d = best_d
                    if d == INF:
                        d = best_d
                    perturbed = [(q, d)] + [r for r in ranks if r[0] != q]
                else:
                    step = cost(topo.link(i, best))
                    shift = int(rng.choice([-2, -1, 1, 2])) * step
                    perturbed = [(best, max(best_d + shift, step))] + list(ranks[1:])
                # a FAB stays ranked by the distances it stores, right or wrong
                perturbed.sort(key=lambda r: (r[1], r[0]))
                fab[i][a] = tuple(perturbed)
    return RouteTables(topo, rt.assignment, cost, fab, rt.anchor_dist, rt.trie, dict(rt.prt))


def routing_loops(rt: RouteTables) -> list[tuple[RouterId, RouterId]]:
    """(router, anchor) pairs whose rank-1 FAB walk revisits a router."""
    loops = []
    for a in rt.assignment.anchors:
        for i in sorted(rt.fab):
            if i == a or a not in rt.fab[i]:
                continue
            seen = {i}
            cur = i
            while cur != a:
                ranks = rt.fab[cur].get(a)
                if not ranks:
                    break
                cur = ranks[0][0]
                if cur in seen:
                    loops.append((i, a))
                    break
                seen.add(cur)
    return loops


# -- generators --------------------------------------------------------------------

def generate_topology(n: int, m: int, seed: int, delay_ms: float = 30.0,
                      rate_mbps: float = 10_000.0) -> Topology:
    """Connected random graph with ``n`` routers and ``m`` links.

    A preferential-attachment spanning tree gives a hub-and-spoke backbone;
    the remaining ``m - n + 1`` links join random non-adjacent pairs.
    """
    if m < n - 1 or m > n * (n - 1) // 2:
        raise ValueError(f"cannot build a connected graph with {n} nodes and {m} links")
    rng = np.random.default_rng(seed)
    topo = Topology(range(n))
    degree = np.zeros(n)
    for v in range(1, n):
        w = degree[:v] + 1.0
        u = int(rng.choice(v, p=w / w.sum()))
        topo.add_link(Link(u, v, delay_ms, rate_mbps * 1e6))
        degree[u] += 1
        degree[v] += 1
    while len(topo.links) < m:
        u, v = (int(x) for x in rng.choice(n, size=2, replace=False))
        if not topo.has_link(u, v):
            topo.add_link(Link(min(u, v), max(u, v), delay_ms, rate_mbps * 1e6))
    return topo


def prefix_name(index: int) -> Name:
    return Name((f"org{index % 8}", f"p{index:05d}"))


def generate_anchors(topo: Topology, n_anchors: int, prefixes_per_anchor: int, seed: int,
                     exclude: Sequence[RouterId] = ()) -> AnchorAssignment:
    """Pick ``n_anchors`` random routers, each anchoring its own block of prefixes."""
    rng = np.random.default_rng(seed)
    pool = sorted(set(topo.routers) - set(exclude))
    chosen = sorted(int(x) for x in rng.choice(pool, size=n_anchors, replace=False))
    assignment = AnchorAssignment()
    for k, a in enumerate(chosen):
        assignment.announce(a, [prefix_name(k * prefixes_per_anchor + j)
                                for j in range(prefixes_per_anchor)])
    return assignment
