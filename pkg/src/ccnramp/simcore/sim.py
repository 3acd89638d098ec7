"""Deterministic discrete-event simulation of RAMP or NDN forwarding.

Each consumer router hosts one consumer application that issues requests
from a pre-generated, per-router arrival stream, so RAMP and NDN runs with
the same workload seed replay identical request sequences. Every consumer
transmission of an Interest gets a trace id (tid) that the simulator follows
through forwarding, replies and drops; routers never look at it.

Trace grammar, one event per line::

    <time> <kind> <router> key=value ...

with kinds ``ireq`` (consumer Interest reaches its origin router), ``ifwd``
(RAMP Interest sent: tid to aid anchor dist), ``nfwd`` (NDN Interest sent:
tid to nonce), ``dfwd`` (data sent: tid to), ``efwd`` (error sent: tid to
code), ``deliver`` (rid tid what code), ``drop`` (tid reason), ``timeout``
(rid attempt) and ``fail`` (peer).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..control_plane import build_ndn_fibs, compute_routes, inject_inconsistency
from ..names import Name, PrefixTrie, parse_name
from ..ndn_router import NdnData, NdnInterest, NdnRouter
from ..ramp_router import DataPacket, ErrorCode, ErrorMessage, Interest, Local, RampRouter
from .engine import (CONSUMER_REQUEST, LINK_FAILURE, METRIC_SAMPLE, PACKET_ARRIVAL, TIMER,
                     EventQueue, LinkState)
from .metrics import LOOKUP_KINDS, TABLES, MetricsRecord
from .scenario import Scenario
from .workload import Catalog, ZipfSampler, arrival_stream, popularity_order

_INTERESTS = (Interest, NdnInterest)
_DATA = (DataPacket, NdnData)


@dataclass
class Request:
    rid: int
    router: int
    name: Name
    issued: float
    attempts: int = 0
    tids: list = field(default_factory=list)
    done: bool = False
    completed: Optional[float] = None
    outcome: Optional[str] = None
    tally: dict = field(default_factory=dict)

    @property
    def delay(self) -> Optional[float]:
        return None if self.completed is None else self.completed - self.issued


@dataclass
class RunResult:
    metrics: MetricsRecord
    trace: list[str]
    requests: list[Request]
    # per tid: how many times it reached an end (data/error at origin or a drop)
    terminal: list[int]
    inflight: set
    simulator: "Simulator"


class Simulator:
    def __init__(self, scenario: Scenario):
        scenario.validate()
        self.s = scenario
        self.mode = scenario.mode
        self.queue = EventQueue()
        self.topology = scenario.topology
        self.trie = scenario.anchors.prefix_trie()
        self.hosted = {a: PrefixTrie(p) for a, p in scenario.anchors.bindings.items()}
        self.links: dict[tuple[int, int], LinkState] = {}
        for link in self.topology.links.values():
            ls = LinkState(link.u, link.v, link.delay_ms / 1000.0, link.rate_bps)
            self.links[(link.u, link.v)] = ls
            self.links[(link.v, link.u)] = ls
        self.router_ids = sorted(self.topology.routers)
        self.routers: dict = {}
        self._build_routers()

        self.requests: list[Request] = []
        self.tid_owner: list[int] = []
        self.terminal: list[int] = []
        self.forwarded = {r: 0 for r in self.router_ids}
        self.drops: dict[str, int] = {}
        self.trace: list[str] = []
        self._tracing = scenario.trace
        self._nonces = random.Random(scenario.seed)
        self._bits = {"interest": 8 * scenario.interest_bytes, "data": 8 * scenario.data_bytes,
                      "error": 8 * scenario.error_bytes}
        self._warmup = scenario.effective_warmup
        self._size_sums = {t: np.zeros(len(self.router_ids)) for t in TABLES[self.mode]}
        self._samples = 0
        self._streams: dict[int, tuple] = {}

    # -- setup ---------------------------------------------------------------------

    def _tables(self, topo):
        s = self.s
        if self.mode == "ramp":
            rt = compute_routes(topo, s.anchors, trie=self.trie)
            if s.inconsistency is not None:
                severity, seed = s.inconsistency
                rt = inject_inconsistency(rt, seed, severity)
            return rt
        return build_ndn_fibs(topo, s.anchors, trie=self.trie)

    def _build_routers(self) -> None:
        s = self.s
        tables = self._tables(self.topology)
        cap = s.cache_capacity
        for r in self.router_ids:
            hosted = self.hosted.get(r)
            if self.mode == "ramp":
                self.routers[r] = RampRouter(
                    r, tables.fab[r], tables.prt[r], hosted, cs_capacity=cap,
                    aid_width=s.aid_width, lsat_ttl=s.effective_lsat_ttl, seed=[s.seed, r])
            else:
                self.routers[r] = NdnRouter(r, tables[r], hosted, cs_capacity=cap,
                                            pit_lifetime=s.pit_lifetime)

    def _install_tables(self) -> None:
        tables = self._tables(self.topology)
        for r, router in self.routers.items():
            if self.mode == "ramp":
                router.fab = tables.fab[r]
                router.prt = tables.prt[r]
            else:
                router.fib = tables[r]

    def _build_streams(self) -> None:
        s = self.s
        if s.requests is not None:
            per_router: dict[int, list] = {}
            for t, router, name in sorted(s.requests, key=lambda x: (x[0], x[1])):
                if isinstance(name, str):
                    name = parse_name(name)
                per_router.setdefault(router, []).append((t, name))
            for router, items in per_router.items():
                self._streams[router] = ([t for t, _ in items], [n for _, n in items])
            return
        wl = s.workload
        catalog = Catalog(s.anchors.prefixes, s.cos_per_prefix)
        sampler = ZipfSampler(s.catalog, s.zipf_alpha)
        order = popularity_order(wl)
        for router in sorted(set(s.consumers)):
            times, objects = arrival_stream(wl, router, s.horizon, sampler, order)
            self._streams[router] = (times.tolist(), _LazyNames(catalog, objects))

    # -- tracing and bookkeeping ---------------------------------------------------------

    def _log(self, now: float, kind: str, router: int, detail: str) -> None:
        self.trace.append(f"{now:.9f} {kind} {router} {detail}")

    def _tally(self, tid: int) -> Optional[dict]:
        return self.requests[self.tid_owner[tid]].tally if tid >= 0 else None

    def _end(self, tid: int) -> None:
        if tid >= 0:
            self.terminal[tid] += 1

    def _drop(self, now: float, router: int, reason: str, tid: int) -> None:
        self.drops[reason] = self.drops.get(reason, 0) + 1
        if self._tracing:
            self._log(now, "drop", router, f"tid={tid} reason={reason}")

    # -- packet plumbing -----------------------------------------------------------------

    def _emit(self, node: int, out: list, now: float) -> None:
        ended = set()
        for dest, pkt in out:
            if type(dest) is Local:
                ended.add(pkt.tid)
                self._deliver(node, dest.consumer, pkt, now)
            else:
                self._send(node, dest, pkt, now)
        router = self.routers[node]
        if router.drops:
            for reason, pkt in router.drops:
                ended.add(pkt.tid)
                self._drop(now, node, reason, pkt.tid)
            router.drops.clear()
        for tid in ended:
            self._end(tid)

    def _send(self, node: int, dest: int, pkt, now: float) -> None:
        link = self.links.get((node, dest))
        if link is None or not link.up:
            self._drop(now, node, "link-down", pkt.tid)
            self._end(pkt.tid)
            return
        typ = type(pkt)
        if typ is Interest or typ is NdnInterest:
            bits = self._bits["interest"]
            self.forwarded[node] += 1
            tally = self._tally(pkt.tid)
            if tally is not None:
                tally["hops"] += 1
            if self._tracing:
                if typ is Interest:
                    self._log(now, "ifwd", node, f"tid={pkt.tid} to={dest} aid={pkt.aid} "
                              f"anchor={pkt.anchor} dist={pkt.distance:g}")
                else:
                    self._log(now, "nfwd", node, f"tid={pkt.tid} to={dest} nonce={pkt.nonce}")
        elif typ is DataPacket or typ is NdnData:
            bits = self._bits["data"]
            if self._tracing:
                self._log(now, "dfwd", node, f"tid={pkt.tid} to={dest} aid={getattr(pkt, 'aid', None)}")
        else:
            bits = self._bits["error"]
            if self._tracing:
                self._log(now, "efwd", node, f"tid={pkt.tid} to={dest} aid={pkt.aid} "
                          f"code={pkt.code.value}")
        arrival = link.transmit(node, bits, now)
        self.queue.schedule(arrival, PACKET_ARRIVAL, (dest, node, pkt))

    def _on_arrival(self, now: float, node: int, sender: int, pkt) -> None:
        if not self.links[(sender, node)].up:
            self._drop(now, node, "link-down", pkt.tid)
            self._end(pkt.tid)
            return
        router = self.routers[node]
        router.tally = self._tally(pkt.tid)
        typ = type(pkt)
        if typ is Interest or typ is NdnInterest:
            out = router.on_interest(sender, pkt, now)
        elif typ is DataPacket or typ is NdnData:
            out = router.on_data(sender, pkt, now)
        else:
            out = router.on_error(sender, pkt, now)
        router.tally = None
        self._emit(node, out, now)

    # -- consumer application ------------------------------------------------------------

    def _new_tally(self) -> dict:
        tally = {k: 0 for k in LOOKUP_KINDS[self.mode]}
        tally["hops"] = 0
        return tally

    def _issue(self, req: Request, now: float) -> None:
        tid = len(self.tid_owner)
        self.tid_owner.append(req.rid)
        self.terminal.append(0)
        req.attempts += 1
        req.tids.append(tid)
        if self.mode == "ramp":
            pkt = Interest(req.name, tid=tid)
        else:
            pkt = NdnInterest(req.name, self._nonces.getrandbits(32), tid)
        self.queue.schedule(now + self.s.rto, TIMER, (req.rid, req.attempts))
        if self._tracing:
            self._log(now, "ireq", req.router, f"tid={tid} rid={req.rid} name={req.name}")
        router = self.routers[req.router]
        router.tally = req.tally
        out = router.on_interest(Local(req.rid), pkt, now)
        router.tally = None
        self._emit(req.router, out, now)

    def _finish(self, req: Request, now: float, outcome: str) -> None:
        req.done = True
        req.outcome = outcome
        if outcome == "data":
            req.completed = now

    def _deliver(self, node: int, rid: int, pkt, now: float) -> None:
        req = self.requests[rid]
        is_data = type(pkt) in _DATA
        if self._tracing:
            code = "-" if is_data else pkt.code.value
            self._log(now, "deliver", node, f"rid={rid} tid={pkt.tid} "
                      f"what={'data' if is_data else 'error'} code={code}")
        if req.done:
            return
        if is_data:
            self._finish(req, now, "data")
        elif pkt.code == ErrorCode.LINK_FAILURE and req.attempts <= self.s.max_retx:
            # tables were refreshed when the link went down
            self._issue(req, now)
        else:
            self._finish(req, now, pkt.code.value)

    def _on_request(self, now: float, router: int, k: int) -> None:
        times, names = self._streams[router]
        req = Request(len(self.requests), router, names[k], now, tally=self._new_tally())
        self.requests.append(req)
        if k + 1 < len(times):
            self.queue.schedule(times[k + 1], CONSUMER_REQUEST, (router, k + 1))
        self._issue(req, now)

    def _on_timer(self, now: float, rid: int, attempt: int) -> None:
        req = self.requests[rid]
        if req.done or req.attempts != attempt:
            return
        if self._tracing:
            self._log(now, "timeout", req.router, f"rid={rid} attempt={attempt}")
        if req.attempts <= self.s.max_retx:
            self._issue(req, now)
        else:
            self._finish(req, now, "timeout")

    # -- control events ----------------------------------------------------------------

    def _on_failure(self, now: float, u: int, v: int) -> None:
        self.links[(u, v)].up = False
        self.topology = self.topology.without_link(u, v)
        self._install_tables()
        if self._tracing:
            self._log(now, "fail", u, f"peer={v}")
        for x, y in ((u, v), (v, u)):
            self._emit(x, self.routers[x].on_link_failure(y, now), now)

    def _on_sample(self, now: float) -> None:
        for r in self.router_ids:
            router = self.routers[r]
            if self.mode == "ramp":
                router.lsat.expire(now)
            else:
                router.expire_pit(now)
                if router.drops:
                    self._emit(r, [], now)
        if now >= self._warmup:
            self._samples += 1
            for i, r in enumerate(self.router_ids):
                for table, size in self.routers[r].table_sizes().items():
                    self._size_sums[table][i] += size
        nxt = now + self.s.sample_interval
        if nxt <= self.s.horizon:
            self.queue.schedule(nxt, METRIC_SAMPLE)

    # -- main loop -----------------------------------------------------------------------

    def run(self) -> RunResult:
        s = self.s
        q = self.queue
        self._build_streams()
        for router in sorted(self._streams):
            times, _ = self._streams[router]
            if len(times):
                q.schedule(times[0], CONSUMER_REQUEST, (router, 0))
        for t, u, v in sorted(s.failures):
            q.schedule(t, LINK_FAILURE, (u, v))
        q.schedule(0.0, METRIC_SAMPLE)

        horizon = s.horizon
        while len(q) and q.peek_time() <= horizon:
            ev = q.pop()
            kind, payload, now = ev.kind, ev.payload, ev.time
            if kind == PACKET_ARRIVAL:
                self._on_arrival(now, *payload)
            elif kind == CONSUMER_REQUEST:
                self._on_request(now, *payload)
            elif kind == TIMER:
                self._on_timer(now, *payload)
            elif kind == METRIC_SAMPLE:
                self._on_sample(now)
            elif kind == LINK_FAILURE:
                self._on_failure(now, *payload)
        return RunResult(self._metrics(), self.trace, self.requests, self.terminal,
                         self._inflight(), self)

    def _inflight(self) -> set:
        tids = set()
        for ev in self.queue.pending():
            if ev.kind == PACKET_ARRIVAL:
                tids.add(ev.payload[2].tid)
        if self.mode == "ndn":
            for router in self.routers.values():
                for entry in router.pit.values():
                    tids.update(entry.downstreams.values())
        tids.discard(-1)
        return {t for t in tids if self.terminal[t] == 0}

    def _metrics(self) -> MetricsRecord:
        s = self.s
        done = [r for r in self.requests if r.issued >= self._warmup and r.outcome == "data"]
        failed = sum(1 for r in self.requests
                     if r.issued >= self._warmup and r.done and r.outcome != "data")
        kinds = LOOKUP_KINDS[self.mode]
        samples = max(self._samples, 1)
        return MetricsRecord(
            mode=self.mode, rate=s.rate, seed=s.seed, config=s.describe(),
            routers=list(self.router_ids),
            table_means={t: v / samples for t, v in self._size_sums.items()},
            samples=self._samples,
            issued=sum(1 for r in self.requests if r.issued >= self._warmup),
            retrievals=len(done), failed=failed,
            delays=np.array([r.delay for r in done], dtype=float),
            hops=np.array([r.tally["hops"] for r in done], dtype=float),
            lookups={k: np.array([r.tally[k] for r in done], dtype=float) for k in kinds},
            interests_forwarded=dict(self.forwarded),
            drops=dict(sorted(self.drops.items())),
        )


class _LazyNames:
    """Object indices resolved to names on first access."""

    def __init__(self, catalog: Catalog, objects: np.ndarray):
        self._catalog = catalog
        self._objects = objects

    def __len__(self) -> int:
        return len(self._objects)

    def __getitem__(self, k: int) -> Name:
        return self._catalog.name(self._objects[k])


def run(scenario: Scenario) -> RunResult:
    """Run one scenario to its horizon; deterministic in (scenario, seed)."""
    return Simulator(scenario).run()
