"""Audits over simulation traces and run bookkeeping.

The auditors read only the line-oriented trace, never simulator internals,
so they check the forwarding logic from the outside.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable


@dataclass(frozen=True)
class TraceRecord:
    time: float
    kind: str
    router: int
    fields: dict


def parse_trace(lines: Iterable[str]) -> list[TraceRecord]:
    records = []
    for line in lines:
        parts = line.split()
        if len(parts) < 3:
            continue
        kv = dict(p.split("=", 1) for p in parts[3:])
        records.append(TraceRecord(float(parts[0]), parts[1], int(parts[2]), kv))
    return records


@dataclass
class LoopAudit:
    interests: int = 0
    hops: int = 0
    distance_violations: list = field(default_factory=list)
    revisits: list = field(default_factory=list)
    loop_errors: int = 0

    @property
    def ok(self) -> bool:
        return not self.distance_violations and not self.revisits


def audit_interest_paths(lines: Iterable[str]) -> LoopAudit:
    """Check every Interest's hop-by-hop journey.

    The distance an Interest carries must strictly decrease at every hop and
    no router may forward the same Interest twice. Loop-coded errors are
    counted, not flagged.
    """
    audit = LoopAudit()
    last_dist: dict[str, float] = {}
    visited: dict[str, set] = {}
    looped = set()  # one error per Interest, however many hops it travels
    for rec in parse_trace(lines):
        if rec.kind == "ireq":
            tid = rec.fields["tid"]
            audit.interests += 1
            last_dist[tid] = math.inf
            visited[tid] = set()
        elif rec.kind == "ifwd":
            tid = rec.fields["tid"]
            dist = float(rec.fields["dist"])
            audit.hops += 1
            seen = visited.setdefault(tid, set())
            if rec.router in seen:
                audit.revisits.append((tid, rec.router))
            seen.add(rec.router)
            prev = last_dist.get(tid, math.inf)
            if not dist < prev:
                audit.distance_violations.append((tid, rec.router, prev, dist))
            last_dist[tid] = dist
        elif rec.kind in ("efwd", "deliver") and rec.fields.get("code") == "loop":
            if rec.kind == "efwd" or rec.fields.get("what") == "error":
                looped.add(rec.fields["tid"])
    audit.loop_errors = len(looped)
    return audit


@dataclass
class ReversePathAudit:
    checked: int = 0
    mismatches: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches


def audit_reverse_paths(lines: Iterable[str]) -> ReversePathAudit:
    """Data answering an Interest must retrace the Interest's routers exactly.

    Only data that made it back to a consumer is checked; the replying router
    is the last router the Interest reached.
    """
    records = parse_trace(lines)
    forward: dict[str, list[int]] = {}
    backward: dict[str, list[int]] = {}
    delivered: dict[str, int] = {}
    for rec in records:
        tid = rec.fields.get("tid")
        if rec.kind == "ireq":
            forward[tid] = [rec.router]
        elif rec.kind in ("ifwd", "nfwd"):
            forward.setdefault(tid, [rec.router])
            forward[tid].append(int(rec.fields["to"]))
        elif rec.kind == "dfwd":
            backward.setdefault(tid, []).append(rec.router)
        elif rec.kind == "deliver" and rec.fields.get("what") == "data":
            delivered.setdefault(tid, rec.router)
    audit = ReversePathAudit()
    for tid, origin in delivered.items():
        if tid not in forward:
            continue
        path = forward[tid]
        back = backward.get(tid, []) + [origin]
        audit.checked += 1
        if back != path[::-1]:
            audit.mismatches.append((tid, path, back))
    return audit


@dataclass
class ConservationAudit:
    issued: int = 0
    ended: int = 0
    inflight: int = 0
    unaccounted: list = field(default_factory=list)
    duplicated: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.unaccounted and not self.duplicated


def audit_conservation(result) -> ConservationAudit:
    """Every consumer Interest ends exactly once (reply or error back at its
    origin router, or a drop with a reason) or is still in flight."""
    audit = ConservationAudit(issued=len(result.terminal))
    for tid, count in enumerate(result.terminal):
        if count == 1:
            audit.ended += 1
        elif count == 0:
            if tid in result.inflight:
                audit.inflight += 1
            else:
                audit.unaccounted.append(tid)
        else:
            audit.duplicated.append((tid, count))
    return audit
