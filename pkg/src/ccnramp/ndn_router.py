"""NDN-style baseline: per-prefix FIB, per-Interest PIT, content store.

Best-route forwarding on the rank-1 FIB next hop. Interests for a name that
is already pending are aggregated; an Interest whose nonce the PIT has
already seen is dropped as a probable loop.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, NamedTuple, Optional

from .content_store import ContentStore
from .names import Name, PrefixTrie
from .ramp_router import CONTENT, Emission, Local


class NdnInterest(NamedTuple):
    name: Name
    nonce: int
    tid: int = -1


class NdnData(NamedTuple):
    name: Name
    payload: Any = CONTENT
    tid: int = -1


@dataclass
class PitEntry:
    name: Name
    nonces: set
    # downstream -> tid of the Interest it sent, so each returning copy can be
    # attributed to the request that asked for it
    downstreams: dict
    upstream: Optional[int]
    created: float
    lifetime: float
    # tid of the Interest this router forwarded upstream; its fate is decided
    # by the returning data, not by this entry
    creator_tid: int = -1

    def expired(self, now: float) -> bool:
        return now - self.created > self.lifetime


class NdnRouter:
    def __init__(self, router_id: int, fib, hosted: Optional[PrefixTrie] = None,
                 cs_capacity: int = 0, pit_lifetime: float = 2.0):
        self.id = router_id
        self.fib = fib
        self.hosted = hosted if hosted is not None else PrefixTrie()
        self.cs = ContentStore(cs_capacity) if cs_capacity > 0 else None
        self.pit: dict[Name, PitEntry] = {}
        self.pit_lifetime = pit_lifetime
        self.lookups = {"pit": 0, "fib": 0}
        self.tally: Optional[dict] = None
        self.drops: list[tuple[str, Any]] = []

    def _count(self, kind: str) -> None:
        self.lookups[kind] += 1
        if self.tally is not None:
            self.tally[kind] += 1

    def _pending(self, name: Name, now: float) -> Optional[PitEntry]:
        entry = self.pit.get(name)
        if entry is not None and entry.expired(now):
            self._expire_entry(entry)
            return None
        return entry

    def _expire_entry(self, entry: PitEntry) -> None:
        del self.pit[entry.name]
        for tid in entry.downstreams.values():
            if tid != entry.creator_tid:
                self.drops.append(("pit-expired", NdnInterest(entry.name, 0, tid)))

    def on_interest(self, sender, interest: NdnInterest, now: float = 0.0) -> list[Emission]:
        name = interest.name
        if self.cs is not None:
            payload = self.cs.get(name)
            if payload is not None:
                return [(sender, NdnData(name, payload, interest.tid))]
        if self.hosted.longest_match(name) is not None:
            return [(sender, NdnData(name, CONTENT, interest.tid))]

        self._count("pit")
        entry = self._pending(name, now)
        if entry is not None:
            if interest.nonce in entry.nonces:
                self.drops.append(("duplicate-nonce", interest))
                return []
            entry.nonces.add(interest.nonce)
            old = entry.downstreams.get(sender)
            if old is not None and old != entry.creator_tid:
                self.drops.append(("superseded", NdnInterest(name, interest.nonce, old)))
            entry.downstreams[sender] = interest.tid
            return []

        self._count("fib")
        _, ranks = self.fib.lookup(name)
        if not ranks:
            self.drops.append(("no-route", interest))
            return []
        upstream = ranks[0][0]
        self.pit[name] = PitEntry(name, {interest.nonce}, {sender: interest.tid}, upstream,
                                  now, self.pit_lifetime, interest.tid)
        return [(upstream, interest)]

    def on_data(self, sender, data: NdnData, now: float = 0.0) -> list[Emission]:
        self._count("pit")
        entry = self._pending(data.name, now)
        if entry is None:
            self.drops.append(("unsolicited", data))
            return []
        del self.pit[data.name]
        out: list[Emission] = []
        for down, tid in sorted(entry.downstreams.items(), key=_downstream_order):
            out.append((down, NdnData(data.name, data.payload, tid)))
        if data.tid not in entry.downstreams.values():
            # every copy continues under the tid of the Interest it answers
            self.drops.append(("merged", data))
        if self.cs is not None:
            self.cs.insert(data.name, data.payload)
        return out

    def expire_pit(self, now: float) -> int:
        stale = [e for e in self.pit.values() if e.expired(now)]
        for e in stale:
            self._expire_entry(e)
        return len(stale)

    def on_link_failure(self, neighbor: int, now: float = 0.0) -> list[Emission]:
        # pending entries towards the lost neighbor simply age out
        return []

    def table_sizes(self) -> dict[str, int]:
        return {"fib": len(self.fib), "pit": len(self.pit)}


def _downstream_order(item):
    down = item[0]
    return (1, down.consumer) if isinstance(down, Local) else (0, down)
