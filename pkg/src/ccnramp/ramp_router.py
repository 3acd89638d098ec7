"""Anchor-based forwarding with anonymous label swapping.

Each router forwards Interests towards the anchor named in the Interest using
only its FAB (routes to anchors) and its LSAT (label-swapping table). The
origin router resolves the content name to an anchor once, with its PRT.
Interests carry a hop-local anonymous identifier (AID) that every router
swaps for one of its own (the MAP), so the reverse path for data and errors
is stored per flow rather than per Interest.

Handlers return a list of ``(destination, packet)`` pairs. A destination is
either a neighbor router id or a :class:`Local` consumer.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable, Iterable, NamedTuple, Optional, Union

import numpy as np

from .content_store import ContentStore
from .names import Name, PrefixTrie

INF = math.inf
LOCAL = "local"
CONTENT = bytes(1024)


class AidSpaceExhausted(RuntimeError):
    pass


class Local(NamedTuple):
    consumer: int


class Interest(NamedTuple):
    name: Name
    aid: Optional[int] = None
    anchor: Optional[int] = None
    distance: float = INF
    # simulator bookkeeping; never inspected by the forwarding logic
    tid: int = -1


class DataPacket(NamedTuple):
    name: Name
    aid: Optional[int]
    payload: Any = CONTENT
    sp: bytes = b""
    tid: int = -1


class ErrorCode(str, Enum):
    LOOP = "loop"
    NO_ROUTE = "no-route"
    NO_CONTENT = "no-content"
    LINK_FAILURE = "link-failure"


class ErrorMessage(NamedTuple):
    name: Optional[Name]
    aid: Optional[int]
    anchor: Optional[int]
    code: ErrorCode
    tid: int = -1


Destination = Union[int, Local]
Emission = tuple[Destination, Any]


@dataclass(slots=True)
class LsatEntry:
    aid_in: int
    prev_hop: Union[int, str]
    next_hop: int
    map_out: int
    distance: float
    anchor: int
    valid: bool = True
    last_used: float = 0.0


class Lsat:
    """Label Swapping with Anchors Table.

    Valid entries are indexed both by ``(aid_in, prev_hop)`` for Interests and
    by ``map_out`` for returning data and errors. Entries idle for longer than
    ``ttl`` are treated as absent and evicted on the next touch.
    """

    def __init__(self, width: int = 32, ttl: float = INF):
        self.width = width
        self.ttl = ttl
        self._by_key: dict[tuple, LsatEntry] = {}
        self._by_map: dict[int, LsatEntry] = {}
        self._next_map = 1
        self._free: deque[int] = deque()

    def __len__(self) -> int:
        return len(self._by_key)

    def entries(self) -> list[LsatEntry]:
        return list(self._by_key.values())

    def _live(self, entry: Optional[LsatEntry], now: float) -> Optional[LsatEntry]:
        if entry is not None and now - entry.last_used > self.ttl:
            self.invalidate(entry)
            return None
        return entry

    def get(self, aid: int, prev_hop, now: float = 0.0) -> Optional[LsatEntry]:
        return self._live(self._by_key.get((aid, prev_hop)), now)

    def by_map(self, map_out: int, now: float = 0.0) -> Optional[LsatEntry]:
        return self._live(self._by_map.get(map_out), now)

    def via(self, next_hop: int) -> list[LsatEntry]:
        return [e for e in self._by_key.values() if e.next_hop == next_hop]

    def aids_in_use(self) -> set[int]:
        return {aid for aid, _ in self._by_key}

    def allocate_map(self) -> int:
        """Fresh outgoing label; invalidated labels are recycled oldest first."""
        if self._free:
            return self._free.popleft()
        if self._next_map >= 1 << self.width:
            raise AidSpaceExhausted(f"all {self.width}-bit MAP values are in use")
        m = self._next_map
        self._next_map += 1
        return m

    def add(self, aid_in, prev_hop, next_hop, map_out, distance, anchor, now=0.0) -> LsatEntry:
        key = (aid_in, prev_hop)
        if key in self._by_key:
            raise ValueError(f"duplicate LSAT key {key}")
        if map_out in self._by_map:
            raise ValueError(f"MAP {map_out} already in use")
        entry = LsatEntry(aid_in, prev_hop, next_hop, map_out, distance, anchor, True, now)
        self._by_key[key] = entry
        self._by_map[map_out] = entry
        return entry

    def invalidate(self, entry: LsatEntry) -> None:
        if not entry.valid:
            return
        entry.valid = False
        del self._by_key[(entry.aid_in, entry.prev_hop)]
        del self._by_map[entry.map_out]
        self._free.append(entry.map_out)

    def expire(self, now: float) -> int:
        stale = [e for e in self._by_key.values() if now - e.last_used > self.ttl]
        for e in stale:
            self.invalidate(e)
        return len(stale)


@dataclass
class LrtEntry:
    name: Name
    consumers: set
    # anchor the name was bound to; lets nameless link-failure errors reach
    # the consumers whose flow broke
    anchor: Optional[int] = None


class RampRouter:
    def __init__(self, router_id: int, fab: dict, prt, hosted: Optional[PrefixTrie] = None,
                 cs_capacity: int = 0, aid_width: int = 32, lsat_ttl: float = INF,
                 seed: int = 0, has_content: Optional[Callable[[Name], bool]] = None):
        self.id = router_id
        self.fab = fab
        self.prt = prt
        self.hosted = hosted if hosted is not None else PrefixTrie()
        self.cs = ContentStore(cs_capacity) if cs_capacity > 0 else None
        self.lsat = Lsat(aid_width, lsat_ttl)
        self.lrt: dict[Name, LrtEntry] = {}
        self.aid_width = aid_width
        self._origin_aids: dict[int, int] = {}
        self._origin_aid_set: set[int] = set()
        self._rng = np.random.default_rng(seed)
        self._has_content = has_content
        self.lookups = {"prt": 0, "fab": 0, "lsat": 0}
        # per-retrieval tally the simulator points at before each call
        self.tally: Optional[dict] = None
        self.drops: list[tuple[str, Any]] = []

    # -- helpers ---------------------------------------------------------------

    def _count(self, kind: str) -> None:
        self.lookups[kind] += 1
        if self.tally is not None:
            self.tally[kind] += 1

    def hosts(self, name: Name) -> bool:
        if self.hosted.longest_match(name) is None:
            return False
        return self._has_content is None or self._has_content(name)

    def alf_admits(self, aid: Optional[int], prev_hop, distance: float,
                   next_hop_distance: Optional[float] = None, now: float = 0.0) -> bool:
        """Anchor-based loop-free forwarding check, strict inequality.

        Without a valid LSAT entry for ``(aid, prev_hop)`` the Interest may go
        to a next hop whose FAB distance is ``next_hop_distance`` only if the
        carried ``distance`` exceeds it; with an entry, the carried distance
        must exceed the distance stored in the entry.
        """
        entry = self.lsat.get(aid, prev_hop, now) if aid is not None else None
        if entry is None:
            return next_hop_distance is not None and distance > next_hop_distance
        return distance > entry.distance

    def allocate_origin_aid(self, anchor: int) -> int:
        aid = self._origin_aids.get(anchor)
        if aid is not None:
            return aid
        taken = self._origin_aid_set
        in_lsat = self.lsat.aids_in_use()
        space = 1 << self.aid_width
        if len(taken | in_lsat) >= space:
            raise AidSpaceExhausted(f"all {self.aid_width}-bit origin AIDs are in use")
        while True:
            aid = int(self._rng.integers(space, dtype=np.uint64))
            if aid not in taken and aid not in in_lsat:
                break
        self._origin_aids[anchor] = aid
        taken.add(aid)
        return aid

    def allocate_map(self) -> int:
        return self.lsat.allocate_map()

    def _reply(self, sender, interest: Interest, payload) -> list[Emission]:
        aid = None if isinstance(sender, Local) else interest.aid
        return [(sender, DataPacket(interest.name, aid, payload, b"", interest.tid))]

    def _error(self, sender, interest: Interest, anchor, code: ErrorCode) -> list[Emission]:
        aid = None if isinstance(sender, Local) else interest.aid
        return [(sender, ErrorMessage(interest.name, aid, anchor, code, interest.tid))]

    # -- message handlers ----------------------------------------------------------

    def on_interest(self, sender: Destination, interest: Interest, now: float = 0.0) -> list[Emission]:
        name = interest.name
        if self.cs is not None:
            payload = self.cs.get(name)
            if payload is not None:
                return self._reply(sender, interest, payload)
        if self.hosts(name):
            return self._reply(sender, interest, CONTENT)
        if interest.anchor == self.id:
            return self._error(sender, interest, self.id, ErrorCode.NO_CONTENT)

        if isinstance(sender, Local):
            self._count("prt")
            _, ranked = self.prt.resolve(name)
            if not ranked:
                return self._error(sender, interest, None, ErrorCode.NO_ROUTE)
            anchor = ranked[0][0]
            if anchor == self.id:
                return self._error(sender, interest, anchor, ErrorCode.NO_CONTENT)
            aid = self.allocate_origin_aid(anchor)
            prev = LOCAL
            carried = INF
            lrt = self.lrt.get(name)
            if lrt is None:
                self.lrt[name] = LrtEntry(name, {sender.consumer}, anchor)
            else:
                lrt.consumers.add(sender.consumer)
                lrt.anchor = anchor
        else:
            aid, anchor, carried = interest.aid, interest.anchor, interest.distance
            prev = sender

        self._count("lsat")
        entry = self.lsat.get(aid, prev, now)
        if entry is not None and (entry.anchor != anchor or not carried > entry.distance):
            # the upstream router reused this label for another flow
            self.lsat.invalidate(entry)
            entry = None
        if entry is None:
            self._count("fab")
            ranks = self.fab.get(anchor)
            if not ranks:
                return self._error(sender, interest, anchor, ErrorCode.NO_ROUTE)
            for hop, dist in ranks:
                if carried > dist:
                    entry = self.lsat.add(aid, prev, hop, self.allocate_map(), dist, anchor, now)
                    break
            else:
                return self._error(sender, interest, anchor, ErrorCode.LOOP)
        entry.last_used = now
        return [(entry.next_hop, Interest(name, entry.map_out, anchor, entry.distance, interest.tid))]

    def _match(self, sender: int, map_out: int, now: float) -> Optional[LsatEntry]:
        # a label is only ever handed to the entry's next hop; the same label
        # arriving from elsewhere belongs to a flow that has since been recycled
        entry = self.lsat.by_map(map_out, now)
        if entry is None or entry.next_hop != sender:
            return None
        return entry

    def on_data(self, sender: int, dp: DataPacket, now: float = 0.0) -> list[Emission]:
        self._count("lsat")
        entry = self._match(sender, dp.aid, now)
        if entry is None:
            self.drops.append(("unmatched-aid", dp))
            return []
        entry.last_used = now
        out: list[Emission] = []
        if entry.prev_hop == LOCAL:
            lrt = self.lrt.pop(dp.name, None)
            if lrt is None:
                self.drops.append(("no-consumer", dp))
            else:
                for c in sorted(lrt.consumers):
                    out.append((Local(c), DataPacket(dp.name, None, dp.payload, dp.sp, dp.tid)))
        else:
            out.append((entry.prev_hop, dp._replace(aid=entry.aid_in)))
        if self.cs is not None:
            self.cs.insert(dp.name, dp.payload)
        return out

    def _notify_local(self, names: Iterable[Name], anchor, code, tid) -> list[Emission]:
        out: list[Emission] = []
        for name in sorted(names):
            lrt = self.lrt.pop(name)
            for c in sorted(lrt.consumers):
                out.append((Local(c), ErrorMessage(name, None, anchor, code, tid)))
        return out

    def _names_bound_to(self, anchor) -> list[Name]:
        return [n for n, e in self.lrt.items() if e.anchor == anchor]

    def on_link_failure(self, neighbor: int, now: float = 0.0) -> list[Emission]:
        out: list[Emission] = []
        for entry in sorted(self.lsat.via(neighbor), key=lambda e: e.map_out):
            if entry.prev_hop == LOCAL:
                out += self._notify_local(self._names_bound_to(entry.anchor), entry.anchor,
                                          ErrorCode.LINK_FAILURE, -1)
            else:
                out.append((entry.prev_hop,
                            ErrorMessage(None, entry.aid_in, None, ErrorCode.LINK_FAILURE, -1)))
            self.lsat.invalidate(entry)
        return out

    def on_error(self, sender: int, err: ErrorMessage, now: float = 0.0) -> list[Emission]:
        self._count("lsat")
        entry = self._match(sender, err.aid, now)
        if entry is None:
            self.drops.append(("unmatched-aid", err))
            return []
        if entry.prev_hop == LOCAL:
            if err.name is not None:
                names = [err.name] if err.name in self.lrt else []
            else:
                names = self._names_bound_to(entry.anchor)
            out = self._notify_local(names, err.anchor, err.code, err.tid)
            if not out:
                self.drops.append(("no-consumer", err))
        else:
            out = [(entry.prev_hop, err._replace(aid=entry.aid_in))]
        self.lsat.invalidate(entry)
        return out

    def table_sizes(self) -> dict[str, int]:
        return {"prt": len(self.prt), "fab": len(self.fab), "lsat": len(self.lsat),
                "lrt": len(self.lrt)}
