"""Event queue and point-to-point link model."""

from __future__ import annotations

import heapq
from typing import Any, NamedTuple

PACKET_ARRIVAL = "packet-arrival"
CONSUMER_REQUEST = "consumer-request"
TIMER = "timer"
LINK_FAILURE = "link-failure"
METRIC_SAMPLE = "metric-sample"


class Event(NamedTuple):
    time: float
    sequence: int
    kind: str
    payload: Any


class CausalityError(RuntimeError):
    pass


class EventQueue:
    """Events pop in (time, sequence) order; sequence numbers are assigned at scheduling."""

    def __init__(self) -> None:
        self._heap: list[Event] = []
        self._seq = 0
        self.now = 0.0

    def __len__(self) -> int:
        return len(self._heap)

    def schedule(self, time: float, kind: str, payload: Any = None) -> Event:
        if time < self.now:
            raise CausalityError(f"event at {time} scheduled in the past (now={self.now})")
        ev = Event(time, self._seq, kind, payload)
        self._seq += 1
        heapq.heappush(self._heap, ev)
        return ev

    def pop(self) -> Event:
        ev = heapq.heappop(self._heap)
        if ev.time < self.now:
            raise CausalityError(f"event at {ev.time} processed after {self.now}")
        self.now = ev.time
        return ev

    def peek_time(self) -> float:
        return self._heap[0].time if self._heap else float("inf")

    def pending(self) -> list[Event]:
        return sorted(self._heap)


class LinkState:
    """Bidirectional link with one FIFO transmitter per direction.

    A packet of ``bits`` handed over at ``now`` starts serializing at
    ``max(now, busy_until)`` and arrives ``bits / rate + delay`` later.
    """

    __slots__ = ("endpoints", "delay", "rate", "busy_until", "up")

    def __init__(self, u: int, v: int, delay: float, rate: float):
        self.endpoints = (u, v)
        self.delay = delay
        self.rate = rate
        self.busy_until = {u: 0.0, v: 0.0}
        self.up = True

    def transmit(self, sender: int, bits: float, now: float) -> float:
        start = self.busy_until[sender]
        if start < now:
            start = now
        done = start + bits / self.rate
        self.busy_until[sender] = done
        return done + self.delay
