from __future__ import annotations

from dataclasses import dataclass, fields, replace
from typing import Optional, Sequence

from ..control_plane import AnchorAssignment, Topology
from .workload import Workload

MODES = ("ramp", "ndn")


class ConfigInvalid(ValueError):
    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


def parse_cache(spec: str) -> int:
    """``"none"`` -> 0, ``"lru:N"`` -> N."""
    if spec == "none":
        return 0
    kind, _, size = spec.partition(":")
    if kind != "lru" or not size.isdigit() or int(size) < 1:
        raise ConfigInvalid("cache", f"expected 'none' or 'lru:N', got {spec!r}")
    return int(size)


@dataclass
class Scenario:
    """Everything a simulation run depends on. Runs are pure functions of it."""

    topology: Topology
    anchors: AnchorAssignment
    consumers: tuple[int, ...] = ()
    mode: str = "ramp"
    rate: float = 100.0
    zipf_alpha: float = 0.7
    catalog: int = 100_000
    cos_per_prefix: int = 10
    cache: str = "none"
    seed: int = 0
    horizon: float = 30.0
    warmup: Optional[float] = None
    sample_interval: float = 0.1
    rto: float = 1.0
    max_retx: int = 3
    pit_lifetime: float = 2.0
    lsat_ttl: Optional[float] = None
    aid_width: int = 32
    interest_bytes: int = 64
    data_bytes: int = 1064
    error_bytes: int = 64
    # (time, router_u, router_v)
    failures: Sequence[tuple[float, int, int]] = ()
    # (severity, seed) applied to the FABs before the run; RAMP only
    inconsistency: Optional[tuple[float, int]] = None
    # explicit (time, router, name) requests replacing the generated workload
    requests: Optional[Sequence[tuple]] = None
    trace: bool = False

    @property
    def effective_warmup(self) -> float:
        return 0.1 * self.horizon if self.warmup is None else self.warmup

    @property
    def effective_lsat_ttl(self) -> float:
        return 10 * self.rto if self.lsat_ttl is None else self.lsat_ttl

    @property
    def cache_capacity(self) -> int:
        return parse_cache(self.cache)

    @property
    def workload(self) -> Workload:
        return Workload(tuple(self.consumers), self.rate, self.zipf_alpha, self.catalog,
                        self.cos_per_prefix, self.seed)

    def with_(self, **changes) -> "Scenario":
        return replace(self, **changes)

    def validate(self) -> None:
        routers = self.topology.routers
        if self.mode not in MODES:
            raise ConfigInvalid("mode", f"must be one of {MODES}, got {self.mode!r}")
        parse_cache(self.cache)
        if not routers:
            raise ConfigInvalid("topology", "no routers")
        for a in self.anchors.anchors:
            if a not in routers:
                raise ConfigInvalid("anchors", f"anchor {a} is not a router")
        for c in self.consumers:
            if c not in routers:
                raise ConfigInvalid("consumers", f"consumer router {c} is not a router")
        positive = ("horizon", "sample_interval", "rto", "pit_lifetime", "cos_per_prefix", "catalog")
        for name in positive:
            if not getattr(self, name) > 0:
                raise ConfigInvalid(name, "must be positive")
        if self.rate < 0:
            raise ConfigInvalid("rate", "must be non-negative")
        if self.max_retx < 0:
            raise ConfigInvalid("max_retx", "must be non-negative")
        if not 0 <= self.effective_warmup < self.horizon:
            raise ConfigInvalid("warmup", "must lie in [0, horizon)")
        if not 1 <= self.aid_width <= 64:
            raise ConfigInvalid("aid_width", "must lie in [1, 64]")
        if self.requests is None and self.consumers:
            n_prefixes = len(self.anchors.prefixes)
            if self.catalog > n_prefixes * self.cos_per_prefix:
                raise ConfigInvalid(
                    "catalog", f"{self.catalog} objects exceed {n_prefixes} prefixes x "
                    f"{self.cos_per_prefix} objects per prefix")
        for t, u, v in self.failures:
            if not self.topology.has_link(u, v):
                raise ConfigInvalid("failures", f"no link {u}-{v}")
            if t < 0:
                raise ConfigInvalid("failures", "failure time must be non-negative")
        if self.inconsistency is not None:
            severity, _ = self.inconsistency
            if not 0 <= severity <= 1:
                raise ConfigInvalid("inconsistency", "severity must lie in [0, 1]")

    def describe(self) -> dict:
        """Scalar settings, for run headers."""
        out = {}
        for f in fields(self):
            if f.name in ("topology", "anchors", "requests", "failures", "consumers"):
                continue
            out[f.name] = getattr(self, f.name)
        out["warmup"] = self.effective_warmup
        out["lsat_ttl"] = self.effective_lsat_ttl
        out["routers"] = len(self.topology.routers)
        out["links"] = len(self.topology.links)
        out["consumer_routers"] = len(self.consumers)
        out["anchor_routers"] = len(self.anchors.anchors)
        out["prefixes"] = len(self.anchors.prefixes)
        out["failures"] = len(self.failures)
        return out
