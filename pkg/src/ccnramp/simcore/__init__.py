"""Discrete-event simulation of RAMP and NDN forwarding over one topology."""

from .audit import (audit_conservation, audit_interest_paths, audit_reverse_paths,
                    parse_trace)
from .engine import CausalityError, Event, EventQueue, LinkState
from .metrics import MetricsRecord, write_csvs
from .scenario import ConfigInvalid, Scenario, parse_cache
from .sim import RunResult, Simulator, run
from .workload import Catalog, Workload, ZipfSampler

__all__ = [
    "audit_conservation", "audit_interest_paths", "audit_reverse_paths", "parse_trace",
    "CausalityError", "Event", "EventQueue", "LinkState", "MetricsRecord", "write_csvs",
    "ConfigInvalid", "Scenario", "parse_cache", "RunResult", "Simulator", "run",
    "Catalog", "Workload", "ZipfSampler",
]
