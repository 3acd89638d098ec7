"""Per-run measurement records and their CSV serialization."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

TABLE_SIZES_CSV = "table_sizes.csv"
LOOKUPS_CSV = "lookups.csv"
DELAYS_CSV = "delays.csv"
INTERESTS_CSV = "interests_per_router.csv"
RUN_INFO_CSV = "run_info.csv"

TABLES = {"ramp": ("prt", "fab", "lsat", "lrt"), "ndn": ("fib", "pit")}
LOOKUP_KINDS = {"ramp": ("prt", "fab", "lsat"), "ndn": ("pit", "fib")}


@dataclass
class MetricsRecord:
    mode: str
    rate: float
    seed: int
    config: dict
    routers: list[int]
    # table -> mean post-warmup size per router, aligned with ``routers``
    table_means: dict[str, np.ndarray]
    samples: int
    issued: int
    retrievals: int
    failed: int
    delays: np.ndarray
    hops: np.ndarray
    # table kind -> per-retrieval lookup counts, aligned with ``delays``
    lookups: dict[str, np.ndarray]
    interests_forwarded: dict[int, int]
    drops: dict[str, int] = field(default_factory=dict)

    def mean_table(self, table: str) -> float:
        return float(self.table_means[table].mean())

    def lookups_per_retrieval(self, kind: str) -> float:
        counts = self.lookups[kind]
        return float(counts.mean()) if len(counts) else float("nan")

    @property
    def mean_delay(self) -> float:
        return float(self.delays.mean()) if len(self.delays) else float("nan")

    @property
    def mean_hops(self) -> float:
        return float(self.hops.mean()) if len(self.hops) else float("nan")

    @property
    def mean_interests_per_router(self) -> float:
        return float(np.mean(list(self.interests_forwarded.values())))

    def summary(self) -> dict:
        out = {"mode": self.mode, "rate": self.rate, "retrievals": self.retrievals,
               "failed": self.failed, "mean_delay_s": self.mean_delay,
               "mean_hops": self.mean_hops,
               "interests_per_router": self.mean_interests_per_router}
        for t in TABLES[self.mode]:
            out[f"mean_{t}"] = self.mean_table(t)
        for k in LOOKUP_KINDS[self.mode]:
            out[f"{k}_lookups"] = self.lookups_per_retrieval(k)
        return out


def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.9g}"
    return str(x)


def _write(path: Path, header: list[str], rows: Iterable[list]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(x) for x in row])


def write_csvs(records: list[MetricsRecord], out_dir) -> list[Path]:
    """Write the four metric families (plus run settings) for a set of runs.

    Rows are in long format keyed by ``mode`` and ``rate``, so paired RAMP and
    NDN runs sit side by side in every file.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    records = sorted(records, key=lambda r: (r.rate, r.mode))

    def table_rows():
        for r in records:
            for table in TABLES[r.mode]:
                for router, mean in zip(r.routers, r.table_means[table]):
                    yield [r.mode, r.rate, router, table, float(mean)]

    def lookup_rows():
        for r in records:
            for kind in LOOKUP_KINDS[r.mode]:
                yield [r.mode, r.rate, kind, r.lookups_per_retrieval(kind), r.retrievals]

    def delay_rows():
        for r in records:
            d = r.delays
            med = float(np.median(d)) if len(d) else float("nan")
            p95 = float(np.percentile(d, 95)) if len(d) else float("nan")
            yield [r.mode, r.rate, r.retrievals, r.failed, r.mean_delay, med, p95, r.mean_hops]

    def interest_rows():
        for r in records:
            for router in r.routers:
                yield [r.mode, r.rate, router, r.interests_forwarded.get(router, 0)]

    def info_rows():
        for r in records:
            for key in sorted(r.config):
                yield [r.mode, r.rate, key, r.config[key]]

    paths = [out / TABLE_SIZES_CSV, out / LOOKUPS_CSV, out / DELAYS_CSV, out / INTERESTS_CSV,
             out / RUN_INFO_CSV]
    _write(paths[0], ["mode", "rate", "router", "table", "mean_entries"], table_rows())
    _write(paths[1], ["mode", "rate", "table", "lookups_per_retrieval", "retrievals"], lookup_rows())
    _write(paths[2], ["mode", "rate", "retrievals", "failed", "mean_delay_s", "median_delay_s",
                      "p95_delay_s", "mean_hops"], delay_rows())
    _write(paths[3], ["mode", "rate", "router", "interests_forwarded"], interest_rows())
    _write(paths[4], ["mode", "rate", "setting", "value"], info_rows())
    return paths
