"""Request streams: Poisson arrivals per consumer router, Zipf popularity."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..names import Name

# separates the popularity permutation stream from per-router arrival streams
_PERMUTATION_STREAM = 1 << 20


@dataclass(frozen=True)
class Workload:
    consumers: tuple[int, ...]
    rate: float
    zipf_alpha: float = 0.7
    catalog: int = 100_000
    cos_per_prefix: int = 10
    seed: int = 0


class ZipfSampler:
    """Draws ranks 0..n-1 with probability proportional to (rank + 1) ** -alpha.

    Uses precomputed cumulative weights and binary search.
    """

    def __init__(self, n: int, alpha: float):
        if n < 1:
            raise ValueError("catalog must hold at least one object")
        weights = np.arange(1, n + 1, dtype=float) ** -alpha
        self.cdf = np.cumsum(weights)
        self.cdf /= self.cdf[-1]

    def probabilities(self) -> np.ndarray:
        return np.diff(self.cdf, prepend=0.0)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        u = rng.random(size)
        return np.minimum(np.searchsorted(self.cdf, u, side="right"), len(self.cdf) - 1)


def popularity_order(workload: Workload) -> np.ndarray:
    """Maps popularity rank to content-object index.

    A seeded shuffle spreads popular objects over all prefixes (and so over
    all anchors) instead of concentrating them on the first prefix block.
    """
    rng = np.random.default_rng([workload.seed, _PERMUTATION_STREAM])
    return rng.permutation(workload.catalog)


def arrival_stream(workload: Workload, router: int, horizon: float,
                   sampler: ZipfSampler, order: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Request times and object indices for one consumer router up to ``horizon``."""
    rng = np.random.default_rng([workload.seed, router])
    if workload.rate <= 0:
        return np.empty(0), np.empty(0, dtype=np.int64)
    expected = workload.rate * horizon
    block = int(expected + 6 * np.sqrt(expected) + 16)
    gaps = rng.exponential(1.0 / workload.rate, size=block)
    times = np.cumsum(gaps)
    while times[-1] < horizon:
        more = np.cumsum(rng.exponential(1.0 / workload.rate, size=block)) + times[-1]
        times = np.concatenate([times, more])
    times = times[times < horizon]
    objects = order[sampler.sample(rng, len(times))]
    return times, objects


class Catalog:
    """Names of content objects: ``<prefix>/c<k>`` for the k-th object of a prefix."""

    def __init__(self, prefixes: Sequence[Name], cos_per_prefix: int):
        self.prefixes = list(prefixes)
        self.cos_per_prefix = cos_per_prefix
        self._cache: dict[int, Name] = {}

    def __len__(self) -> int:
        return len(self.prefixes) * self.cos_per_prefix

    def name(self, index: int) -> Name:
        name = self._cache.get(index)
        if name is None:
            p, k = divmod(int(index), self.cos_per_prefix)
            name = self._cache[index] = Name(tuple(self.prefixes[p]) + (f"c{k}",))
        return name
