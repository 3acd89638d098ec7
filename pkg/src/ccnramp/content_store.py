from __future__ import annotations

from collections import OrderedDict
from typing import Any, Optional

from .names import Name


class ContentStore:
    """Exact-name LRU cache of content objects, bounded by object count."""

    def __init__(self, capacity: int):
        if capacity < 0:
            raise ValueError("capacity must be non-negative")
        self.capacity = capacity
        self._entries: OrderedDict[Name, Any] = OrderedDict()

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, name: Name) -> bool:
        return name in self._entries

    def get(self, name: Name) -> Optional[Any]:
        """Return the cached payload and mark it most recently used, or None."""
        try:
            self._entries.move_to_end(name)
        except KeyError:
            return None
        return self._entries[name]

    def insert(self, name: Name, payload: Any) -> Optional[Name]:
        """Cache ``payload``; returns the evicted name, if any."""
        if self.capacity == 0:
            return None
        if name in self._entries:
            self._entries.move_to_end(name)
            self._entries[name] = payload
            return None
        evicted = None
        if len(self._entries) >= self.capacity:
            evicted, _ = self._entries.popitem(last=False)
        self._entries[name] = payload
        return evicted

    def names(self) -> list[Name]:
        """Names from least to most recently used."""
        return list(self._entries)
