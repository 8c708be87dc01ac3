"""Shared service state: the loaded catalog, its index, the prompt bank and
a bounded cache of built directions. Everything is immutable after startup,
so request handlers can run concurrently without coordination beyond the
cache's own lock."""

from __future__ import annotations

import threading
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Callable, Hashable

from ..catalog import Catalog, PromptBank, load_catalog, load_prompt_bank
from ..direction import DirectionVector
from ..index import KnnIndex

DIRECTION_CACHE_SIZE = 256


class DirectionCache:
    """Small thread-safe LRU; direction building costs a retrieval pass, so
    repeated UI requests for the same prompt pair should not recompute it."""

    def __init__(self, capacity: int = DIRECTION_CACHE_SIZE):
        self._capacity = capacity
        self._entries: OrderedDict[Hashable, DirectionVector] = OrderedDict()
        self._lock = threading.Lock()

    def get_or_build(
        self, key: Hashable, builder: Callable[[], DirectionVector]
    ) -> tuple[DirectionVector, bool]:
        """Return (direction, cache_hit). The key fully determines the value."""
        with self._lock:
            if key in self._entries:
                self._entries.move_to_end(key)
                return self._entries[key], True
        value = builder()
        with self._lock:
            if key in self._entries:
                self._entries.move_to_end(key)
                return self._entries[key], True
            self._entries[key] = value
            while len(self._entries) > self._capacity:
                self._entries.popitem(last=False)
        return value, False


@dataclass
class ServiceState:
    catalog: Catalog
    index: KnnIndex
    bank: PromptBank
    directions: DirectionCache = field(default_factory=DirectionCache)


def load_state(catalog_path: str, prompts_path: str) -> ServiceState:
    catalog = load_catalog(catalog_path)
    # sharing the catalog's dim makes prompt/catalog mismatches fail at startup
    bank = load_prompt_bank(prompts_path, dim=catalog.dim)
    return ServiceState(catalog=catalog, index=KnnIndex(catalog), bank=bank)
