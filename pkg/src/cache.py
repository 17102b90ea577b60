"""LRU cache of built cover groups.

Dimension formulas request the same block covers over and over
(every composition of r reuses the covers of its parts), so built
``CoverGroup`` objects are kept keyed by (n, q, c, r).
"""

from collections import OrderedDict
from threading import Lock
from typing import Any, Optional

from src.config import get_settings
from src.constants import LogAction
from src.logging_config import get_logger
from src.models import CocycleParams
from src.torus_cover import CoverGroup, build_cover, require_cover_budget

CoverKey = tuple[int, int, int, int]


class CoverCache:
    """Thread-safe LRU cache of cover groups.

    Attributes:
        max_size: Maximum number of covers kept
    """

    def __init__(self, max_size: int = 32) -> None:
        self._cache: OrderedDict[CoverKey, CoverGroup] = OrderedDict()
        self._max_size = max_size
        self._lock = Lock()
        self._hits = 0
        self._misses = 0

    def _enforce_size_limit(self) -> None:
        """Ensure cache doesn't exceed max size (LRU eviction)."""
        while len(self._cache) > self._max_size:
            self._cache.popitem(last=False)

    def get(self, key: CoverKey) -> Optional[CoverGroup]:
        """Retrieve a cover, marking it recently used."""
        with self._lock:
            if key in self._cache:
                self._cache.move_to_end(key)
                self._hits += 1
                return self._cache[key]
            self._misses += 1
            return None

    def set(self, key: CoverKey, value: CoverGroup) -> None:
        with self._lock:
            self._cache[key] = value
            self._cache.move_to_end(key)
            self._enforce_size_limit()

    def get_or_build(
        self, params: CocycleParams, budget: Optional[int] = None
    ) -> CoverGroup:
        """Return the cached cover for params, building it on a miss.

        The budget is enforced on hits too, so a caller with a smaller
        budget never receives a cover it could not have built.

        Args:
            params: Cocycle parameters
            budget: Enumeration budget (defaults to the configured one)

        Returns:
            The cover group for params

        Raises:
            BudgetExceededError: If the cover is too large to build
        """
        require_cover_budget(params, budget)
        key = params.cache_key()
        cover = self.get(key)
        if cover is not None:
            get_logger().debug("Cover reused", action=LogAction.CACHE_HIT, key=key)
            return cover
        cover = build_cover(params, budget)
        self.set(key, cover)
        get_logger().debug(
            "Cover built", action=LogAction.CACHE_MISS, key=key, order=cover.order
        )
        return cover

    def clear(self) -> None:
        """Clear all cache entries."""
        with self._lock:
            self._cache.clear()
            self._hits = 0
            self._misses = 0

    @property
    def size(self) -> int:
        return len(self._cache)

    @property
    def stats(self) -> dict[str, Any]:
        """Cache statistics (hits, misses, size, hit rate)."""
        total_requests = self._hits + self._misses
        hit_rate = (self._hits / total_requests * 100) if total_requests > 0 else 0

        return {
            "size": self.size,
            "max_size": self._max_size,
            "hits": self._hits,
            "misses": self._misses,
            "hit_rate": f"{hit_rate:.2f}%",
        }


# Global cache instance
_global_cache: Optional[CoverCache] = None


def get_cover_cache(max_size: Optional[int] = None) -> CoverCache:
    """Get or create the global cover cache.

    Args:
        max_size: Capacity on first creation (defaults to the configured size)
    """
    global _global_cache
    if _global_cache is None:
        _global_cache = CoverCache(max_size or get_settings().cover_cache_size)
    return _global_cache


def reset_cover_cache() -> None:
    """Drop the global cache (useful for testing)."""
    global _global_cache
    _global_cache = None
