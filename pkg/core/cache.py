"""
core/cache.py - Memory management and caching of discrete operators
"""

import threading
from typing import Any, Dict, Hashable, Optional

import numpy as np


class OperatorCache:
    """Centralized cache for kernels, stencils and sparse operators to avoid re-assembly"""

    def __init__(self, max_factor_mb: int = 512, max_rows_mb: int = 256):
        self._lock = threading.RLock()
        self.max_factor_bytes = max_factor_mb * 1024 * 1024
        self.max_rows_bytes = max_rows_mb * 1024 * 1024

        # Convolution kernels
        self._cauchy_cache: Dict[Hashable, np.ndarray] = {}
        self._stencil_cache: Dict[Hashable, np.ndarray] = {}

        # Sparse operators, each under its own byte budget
        self._rows_cache: Dict[Hashable, Any] = {}
        self._rows_bytes: Dict[Hashable, int] = {}
        self._rows_cache_size = 0
        self._factor_cache: Dict[Hashable, Any] = {}
        self._factor_bytes: Dict[Hashable, int] = {}
        self._factor_cache_size = 0

    def clear(self):
        """Clear all caches"""
        with self._lock:
            self._cauchy_cache.clear()
            self._stencil_cache.clear()
            self._rows_cache.clear()
            self._rows_bytes.clear()
            self._rows_cache_size = 0
            self._factor_cache.clear()
            self._factor_bytes.clear()
            self._factor_cache_size = 0

    def get_cauchy_kernel(self, key: Hashable) -> Optional[np.ndarray]:
        return self._cauchy_cache.get(key)

    def set_cauchy_kernel(self, key: Hashable, kernel: np.ndarray):
        with self._lock:
            kernel.setflags(write=False)
            self._cauchy_cache[key] = kernel

    def get_stencil(self, key: Hashable) -> Optional[np.ndarray]:
        return self._stencil_cache.get(key)

    def set_stencil(self, key: Hashable, stencil: np.ndarray):
        with self._lock:
            stencil.setflags(write=False)
            self._stencil_cache[key] = stencil

    @property
    def rows_cache_size(self) -> int:
        return self._rows_cache_size

    @property
    def factor_cache_size(self) -> int:
        return self._factor_cache_size

    def get_rows(self, key: Hashable) -> Optional[Any]:
        """Get cached sparse operator rows or None"""
        return self._rows_cache.get(key)

    def set_rows(self, key: Hashable, rows: Any):
        """Cache sparse rows with memory management"""
        with self._lock:
            self._rows_cache_size = self._store(self._rows_cache, self._rows_bytes, self._rows_cache_size,
                                                self.max_rows_bytes, key, rows, self._rows_nbytes(rows))

    def get_factor(self, key: Hashable) -> Optional[Any]:
        """Get a cached sparse LU factorization or None"""
        return self._factor_cache.get(key)

    def set_factor(self, key: Hashable, factor: Any):
        """Cache a factorization with memory management"""
        with self._lock:
            self._factor_cache_size = self._store(self._factor_cache, self._factor_bytes, self._factor_cache_size,
                                                  self.max_factor_bytes, key, factor, self._factor_nbytes(factor))

    @staticmethod
    def _store(cache: Dict[Hashable, Any], sizes: Dict[Hashable, int], used: int, budget: int,
               key: Hashable, value: Any, nbytes: int) -> int:
        """Insert under a byte budget, evicting the oldest entries first; returns the new total"""
        if key in cache:
            cache.pop(key)
            used -= sizes.pop(key)
        # Simple FIFO eviction
        while cache and used + nbytes > budget:
            oldest = next(iter(cache))
            cache.pop(oldest)
            used -= sizes.pop(oldest)
        cache[key] = value
        sizes[key] = nbytes
        return used + nbytes

    @staticmethod
    def _rows_nbytes(rows: Any) -> int:
        parts = (getattr(rows, name, None) for name in ('data', 'indices', 'indptr'))
        return int(sum(part.nbytes for part in parts if part is not None))

    @staticmethod
    def _factor_nbytes(factor: Any) -> int:
        L = getattr(factor, 'L', None)
        U = getattr(factor, 'U', None)
        if L is None or U is None:
            return 0
        return int(L.data.nbytes + U.data.nbytes)


default_cache = OperatorCache()
