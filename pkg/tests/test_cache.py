import numpy as np
import scipy.sparse as sp

from core.cache import OperatorCache


def _rows(n):
    return sp.identity(n, format='csr')


def _nbytes(rows):
    return rows.data.nbytes + rows.indices.nbytes + rows.indptr.nbytes


def test_rows_are_evicted_oldest_first():
    block = _rows(20000)
    budget_mb = 1
    cache = OperatorCache(max_rows_mb=budget_mb)
    count = budget_mb * 1024 * 1024 // _nbytes(block)
    for k in range(count + 3):
        cache.set_rows(('rows', k), _rows(20000))
    assert cache.rows_cache_size <= budget_mb * 1024 * 1024
    assert cache.get_rows(('rows', 0)) is None
    assert cache.get_rows(('rows', count + 2)) is not None


def test_replacing_rows_keeps_the_total():
    cache = OperatorCache()
    cache.set_rows('laplace', _rows(100))
    cache.set_rows('laplace', _rows(100))
    assert cache.rows_cache_size == _nbytes(_rows(100))
    cache.clear()
    assert cache.rows_cache_size == 0
    assert cache.get_rows('laplace') is None


def test_stencils_are_frozen():
    cache = OperatorCache()
    stencil = np.ones((3, 3, 3)) / 27.0
    cache.set_stencil('s', stencil)
    assert not cache.get_stencil('s').flags.writeable
