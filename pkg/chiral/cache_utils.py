"""
Caching utilities for the exact-diagonalization oracle

Provides cache key generation, TTL strategies and a decorator for solver
results that are expensive to recompute inside a sweep.
"""

import hashlib
import json
from functools import wraps

from django.core.cache import cache


# Cache TTL (Time to Live) strategies
CACHE_TTL = {
    'ed_ground_state': 86400,  # 24 hours - deterministic for fixed inputs
    'ed_sector_scan': 86400,  # 24 hours
}


def params_hash(p, *extra):
    """Deterministic short hash of a parameter tuple plus any extra arguments"""
    payload = json.dumps([p.as_row(), *[repr(item) for item in extra]], sort_keys=True)
    return hashlib.md5(payload.encode()).hexdigest()[:16]


def get_ground_state_cache_key(p, basis=None):
    """Generate cache key for an ED ground state (basis None means the suggested cutoffs)"""
    return f"ed_ground_state:{params_hash(p, basis)}"


def get_sector_scan_cache_key(p, basis, sectors):
    """Generate cache key for a list of per-sector lowest energies"""
    return f"ed_sector_scan:{params_hash(p, basis, tuple(sectors))}"


def invalidate_ground_state(p, basis=None):
    """Drop a memoised ground state"""
    cache.delete(get_ground_state_cache_key(p, basis))


def cache_function_result(cache_key_func, ttl_key='ed_ground_state'):
    """
    Decorator to cache function results

    Args:
        cache_key_func: Function that generates cache key from function args
        ttl_key: Key in CACHE_TTL dict for expiration time

    Usage:
        @cache_function_result(get_ground_state_cache_key)
        def cached_ground_state(p, basis=None):
            ...
    """
    def decorator(func):
        @wraps(func)
        def wrapper(*args, **kwargs):
            cache_key = cache_key_func(*args, **kwargs)

            cached_result = cache.get(cache_key)
            if cached_result is not None:
                return cached_result

            result = func(*args, **kwargs)

            ttl = CACHE_TTL.get(ttl_key, 3600)
            cache.set(cache_key, result, ttl)
            return result
        return wrapper
    return decorator
