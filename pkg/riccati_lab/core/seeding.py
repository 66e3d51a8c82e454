"""Reproducible sub-seeds.

A run seed is expanded into one independent stream per probe index with
the splitmix64 finalizer: ``sub_seed(seed, k)`` mixes ``seed`` advanced by
``k + 1`` golden-ratio increments. Streams therefore do not depend on the
order in which probes are evaluated.
"""

import numpy as np

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(state: int) -> int:
    z = (state + _GOLDEN) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def sub_seed(seed: int, index: int) -> int:
    return splitmix64((seed + index * _GOLDEN) & _MASK)


def sub_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(sub_seed(seed, index))


def unit_probes(dim: int, count: int, seed: int, with_basis: bool = True):
    """Gaussian directions normalized to the unit sphere, canonical basis first."""
    probes = []
    if with_basis:
        probes.extend(np.eye(dim))
    for k in range(count):
        v = sub_rng(seed, k).standard_normal(dim)
        norm = np.linalg.norm(v)
        if norm > 0:
            probes.append(v / norm)
    if not probes:
        return np.zeros((0, dim))
    return np.array(probes)
