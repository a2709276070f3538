"""Sobol low-discrepancy sequences from published direction numbers.

Direction numbers are the first rows of the Joe & Kuo table (the same data
every mainstream implementation ships), hardcoded for up to 32 dimensions.
Points are generated with 32-bit precision via the Gray-code construction, so
the sequence is the standard one: the raw sequence starts with the all-zeros
point, which callers normally skip (``skip=1`` default).
"""

from __future__ import annotations

import numpy as np

_BITS = 32

# (primitive polynomial as integer, initial direction numbers m_1..m_s).
# First entry is the one-dimensional van der Corput generator.
_JOE_KUO = (
    (1, (1,)),
    (3, (1,)),
    (7, (1, 3)),
    (11, (1, 3, 1)),
    (13, (1, 1, 1)),
    (19, (1, 1, 3, 3)),
    (25, (1, 3, 5, 13)),
    (37, (1, 1, 5, 5, 17)),
    (41, (1, 1, 5, 5, 5)),
    (47, (1, 1, 7, 11, 19)),
    (55, (1, 1, 5, 1, 1)),
    (59, (1, 1, 1, 3, 11)),
    (61, (1, 3, 5, 5, 31)),
    (67, (1, 3, 3, 9, 7, 49)),
    (91, (1, 1, 1, 15, 21, 21)),
    (97, (1, 3, 1, 13, 27, 49)),
    (103, (1, 1, 1, 15, 7, 5)),
    (109, (1, 3, 1, 15, 13, 25)),
    (115, (1, 1, 5, 5, 19, 61)),
    (131, (1, 3, 7, 11, 23, 15, 103)),
    (137, (1, 3, 7, 13, 13, 15, 69)),
    (143, (1, 1, 3, 13, 7, 35, 63)),
    (145, (1, 3, 5, 9, 1, 25, 53)),
    (157, (1, 3, 1, 13, 9, 35, 107)),
    (167, (1, 3, 1, 5, 27, 61, 31)),
    (171, (1, 1, 5, 11, 19, 41, 61)),
    (185, (1, 3, 5, 3, 3, 13, 69)),
    (191, (1, 1, 7, 13, 1, 19, 1)),
    (193, (1, 3, 7, 5, 13, 19, 59)),
    (203, (1, 1, 3, 9, 25, 29, 41)),
    (211, (1, 3, 5, 13, 23, 1, 55)),
    (213, (1, 3, 7, 3, 13, 59, 17)),
)

MAX_DIM = len(_JOE_KUO)


class SobolError(ValueError):
    pass


def _direction_integers(dim_index: int) -> np.ndarray:
    """32 direction integers (already shifted into the high bits) for one axis."""
    poly, m_init = _JOE_KUO[dim_index]
    v = np.zeros(_BITS + 1, dtype=np.uint64)
    if dim_index == 0:
        for k in range(1, _BITS + 1):
            v[k] = np.uint64(1 << (_BITS - k))
        return v[1:]
    s = poly.bit_length() - 1
    a = (poly >> 1) & ((1 << (s - 1)) - 1) if s > 1 else 0
    for k in range(1, min(s, _BITS) + 1):
        v[k] = np.uint64(m_init[k - 1] << (_BITS - k))
    for k in range(s + 1, _BITS + 1):
        vk = v[k - s] ^ (v[k - s] >> np.uint64(s))
        for i in range(1, s):
            if (a >> (s - 1 - i)) & 1:
                vk ^= v[k - i]
        v[k] = vk
    return v[1:]


def direction_table(dim: int) -> np.ndarray:
    """(dim, 32) array of direction integers."""
    if dim < 1:
        raise SobolError("dimension must be at least 1")
    if dim > MAX_DIM:
        raise SobolError(
            f"dimension {dim} exceeds the built-in direction-number table ({MAX_DIM})")
    return np.vstack([_direction_integers(j) for j in range(dim)])


def sobol_sequence(dim: int, n: int, skip: int = 1) -> np.ndarray:
    """First ``n`` points of the ``dim``-dimensional Sobol sequence in [0,1)^dim.

    ``skip`` is the index of the first emitted point; the default of 1 drops
    the all-zeros point.  Evaluation uses the Gray code of each index
    directly, so any window of the sequence can be produced without state.
    """
    if n < 0:
        raise SobolError("point count must be non-negative")
    if skip < 0:
        raise SobolError("skip must be non-negative")
    v = direction_table(dim)
    idx = np.arange(skip, skip + n, dtype=np.uint64)
    gray = idx ^ (idx >> np.uint64(1))
    acc = np.zeros((n, dim), dtype=np.uint64)
    for bit in range(_BITS):
        mask = ((gray >> np.uint64(bit)) & np.uint64(1)).astype(bool)
        if mask.any():
            acc[mask] ^= v[:, bit]
    return acc.astype(np.float64) / float(1 << _BITS)
