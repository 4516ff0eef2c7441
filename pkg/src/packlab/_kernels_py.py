"""Vectorized automaton kernel, NumPy fallback backend.

The compiled extension `_kernels` exports the same interface; the engine
picks whichever is importable. Both must produce bit-identical states.
"""

from __future__ import annotations

import numpy as np

from . import rng

BACKEND = "numpy"


def class_pass_kernel(
    bits_ext: np.ndarray,
    neighbors: np.ndarray,
    sites: np.ndarray,
    p_sites: np.ndarray,
    base_key: int,
) -> None:
    """Simultaneous update of one independent class, in place.

    bits_ext has one phantom trailing zero so padded neighbor rows read as
    empty. Writing class members in place is safe: no member neighbors
    another, so every neighborhood read sees pre-pass values.
    """
    draws = rng.site_draws_np(base_key, sites)
    blocked = bits_ext[neighbors[sites]].any(axis=1)
    bits_ext[sites] = (draws < p_sites) & ~blocked


def semiring_matmul(
    ao: np.ndarray,
    ac: np.ndarray,
    bo: np.ndarray,
    bc: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Max-plus matrix product with tie counts.

    Entry (i, j) of the result holds the best value of ao[i, k] + bo[k, j]
    over k and the number of k attaining it, weighted by the counts ac and
    bc. Chunked along j to bound the broadcast workspace.
    """
    n = ao.shape[0]
    co = np.empty((n, n), dtype=np.int64)
    cc = np.empty((n, n), dtype=np.int64)
    chunk = max(1, (1 << 22) // max(1, n * n))
    for j0 in range(0, n, chunk):
        v = ao[:, :, None] + bo[None, :, j0 : j0 + chunk]  # (i, k, j)
        mx = v.max(axis=1)
        co[:, j0 : j0 + chunk] = mx
        hit = v == mx[:, None, :]
        prod = ac[:, :, None] * bc[None, :, j0 : j0 + chunk]
        cc[:, j0 : j0 + chunk] = (prod * hit).sum(axis=1)
    return co, cc
