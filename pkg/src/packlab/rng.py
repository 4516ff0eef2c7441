"""Counter-based random draws for the automaton.

Every draw is a pure function of (seed, cycle, pass_index, site), so serial,
vectorized and multi-threaded evaluation all produce the same bits. The mixer
is the 64-bit murmur3 finalizer, which is invertible and passes the usual
avalanche tests; two rounds keyed with large odd constants decorrelate the
counter components.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1

# large odd constants used to spread the counter components
K_CYCLE = 0x9E3779B97F4A7C15
K_PASS = 0xBF58476D1CE4E5B9
K_INIT = 0x94D049BB133111EB
K_SITE = 0xD6E8FEB86659FD93
K_SITE_ADD = 0x2545F4914F6CDD1D

_INV_2_53 = 1.0 / (1 << 53)


def fmix64(z: int) -> int:
    """murmur3 64-bit finalizer (scalar)."""
    z &= MASK64
    z ^= z >> 33
    z = (z * 0xFF51AFD7ED558CCD) & MASK64
    z ^= z >> 33
    z = (z * 0xC4CEB9FE1A85EC53) & MASK64
    z ^= z >> 33
    return z


def pass_key(seed: int, cycle: int, pass_index: int) -> int:
    """Per-pass base key; mixed once, shared by every site in the pass."""
    counter = (cycle * K_CYCLE + pass_index * K_PASS + K_INIT) & MASK64
    return fmix64((seed & MASK64) ^ fmix64(counter))


def site_draw(base: int, site: int) -> float:
    """Uniform draw in [0, 1) for one site under a pass key."""
    h = fmix64(base ^ ((site * K_SITE + K_SITE_ADD) & MASK64))
    return (h >> 11) * _INV_2_53


def _fmix64_np(z: np.ndarray) -> np.ndarray:
    z = z.copy()
    z ^= z >> np.uint64(33)
    z *= np.uint64(0xFF51AFD7ED558CCD)
    z ^= z >> np.uint64(33)
    z *= np.uint64(0xC4CEB9FE1A85EC53)
    z ^= z >> np.uint64(33)
    return z


def site_draws_np(base: int, sites: np.ndarray) -> np.ndarray:
    """Vectorized site_draw; bit-identical to the scalar path."""
    with np.errstate(over="ignore"):
        keys = sites.astype(np.uint64) * np.uint64(K_SITE) + np.uint64(K_SITE_ADD)
        h = _fmix64_np(np.uint64(base) ^ keys)
    return (h >> np.uint64(11)).astype(np.float64) * _INV_2_53


# Key for initial-state draws, outside the (cycle, pass) key family because
# pass_key double-mixes its counter.
K_BERNOULLI = 0xA0761D6478BD642F


def init_key(seed: int) -> int:
    """Base key for drawing an initial configuration."""
    return fmix64((seed & MASK64) ^ K_BERNOULLI)
