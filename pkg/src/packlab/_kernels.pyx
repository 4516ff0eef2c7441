# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled automaton and oracle kernels.

Exports the same interface as `_kernels_py`; the importing modules pick
whichever is available. Both backends must produce bit-identical results,
so the mixer below mirrors `rng.fmix64` exactly and the draw is scaled the
same way.
"""

import numpy as np

BACKEND = "cython"

cdef extern from *:
    """
    #include <stdint.h>
    static inline uint64_t packlab_fmix64(uint64_t z) {
        z ^= z >> 33;
        z *= 0xFF51AFD7ED558CCDULL;
        z ^= z >> 33;
        z *= 0xC4CEB9FE1A85EC53ULL;
        z ^= z >> 33;
        return z;
    }
    """
    unsigned long long packlab_fmix64(unsigned long long z) nogil

DEF K_SITE = 0xD6E8FEB86659FD93
DEF K_SITE_ADD = 0x2545F4914F6CDD1D
DEF INV_2_53 = 1.0 / 9007199254740992.0


def class_pass_kernel(
    unsigned char[::1] bits_ext,
    int[:, ::1] neighbors,
    int[::1] sites,
    double[::1] p_sites,
    object base_key,
):
    """Simultaneous update of one independent class, in place.

    bits_ext has one phantom trailing zero so padded neighbor rows read as
    empty. Writing class members in place is safe: no member neighbors
    another, so every neighborhood read sees pre-pass values.
    """
    cdef unsigned long long base = base_key
    cdef Py_ssize_t i, j, ns = sites.shape[0], deg = neighbors.shape[1]
    cdef int s
    cdef unsigned long long h
    cdef double draw
    cdef bint blocked
    with nogil:
        for i in range(ns):
            s = sites[i]
            blocked = False
            for j in range(deg):
                if bits_ext[neighbors[s, j]]:
                    blocked = True
                    break
            if blocked:
                bits_ext[s] = 0
            else:
                h = packlab_fmix64(
                    base ^ (<unsigned long long> s * <unsigned long long> K_SITE
                            + <unsigned long long> K_SITE_ADD)
                )
                draw = <double> (h >> 11) * INV_2_53
                bits_ext[s] = 1 if draw < p_sites[i] else 0


def semiring_matmul(
    long long[:, ::1] ao,
    long long[:, ::1] ac,
    long long[:, ::1] bo,
    long long[:, ::1] bc,
):
    """Max-plus matrix product with tie counts (see the numpy fallback)."""
    cdef Py_ssize_t n = ao.shape[0]
    boT_arr = np.ascontiguousarray(np.asarray(bo).T)
    bcT_arr = np.ascontiguousarray(np.asarray(bc).T)
    co_arr = np.empty((n, n), dtype=np.int64)
    cc_arr = np.empty((n, n), dtype=np.int64)
    cdef long long[:, ::1] boT = boT_arr
    cdef long long[:, ::1] bcT = bcT_arr
    cdef long long[:, ::1] co = co_arr
    cdef long long[:, ::1] cc = cc_arr
    cdef Py_ssize_t i, j, k
    cdef long long best, cnt, v
    with nogil:
        for i in range(n):
            for j in range(n):
                best = ao[i, 0] + boT[j, 0]
                cnt = ac[i, 0] * bcT[j, 0]
                for k in range(1, n):
                    v = ao[i, k] + boT[j, k]
                    if v > best:
                        best = v
                        cnt = ac[i, k] * bcT[j, k]
                    elif v == best:
                        cnt += ac[i, k] * bcT[j, k]
                co[i, j] = best
                cc[i, j] = cnt
    return co_arr, cc_arr
