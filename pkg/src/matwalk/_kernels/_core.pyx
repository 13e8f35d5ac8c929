# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernels.

Operation-for-operation mirror of ``pure.py``: identical floating-point
evaluation order and the same per-excursion xoshiro256++/splitmix64 stream,
so both backends return identical values.
"""

from libc.math cimport exp as cexp, log, sqrt, INFINITY

import numpy as np
cimport numpy as cnp

cnp.import_array()

IS_COMPILED = True

cdef extern from *:
    """
    #include <stdint.h>
    """
    ctypedef unsigned long long uint64_t

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL


cdef inline uint64_t _mix64(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9UL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBUL
    return z ^ (z >> 31)


cdef inline void _stream_state(uint64_t seed, uint64_t index, uint64_t* s) noexcept nogil:
    cdef uint64_t x = seed ^ _mix64((index + 1) * GOLDEN)
    cdef int i
    for i in range(4):
        x = x + GOLDEN
        s[i] = _mix64(x)
    if (s[0] | s[1] | s[2] | s[3]) == 0:
        s[0] = GOLDEN


cdef inline uint64_t _rotl(uint64_t x, int k) noexcept nogil:
    return (x << k) | (x >> (64 - k))


cdef inline double _next_double(uint64_t* s) noexcept nogil:
    cdef uint64_t result = _rotl(s[0] + s[3], 23) + s[0]
    cdef uint64_t t = s[1] << 17
    s[2] ^= s[0]
    s[3] ^= s[1]
    s[1] ^= s[2]
    s[0] ^= s[3]
    s[2] ^= t
    s[3] = _rotl(s[3], 45)
    return (result >> 11) * (2.0 ** -53)


def prod21_log_e1(theta, int m, int n):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] th = np.ascontiguousarray(theta, dtype=np.float64)
    if n >= th.shape[0]:
        raise ValueError("theta array too short for requested n")
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.full(n + 1, np.nan)
    cdef double u1 = 1.0, u2 = 0.0, scale = 0.0, t
    cdef int s
    out[m] = 0.0
    for s in range(m + 1, n + 1):
        t = th[s] * (u1 + u2)
        u2 = u1 / t
        u1 = 1.0
        scale += log(t)
        out[s] = scale
    return out


def prod12_log_rows(theta, int anchor):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] th = np.ascontiguousarray(theta, dtype=np.float64)
    if anchor >= th.shape[0]:
        raise ValueError("theta array too short for requested anchor")
    if anchor < 1:
        raise ValueError("anchor must be >= 1")
    cdef cnp.ndarray[cnp.float64_t, ndim=1] log_y1 = np.full(anchor + 2, np.nan)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] log_y2 = np.full(anchor + 2, np.nan)
    cdef double r11 = 1.0, r12 = 0.0, r21 = 0.0, r22 = 1.0
    cdef double scale = 0.0, n11, n12, norm
    cdef int s
    log_y1[anchor + 1] = 0.0
    log_y2[anchor + 1] = -INFINITY
    for s in range(anchor, 1, -1):
        n11 = th[s] * (r11 + r21)
        n12 = th[s] * (r12 + r22)
        r21 = r11
        r22 = r12
        r11 = n11
        r12 = n12
        norm = r11 if r11 > r12 else r12
        r11 /= norm
        r12 /= norm
        r21 /= norm
        r22 /= norm
        scale += log(norm)
        log_y1[s] = scale + (log(r11) if r11 > 0.0 else -INFINITY)
        log_y2[s] = scale + (log(r12) if r12 > 0.0 else -INFINITY)
    return log_y1, log_y2


def simulate_excursions(up_prob, int up_jump, int down_jump,
                        long long n_excursions, unsigned long long seed,
                        long long index_offset, long long step_cap,
                        long long height_cap):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] up = np.ascontiguousarray(up_prob, dtype=np.float64)
    if up.shape[0] < height_cap + 1:
        raise ValueError("up_prob must cover states up to height_cap")
    cdef cnp.ndarray[cnp.int64_t, ndim=1] counts = np.zeros(height_cap + 1, dtype=np.int64)
    cdef long long censored_step = 0, censored_height = 0
    cdef long long e, steps, state, mx
    cdef uint64_t s[4]
    cdef double* up_p = <double*> up.data
    cdef cnp.int64_t* counts_p = <cnp.int64_t*> counts.data
    with nogil:
        for e in range(n_excursions):
            _stream_state(seed, <uint64_t> (index_offset + e), s)
            state = 2
            mx = 2
            steps = 0
            while True:
                if steps >= step_cap:
                    censored_step += 1
                    break
                if _next_double(s) < up_p[state]:
                    state += up_jump
                    if state > height_cap:
                        censored_height += 1
                        break
                    if state > mx:
                        mx = state
                else:
                    state -= down_jump
                    if state < 2:
                        counts_p[mx] += 1
                        break
                steps += 1
    return counts, int(censored_step), int(censored_height)


def simulate_hitting(up_prob, int up_jump, int down_jump, long long m,
                     long long n, long long trials, unsigned long long seed,
                     long long index_offset):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] up = np.ascontiguousarray(up_prob, dtype=np.float64)
    if up.shape[0] < n:
        raise ValueError("up_prob must cover states up to n-1")
    if not (0 <= m < 2 <= n):
        raise ValueError("need m < 2 <= n with start state 2 strictly inside")
    cdef long long at_n = 0, at_n1 = 0, at_low = 0
    cdef long long e, state
    cdef uint64_t s[4]
    cdef double* up_p = <double*> up.data
    with nogil:
        for e in range(trials):
            _stream_state(seed, <uint64_t> (index_offset + e), s)
            state = 2
            while True:
                if _next_double(s) < up_p[state]:
                    state += up_jump
                    if state >= n:
                        if state == n:
                            at_n += 1
                        else:
                            at_n1 += 1
                        break
                else:
                    state -= down_jump
                    if state <= m:
                        at_low += 1
                        break
    return int(at_n), int(at_n1), int(at_low)


def sandwich_scan(a, b, d, double slack=1e-9):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] aa = np.ascontiguousarray(a, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] bb = np.ascontiguousarray(b, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] dd = np.ascontiguousarray(d, dtype=np.float64)
    cdef int k_max = aa.shape[0] - 1
    cdef cnp.ndarray[cnp.float64_t, ndim=1] rho = np.empty(k_max + 1)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] lmax = np.zeros(k_max + 1)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] lmin = np.zeros(k_max + 1)
    cdef int k, m
    cdef double lr, ld
    for k in range(1, k_max + 1):
        rho[k] = 0.5 * (aa[k] + sqrt(aa[k] * aa[k] + 4.0 * bb[k] * dd[k]))
    for k in range(2, k_max + 1):
        lr = log(rho[k] / rho[k - 1])
        ld = log(dd[k] / dd[k - 1])
        lmax[k] = lmax[k - 1] + (lr if lr > ld else ld)
        lmin[k] = lmin[k - 1] + (lr if lr < ld else ld)
    cdef long long violations = 0
    cdef double worst = -INFINITY
    cdef double p11, p12, p21, p22, n11, n12, n21, n22
    cdef double tr, det, disc, ratio, gamma, zeta, lo, hi, exc
    for m in range(1, k_max + 1):
        p11 = 1.0
        p12 = 0.0
        p21 = 0.0
        p22 = 1.0
        for k in range(m, k_max + 1):
            n11 = (aa[k] * p11 + bb[k] * p21) / rho[k]
            n12 = (aa[k] * p12 + bb[k] * p22) / rho[k]
            n21 = dd[k] * p11 / rho[k]
            n22 = dd[k] * p12 / rho[k]
            p11 = n11
            p12 = n12
            p21 = n21
            p22 = n22
            tr = p11 + p22
            det = p11 * p22 - p12 * p21
            disc = tr * tr - 4.0 * det
            if disc < 0.0:
                disc = 0.0
            ratio = 0.5 * (tr + sqrt(disc))
            lr = log(rho[m] / rho[k])
            ld = log(dd[m] / dd[k])
            gamma = cexp(lmax[k] - lmax[m] + (lr if lr > ld else ld))
            zeta = cexp(lmin[k] - lmin[m] + (lr if lr < ld else ld))
            lo = (zeta - ratio) / zeta
            hi = (ratio - gamma) / gamma
            exc = lo if lo > hi else hi
            if exc > worst:
                worst = exc
            if exc > slack:
                violations += 1
    return int(violations), worst
