# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled enumeration kernels.

Contracts and enumeration order match the numpy reference in _fallback.py;
this module exists because the simplex-grid oracles and the exhaustive
quantizer searches run hundreds of millions of tiny evaluations.
"""

from libc.math cimport log, INFINITY

import numpy as np

cimport numpy as cnp

cnp.import_array()

ctypedef cnp.int64_t i64


cdef inline double _xlnx(double v) noexcept nogil:
    return v * log(v) if v > 0.0 else 0.0


cdef inline double _eval_point(int mode, const double[::1] px, const i64[::1] cnt, Py_ssize_t m,
                               const double[::1] tab, const double[:, ::1] dtab,
                               double target, long steps) noexcept nogil:
    cdef Py_ssize_t x, x2
    cdef double val = 0.0
    cdef double best, E, obj, Pc, t, dval, c
    cdef unsigned int mask, nmask
    cdef bint dup
    if mode == 0:
        for x in range(m):
            val += px[x] * tab[cnt[x]]
        return val
    if mode == 1:
        for x in range(m):
            val += px[x] * dtab[x, cnt[x]]
        return val

    # mode 2: min over success profiles meeting the mean budget `target`
    best = INFINITY
    nmask = 1u << m
    for mask in range(nmask):
        E = 0.0
        obj = 0.0
        for x in range(m):
            if (mask >> x) & 1u:
                E += px[x]
                obj += px[x] * tab[cnt[x]]
            else:
                E += px[x] * (<double> cnt[x] / steps)
        if obj >= best:
            continue
        if E >= target - 1e-12:
            best = obj
            continue
        for x in range(m):
            if (mask >> x) & 1u:
                continue
            if cnt[x] == 0:
                continue
            dup = False
            for x2 in range(x):
                if not ((mask >> x2) & 1u) and cnt[x2] == cnt[x]:
                    dup = True
                    break
            if dup:
                continue
            Pc = 0.0
            for x2 in range(m):
                if not ((mask >> x2) & 1u) and cnt[x2] == cnt[x]:
                    Pc += px[x2]
            c = <double> cnt[x] / steps
            t = c + (target - E) / Pc
            if t > 1.0 + 1e-12:
                continue
            if t >= 1.0:
                dval = -log(c)
            else:
                dval = t * log(t / c) + (1.0 - t) * log((1.0 - t) / (1.0 - c))
            if obj + Pc * dval < best:
                best = obj + Pc * dval
    return best


def _grid_scan(object inc_arr, object px_arr, long steps, int mode,
               object tab_arr, object dtab_arr, double target):
    inc_np = np.ascontiguousarray(inc_arr, dtype=np.uint8)
    px_np = np.ascontiguousarray(px_arr, dtype=np.float64)
    tab_np = np.ascontiguousarray(tab_arr, dtype=np.float64)
    if dtab_arr is None:
        dtab_np = np.zeros((1, 1))
    else:
        dtab_np = np.ascontiguousarray(dtab_arr, dtype=np.float64)

    cdef const cnp.uint8_t[:, ::1] inc = inc_np
    cdef const double[::1] px = px_np
    cdef const double[::1] tab = tab_np
    cdef const double[:, ::1] dtab = dtab_np
    cdef Py_ssize_t m = inc.shape[0]
    cdef Py_ssize_t n = inc.shape[1]

    cnt_np = np.zeros(m, dtype=np.int64)
    delta_np = np.zeros(m, dtype=np.int64)
    cdef i64[::1] cnt = cnt_np
    cdef i64[::1] delta = delta_np

    cdef double best = INFINITY
    cdef double val
    cdef long b0 = 0, b1 = 0, b2 = 0
    cdef long c0, c1, c2, r1, r2
    cdef Py_ssize_t x

    if n > 4 or n < 1:
        raise ValueError(f"grid scan supports 1 <= n <= 4, got n = {n}")

    with nogil:
        if n == 1:
            for x in range(m):
                cnt[x] = steps if inc[x, 0] else 0
            best = _eval_point(mode, px, cnt, m, tab, dtab, target, steps)
        elif n == 2:
            for x in range(m):
                cnt[x] = steps if inc[x, 1] else 0
                delta[x] = (<long> inc[x, 0]) - (<long> inc[x, 1])
            for c0 in range(steps + 1):
                val = _eval_point(mode, px, cnt, m, tab, dtab, target, steps)
                if val < best:
                    best = val
                    b0 = c0
                for x in range(m):
                    cnt[x] += delta[x]
        elif n == 3:
            for c0 in range(steps + 1):
                r1 = steps - c0
                for x in range(m):
                    cnt[x] = c0 * (<long> inc[x, 0]) + r1 * (<long> inc[x, 2])
                    delta[x] = (<long> inc[x, 1]) - (<long> inc[x, 2])
                for c1 in range(r1 + 1):
                    val = _eval_point(mode, px, cnt, m, tab, dtab, target, steps)
                    if val < best:
                        best = val
                        b0 = c0
                        b1 = c1
                    for x in range(m):
                        cnt[x] += delta[x]
        else:
            for c0 in range(steps + 1):
                r1 = steps - c0
                for c1 in range(r1 + 1):
                    r2 = r1 - c1
                    for x in range(m):
                        cnt[x] = (c0 * (<long> inc[x, 0]) + c1 * (<long> inc[x, 1])
                                  + r2 * (<long> inc[x, 3]))
                        delta[x] = (<long> inc[x, 2]) - (<long> inc[x, 3])
                    for c2 in range(r2 + 1):
                        val = _eval_point(mode, px, cnt, m, tab, dtab, target, steps)
                        if val < best:
                            best = val
                            b0 = c0
                            b1 = c1
                            b2 = c2
                        for x in range(m):
                            cnt[x] += delta[x]

    if n == 1:
        counts = np.array([steps], dtype=np.int64)
    elif n == 2:
        counts = np.array([b0, steps - b0], dtype=np.int64)
    elif n == 3:
        counts = np.array([b0, b1, steps - b0 - b1], dtype=np.int64)
    else:
        counts = np.array([b0, b1, b2, steps - b0 - b1 - b2], dtype=np.int64)
    return float(best), counts


def grid_min_guaranteed(inc, px, long steps):
    tab = np.empty(steps + 1)
    tab[0] = np.inf
    tab[1:] = -np.log(np.arange(1, steps + 1) / steps)
    return _grid_scan(inc, px, steps, 0, tab, None, 0.0)


def grid_min_cond(inc, px, dtab, long steps):
    tab = np.zeros(1)
    return _grid_scan(inc, px, steps, 1, tab, dtab, 0.0)


def grid_min_excess(inc, px, double target, long steps):
    tab = np.empty(steps + 1)
    tab[0] = np.inf
    tab[1:] = -np.log(np.arange(1, steps + 1) / steps)
    return _grid_scan(inc, px, steps, 2, tab, None, target)


cdef inline double _add_mass(double[::1] q, double S, Py_ssize_t y, double w) noexcept nogil:
    S -= _xlnx(q[y])
    q[y] += w
    if q[y] < 0.0:
        q[y] = 0.0
    S += _xlnx(q[y])
    return S


def exhaustive_min_entropy_map(choices_flat, offsets, px, Py_ssize_t n):
    choices_np = np.ascontiguousarray(choices_flat, dtype=np.int64)
    offsets_np = np.ascontiguousarray(offsets, dtype=np.int64)
    px_np = np.ascontiguousarray(px, dtype=np.float64)
    cdef const i64[::1] ch = choices_np
    cdef const i64[::1] off = offsets_np
    cdef const double[::1] pxv = px_np
    cdef Py_ssize_t m = pxv.shape[0]

    q_np = np.zeros(n)
    idx_np = np.zeros(m, dtype=np.int64)
    cur_np = np.zeros(m, dtype=np.int64)
    best_np = np.zeros(m, dtype=np.int64)
    cdef double[::1] q = q_np
    cdef i64[::1] idx = idx_np
    cdef i64[::1] cur = cur_np
    cdef i64[::1] best_assign = best_np

    cdef double S = 0.0
    cdef double best = INFINITY
    cdef double H
    cdef Py_ssize_t x, y
    cdef i64 nxt

    with nogil:
        for x in range(m):
            cur[x] = ch[off[x]]
            q[cur[x]] += pxv[x]
        for y in range(n):
            S += _xlnx(q[y])
        while True:
            if -S < best + 1e-12:
                H = 0.0
                for y in range(n):
                    H -= _xlnx(q[y])
                if H < best:
                    best = H
                    for x in range(m):
                        best_assign[x] = cur[x]
            x = m - 1
            while x >= 0:
                if idx[x] + 1 < off[x + 1] - off[x]:
                    idx[x] += 1
                    nxt = ch[off[x] + idx[x]]
                    S = _add_mass(q, S, cur[x], -pxv[x])
                    S = _add_mass(q, S, nxt, pxv[x])
                    cur[x] = nxt
                    break
                idx[x] = 0
                nxt = ch[off[x]]
                S = _add_mass(q, S, cur[x], -pxv[x])
                S = _add_mass(q, S, nxt, pxv[x])
                cur[x] = nxt
                x -= 1
            if x < 0:
                break
    return float(best), best_np


def vertex_min_entropy(yin_flat, yout_flat, offsets, px, double eps, Py_ssize_t n):
    yin_np = np.ascontiguousarray(yin_flat, dtype=np.int64)
    yout_np = np.ascontiguousarray(yout_flat, dtype=np.int64)
    offsets_np = np.ascontiguousarray(offsets, dtype=np.int64)
    px_np = np.ascontiguousarray(px, dtype=np.float64)
    cdef const i64[::1] vin = yin_np
    cdef const i64[::1] vout = yout_np
    cdef const i64[::1] off = offsets_np
    cdef const double[::1] pxv = px_np
    cdef Py_ssize_t m = pxv.shape[0]

    q_np = np.zeros(n)
    idx_np = np.zeros(m, dtype=np.int64)
    best_np = np.zeros(m, dtype=np.int64)
    cdef double[::1] q = q_np
    cdef i64[::1] idx = idx_np
    cdef i64[::1] best_choice = best_np

    cdef double S = 0.0
    cdef double best = INFINITY
    cdef double H
    cdef Py_ssize_t x, y
    cdef i64 pos

    with nogil:
        for x in range(m):
            pos = off[x]
            if vout[pos] < 0:
                q[vin[pos]] += pxv[x]
            else:
                q[vin[pos]] += pxv[x] * (1.0 - eps)
                q[vout[pos]] += pxv[x] * eps
        for y in range(n):
            S += _xlnx(q[y])
        while True:
            if -S < best + 1e-12:
                H = 0.0
                for y in range(n):
                    H -= _xlnx(q[y])
                if H < best:
                    best = H
                    for x in range(m):
                        best_choice[x] = idx[x]
            x = m - 1
            while x >= 0:
                pos = off[x] + idx[x]
                if vout[pos] < 0:
                    S = _add_mass(q, S, vin[pos], -pxv[x])
                else:
                    S = _add_mass(q, S, vin[pos], -pxv[x] * (1.0 - eps))
                    S = _add_mass(q, S, vout[pos], -pxv[x] * eps)
                if idx[x] + 1 < off[x + 1] - off[x]:
                    idx[x] += 1
                    pos = off[x] + idx[x]
                    if vout[pos] < 0:
                        S = _add_mass(q, S, vin[pos], pxv[x])
                    else:
                        S = _add_mass(q, S, vin[pos], pxv[x] * (1.0 - eps))
                        S = _add_mass(q, S, vout[pos], pxv[x] * eps)
                    break
                idx[x] = 0
                pos = off[x]
                if vout[pos] < 0:
                    S = _add_mass(q, S, vin[pos], pxv[x])
                else:
                    S = _add_mass(q, S, vin[pos], pxv[x] * (1.0 - eps))
                    S = _add_mass(q, S, vout[pos], pxv[x] * eps)
                x -= 1
            if x < 0:
                break
    return float(best), best_np
