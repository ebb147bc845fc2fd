# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled interpreter for engine models.

Mirror of ``pybackend.py``: identical event protocol, identical branch
structure, identical float expressions, so both backends produce
bit-identical trajectories from the same pre-drawn variates.
"""

import numpy as np

cimport numpy as cnp

DEF CODE_UNIFORM = 0
DEF CODE_FLIP = 1
DEF CODE_ISING_HB = 2
DEF CODE_ISING_MET = 3
DEF CODE_HC_HB = 4
DEF CODE_HC_MET = 5
DEF CODE_COL_HB = 6
DEF CODE_COL_MET = 7
DEF CODE_BLOCK_RULE = 8


cdef inline int _update(signed char* spins, long long v, double u, int code,
                        int q, long long* indptr, long long* indices,
                        double* table, int dmax, long long* marks,
                        long long stamp) nogil:
    cdef int s, cur, prop, ssum, navail, c, last
    cdef long long k, a, b
    cdef double u2, acc, inv, cum
    if code == CODE_UNIFORM:
        s = <int>(u * q) + 1
        return s if s <= q else q
    cur = spins[v]
    if code == CODE_FLIP:
        return 3 - cur if u < table[0] else cur
    if code == CODE_ISING_HB:
        ssum = 0
        for k in range(indptr[v], indptr[v + 1]):
            ssum += 2 * spins[indices[k]] - 3
        return 1 if u < table[ssum + dmax] else 2
    if code == CODE_ISING_MET:
        prop = <int>(u * 2)
        u2 = u * 2 - prop
        prop += 1
        if prop == cur:
            return cur
        ssum = 0
        for k in range(indptr[v], indptr[v + 1]):
            ssum += 2 * spins[indices[k]] - 3
        acc = table[2 * (ssum + dmax) + (prop - 1)]
        return prop if u2 < acc else cur
    if code == CODE_HC_HB:
        for k in range(indptr[v], indptr[v + 1]):
            if spins[indices[k]] == 2:
                return 1
        return 1 if u < table[0] else 2
    if code == CODE_HC_MET:
        prop = <int>(u * 2)
        u2 = u * 2 - prop
        prop += 1
        if prop == cur:
            return cur
        if prop == 2:
            for k in range(indptr[v], indptr[v + 1]):
                if spins[indices[k]] == 2:
                    return cur
            return 2 if u2 < table[0] else cur
        return 1 if u2 < table[1] else cur
    if code == CODE_COL_HB:
        navail = q
        for k in range(indptr[v], indptr[v + 1]):
            c = spins[indices[k]]
            if marks[c] != stamp:
                marks[c] = stamp
                navail -= 1
        inv = 1.0 / navail
        cum = 0.0
        last = 0
        for c in range(1, q + 1):
            if marks[c] != stamp:
                cum += inv
                last = c
                if u < cum:
                    return c
        return last
    if code == CODE_COL_MET:
        prop = <int>(u * q)
        prop += 1
        if prop > q:
            prop = q
        if prop == cur:
            return cur
        for k in range(indptr[v], indptr[v + 1]):
            if spins[indices[k]] == prop:
                return cur
        return prop
    if code == CODE_BLOCK_RULE:
        a = indices[indptr[v]]
        b = indices[indptr[v + 1] - 1]
        return 3 - cur if spins[a] != spins[b] else cur
    return cur


def run_single(signed char[::1] spins, long long[::1] sites, double[::1] uniforms,
               int code, int q, double laziness, long long[::1] indptr,
               long long[::1] indices, double[::1] table, int dmax):
    cdef Py_ssize_t e, n_events = sites.shape[0]
    cdef long long v
    cdef double u
    cdef long long stamp = 0
    cdef cnp.ndarray[cnp.int64_t, ndim=1] marks_arr = np.zeros(q + 1, dtype=np.int64)
    cdef long long* marks = <long long*>marks_arr.data
    cdef long long* iptr = &indptr[0]
    cdef long long* idx = &indices[0] if indices.shape[0] > 0 else NULL
    cdef double* tab = &table[0] if table.shape[0] > 0 else NULL
    with nogil:
        for e in range(n_events):
            u = uniforms[e]
            if laziness > 0.0:
                if u < laziness:
                    continue
                u = (u - laziness) / (1.0 - laziness)
            stamp += 1
            v = sites[e]
            spins[v] = <signed char>_update(&spins[0], v, u, code, q, iptr, idx,
                                            tab, dmax, marks, stamp)


cdef inline void _fill_row(double* row, signed char* spins, long long v, int code,
                           int q, long long* indptr, long long* indices,
                           double* table, int dmax) nogil:
    cdef int cur, ssum, c, other, navail
    cdef long long k, a, b
    cdef bint occupied_nb
    cdef double acc, inv, invq, total
    for c in range(q):
        row[c] = 0.0
    cur = spins[v]
    if code == CODE_UNIFORM:
        for c in range(q):
            row[c] = 1.0 / q
        return
    if code == CODE_FLIP:
        row[2 - cur] = table[0]
        row[cur - 1] = 1.0 - table[0]
        return
    if code == CODE_ISING_HB or code == CODE_ISING_MET:
        ssum = 0
        for k in range(indptr[v], indptr[v + 1]):
            ssum += 2 * spins[indices[k]] - 3
        if code == CODE_ISING_HB:
            row[0] = table[ssum + dmax]
            row[1] = 1.0 - row[0]
        else:
            other = 2 - cur
            acc = table[2 * (ssum + dmax) + other]
            row[other] = 0.5 * acc
            row[cur - 1] = 1.0 - row[other]
        return
    if code == CODE_HC_HB or code == CODE_HC_MET:
        occupied_nb = False
        for k in range(indptr[v], indptr[v + 1]):
            if spins[indices[k]] == 2:
                occupied_nb = True
                break
        if code == CODE_HC_HB:
            if occupied_nb:
                row[0] = 1.0
            else:
                row[0] = table[0]
                row[1] = 1.0 - table[0]
        else:
            if cur == 1:
                row[1] = 0.0 if occupied_nb else 0.5 * table[0]
                row[0] = 1.0 - row[1]
            else:
                row[0] = 0.5 * table[1]
                row[1] = 1.0 - row[0]
        return
    if code == CODE_COL_HB or code == CODE_COL_MET:
        navail = q
        for k in range(indptr[v], indptr[v + 1]):
            c = spins[indices[k]]
            if row[c - 1] == 0.0:
                row[c - 1] = -1.0
                navail -= 1
        if code == CODE_COL_HB:
            inv = 1.0 / navail
            for c in range(q):
                row[c] = inv if row[c] >= 0.0 else 0.0
        else:
            invq = 1.0 / q
            total = 0.0
            for c in range(q):
                if row[c] >= 0.0 and c != cur - 1:
                    row[c] = invq
                    total += invq
                else:
                    row[c] = 0.0
            row[cur - 1] = 1.0 - total
        return
    if code == CODE_BLOCK_RULE:
        a = indices[indptr[v]]
        b = indices[indptr[v + 1] - 1]
        if spins[a] != spins[b]:
            row[2 - cur] = 1.0
        else:
            row[cur - 1] = 1.0
        return


cdef inline void _couple_rows(double* rowx, double* rowy, int q, double u,
                              int* out) nogil:
    cdef double m_total = 0.0, m, cum, w, w2, rmass, d
    cdef int c, sx, sy, last
    for c in range(q):
        m_total += rowx[c] if rowx[c] < rowy[c] else rowy[c]
    if u < m_total or m_total >= 1.0 - 1e-12:
        cum = 0.0
        last = 1
        for c in range(q):
            m = rowx[c] if rowx[c] < rowy[c] else rowy[c]
            if m > 0.0:
                cum += m
                last = c + 1
                if u < cum:
                    out[0] = c + 1
                    out[1] = c + 1
                    return
        out[0] = last
        out[1] = last
        return
    rmass = 1.0 - m_total
    w = (u - m_total) / rmass
    cum = 0.0
    sx = 0
    w2 = 0.0
    last = 1
    for c in range(q):
        d = (rowx[c] - rowy[c]) / rmass
        if d > 0.0:
            last = c + 1
            if w < cum + d:
                sx = c + 1
                w2 = (w - cum) / d
                break
            cum += d
    if sx == 0:
        sx = last
        w2 = 0.0
    cum = 0.0
    sy = 0
    last = 1
    for c in range(q):
        d = (rowy[c] - rowx[c]) / rmass
        if d > 0.0:
            last = c + 1
            cum += d
            if w2 < cum:
                sy = c + 1
                break
    if sy == 0:
        sy = last
    out[0] = sx
    out[1] = sy


def run_coupled(signed char[::1] x, signed char[::1] y,
                long long[::1] sites, double[::1] uniforms,
                int code_x, int code_y, int q, double laziness,
                long long[::1] indptr, long long[::1] indices,
                double[::1] table_x, double[::1] table_y, int dmax):
    cdef Py_ssize_t e, n_events = sites.shape[0]
    cdef long long v
    cdef double u
    cdef int pair[2]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] rowx_arr = np.zeros(q, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] rowy_arr = np.zeros(q, dtype=np.float64)
    cdef double* rowx = <double*>rowx_arr.data
    cdef double* rowy = <double*>rowy_arr.data
    cdef long long* iptr = &indptr[0]
    cdef long long* idx = &indices[0] if indices.shape[0] > 0 else NULL
    cdef double* tabx = &table_x[0] if table_x.shape[0] > 0 else NULL
    cdef double* taby = &table_y[0] if table_y.shape[0] > 0 else NULL
    with nogil:
        for e in range(n_events):
            u = uniforms[e]
            if laziness > 0.0:
                if u < laziness:
                    continue
                u = (u - laziness) / (1.0 - laziness)
            v = sites[e]
            _fill_row(rowx, &x[0], v, code_x, q, iptr, idx, tabx, dmax)
            _fill_row(rowy, &y[0], v, code_y, q, iptr, idx, taby, dmax)
            _couple_rows(rowx, rowy, q, u, pair)
            x[v] = <signed char>pair[0]
            y[v] = <signed char>pair[1]
