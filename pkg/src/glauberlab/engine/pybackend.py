"""Pure-Python interpreter for engine models.

This file and ``_ckernels.pyx`` implement the same event protocol and must
stay in lockstep: every uniform variate is consumed the same way, every
branch compares against the same precomputed floats, so trajectories are
bit-identical across backends.

Protocol per event (site v, variate u):
  1. laziness pre-test: u < rho means no update; otherwise u is rescaled
     to (u - rho) / (1 - rho);
  2. the new spin is a deterministic function of (configuration, v, u)
     given by the model code.
Coupled chains share (v, u); the single variate drives a maximal coupling
of the two update rows (agreement mass first, then the product of the
normalized positive parts of the row differences).
"""

from __future__ import annotations

from .codec import (CODE_BLOCK_RULE, CODE_COL_HB, CODE_COL_MET, CODE_FLIP,
                    CODE_HC_HB, CODE_HC_MET, CODE_ISING_HB, CODE_ISING_MET,
                    CODE_UNIFORM)


def _update(spins, v, u, code, q, indptr, indices, table, dmax, marks, stamp):
    if code == CODE_UNIFORM:
        s = int(u * q) + 1
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
        prop = int(u * 2)
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
        prop = int(u * 2)
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
        prop = int(u * q)
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
    raise ValueError(f"unknown engine code {code}")


def run_single(spins, sites, uniforms, code, q, laziness, indptr, indices, table, dmax):
    marks = [0] * (q + 1)
    stamp = 0
    for e in range(len(sites)):
        u = uniforms[e]
        if laziness > 0.0:
            if u < laziness:
                continue
            u = (u - laziness) / (1.0 - laziness)
        stamp += 1
        v = sites[e]
        spins[v] = _update(spins, v, u, code, q, indptr, indices, table, dmax,
                           marks, stamp)


def _fill_row(row, spins, v, code, q, indptr, indices, table, dmax):
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
    if code in (CODE_ISING_HB, CODE_ISING_MET):
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
    if code in (CODE_HC_HB, CODE_HC_MET):
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
    if code in (CODE_COL_HB, CODE_COL_MET):
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
    raise ValueError(f"unknown engine code {code}")


def couple_rows(rowx, rowy, q, u):
    """Deterministic maximal coupling of two rows driven by one variate.

    Returns (sx, sy).  Agreement mass sum(min) comes first in spin order;
    the residual variate is split hierarchically so the leftover parts are
    sampled as an exact product.
    """
    m_total = 0.0
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
                    return c + 1, c + 1
        return last, last
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
    return sx, sy


def run_coupled(x, y, sites, uniforms, code_x, code_y, q, laziness,
                indptr, indices, table_x, table_y, dmax):
    rowx = [0.0] * q
    rowy = [0.0] * q
    for e in range(len(sites)):
        u = uniforms[e]
        if laziness > 0.0:
            if u < laziness:
                continue
            u = (u - laziness) / (1.0 - laziness)
        v = sites[e]
        _fill_row(rowx, x, v, code_x, q, indptr, indices, table_x, dmax)
        _fill_row(rowy, y, v, code_y, q, indptr, indices, table_y, dmax)
        sx, sy = couple_rows(rowx, rowy, q, u)
        x[v] = sx
        y[v] = sy
