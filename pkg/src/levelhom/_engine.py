"""
Compiled kernels for the implicit Rips persistence engine.

Simplexes are keyed by ``(ld, code)`` where ``ld = level * nranks +
diameter_rank`` and ``code`` is the mixed-radix encoding of the sorted
vertex tuple in base ``m``. Both are int64, so all comparisons are exact.
"""

from __future__ import annotations

import heapq

import numpy as np
from numba import njit, types
from numba.typed import Dict, List


@njit(cache=True)
def edge_id(nbr_ptr, nbr, nbr_eid, v, w):
    lo = nbr_ptr[v]
    hi = nbr_ptr[v + 1]
    while lo < hi:
        mid = (lo + hi) // 2
        x = nbr[mid]
        if x < w:
            lo = mid + 1
        elif x > w:
            hi = mid
        else:
            return nbr_eid[mid]
    return -1


@njit(cache=True)
def cofaces(s, s_ld, nranks, vlvl, erank, nbr_ptr, nbr, nbr_eid, m, out_ld, out_code):
    """Fill ``out_*`` with the cofaces of ``s``; returns their count."""
    best = s[0]
    for v in s:
        if nbr_ptr[v + 1] - nbr_ptr[v] < nbr_ptr[best + 1] - nbr_ptr[best]:
            best = v
    s_lvl = s_ld // nranks
    s_dr = s_ld % nranks
    cnt = 0
    for p in range(nbr_ptr[best], nbr_ptr[best + 1]):
        w = nbr[p]
        dr = s_dr
        ok = True
        for v in s:
            if v == best:
                e = nbr_eid[p]
            else:
                e = edge_id(nbr_ptr, nbr, nbr_eid, v, w)
                if e < 0:
                    ok = False
                    break
            if erank[e] > dr:
                dr = erank[e]
        if not ok:
            continue
        lv = vlvl[w] if vlvl[w] > s_lvl else s_lvl
        code = 0
        placed = False
        for v in s:
            if not placed and w < v:
                code = code * m + w
                placed = True
            code = code * m + v
        if not placed:
            code = code * m + w
        out_ld[cnt] = lv * nranks + dr
        out_code[cnt] = code
        cnt += 1
    return cnt


@njit(cache=True)
def _argmin(ld, code, cnt):
    best = 0
    for t in range(1, cnt):
        if ld[t] < ld[best] or (ld[t] == ld[best] and code[t] < code[best]):
            best = t
    return best


@njit(cache=True)
def emergent_coface(s, s_ld, nranks, vlvl, erank, nbr_ptr, nbr, nbr_eid, m):
    """Smallest coface sharing the key prefix ``ld`` of ``s``, or ``-1``.

    Coface codes increase with the added vertex, so the first hit in
    neighbour order is the smallest such coface.
    """
    best = s[0]
    for v in s:
        if nbr_ptr[v + 1] - nbr_ptr[v] < nbr_ptr[best + 1] - nbr_ptr[best]:
            best = v
    s_lvl = s_ld // nranks
    s_dr = s_ld % nranks
    for p in range(nbr_ptr[best], nbr_ptr[best + 1]):
        w = nbr[p]
        if vlvl[w] > s_lvl:
            continue
        ok = True
        for v in s:
            e = nbr_eid[p] if v == best else edge_id(nbr_ptr, nbr, nbr_eid, v, w)
            if e < 0 or erank[e] > s_dr:
                ok = False
                break
        if not ok:
            continue
        code = 0
        placed = False
        for v in s:
            if not placed and w < v:
                code = code * m + w
                placed = True
            code = code * m + v
        if not placed:
            code = code * m + w
        return code
    return -1


@njit(cache=True)
def _pop_pivot(heap):
    """Smallest entry with odd multiplicity (left on the heap), or ``(-1, -1)``."""
    while len(heap) > 0:
        top = heapq.heappop(heap)
        if len(heap) > 0 and heap[0] == top:
            heapq.heappop(heap)
            continue
        heapq.heappush(heap, top)
        return top
    return (np.int64(-1), np.int64(-1))


@njit(cache=True)
def _drain(heap):
    """Remove every entry, cancelling pairs; result is sorted."""
    out = [(np.int64(0), np.int64(0)) for _ in range(0)]
    while len(heap) > 0:
        top = heapq.heappop(heap)
        if len(heap) > 0 and heap[0] == top:
            heapq.heappop(heap)
            continue
        out.append(top)
    return out


@njit(cache=True)
def reduce_coboundaries(cols, col_ld, nranks, vlvl, erank, nbr_ptr, nbr, nbr_eid, m, maxdeg):
    """Cohomology reduction of the columns ``cols`` (already in processing order).

    Returns the pivot ``ld`` and ``code`` per column; ``-1`` marks an
    essential class.
    """
    n = cols.shape[0]
    piv_ld = np.full(n, -1, dtype=np.int64)
    piv_code = np.full(n, -1, dtype=np.int64)
    owner = Dict.empty(key_type=types.int64, value_type=types.int64)
    slot = Dict.empty(key_type=types.int64, value_type=types.int64)
    st_ld = List()
    st_code = List()
    st_ld.append(np.zeros(1, dtype=np.int64))
    st_code.append(np.zeros(1, dtype=np.int64))
    buf_ld = np.empty(maxdeg + 1, dtype=np.int64)
    buf_code = np.empty(maxdeg + 1, dtype=np.int64)
    compact_at = 64 * (maxdeg + 1)
    for j in range(n):
        s = cols[j]
        code = emergent_coface(s, col_ld[j], nranks, vlvl, erank, nbr_ptr, nbr, nbr_eid, m)
        if code >= 0 and code not in owner:
            owner[code] = j
            piv_ld[j] = col_ld[j]
            piv_code[j] = code
            continue
        cnt = cofaces(s, col_ld[j], nranks, vlvl, erank, nbr_ptr, nbr, nbr_eid, m, buf_ld, buf_code)
        if cnt == 0:
            continue
        b = _argmin(buf_ld, buf_code, cnt)
        p_ld = buf_ld[b]
        p_code = buf_code[b]
        if p_code not in owner:
            owner[p_code] = j
            piv_ld[j] = p_ld
            piv_code[j] = p_code
            continue
        heap = [(buf_ld[t], buf_code[t]) for t in range(cnt)]
        heapq.heapify(heap)
        while p_code in owner:
            o = owner[p_code]
            if o in slot:
                o_ld = st_ld[slot[o]]
                o_code = st_code[slot[o]]
                for t in range(o_ld.shape[0]):
                    heapq.heappush(heap, (o_ld[t], o_code[t]))
            else:
                o_cnt = cofaces(cols[o], col_ld[o], nranks, vlvl, erank, nbr_ptr, nbr, nbr_eid, m, buf_ld, buf_code)
                for t in range(o_cnt):
                    heapq.heappush(heap, (buf_ld[t], buf_code[t]))
            if len(heap) > compact_at:
                heap = _drain(heap)  # sorted, hence still a heap
                compact_at = max(compact_at, 2 * len(heap))
            top = _pop_pivot(heap)
            p_ld = top[0]
            p_code = top[1]
            if p_ld < 0:
                break
        if p_ld < 0:
            continue
        kept = _drain(heap)
        kept_ld = np.empty(len(kept), dtype=np.int64)
        kept_code = np.empty(len(kept), dtype=np.int64)
        for t in range(len(kept)):
            kept_ld[t] = kept[t][0]
            kept_code[t] = kept[t][1]
        st_ld.append(kept_ld)
        st_code.append(kept_code)
        slot[j] = len(st_ld) - 1
        owner[p_code] = j
        piv_ld[j] = p_ld
        piv_code[j] = p_code
    return piv_ld, piv_code


@njit(cache=True)
def union_find_pairs(edges, order, vlvl, edge_lvl, m):
    """Elder-rule merges over edges in ``order``.

    Returns ``(merged_mask, young_root_lvl, edge_lvl_at_merge, roots_mask)``.
    """
    parent = np.arange(m)
    merged = np.zeros(edges.shape[0], dtype=np.bool_)
    born = np.empty(m, dtype=np.int64)
    died = np.empty(m, dtype=np.int64)
    cnt = 0
    for idx in order:
        a = edges[idx, 0]
        b = edges[idx, 1]
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        while parent[b] != b:
            parent[b] = parent[parent[b]]
            b = parent[b]
        if a == b:
            continue
        # the root entering later (larger level, then larger label) dies
        if vlvl[a] < vlvl[b] or (vlvl[a] == vlvl[b] and a < b):
            a, b = b, a
        parent[a] = b
        merged[idx] = True
        born[cnt] = vlvl[a]
        died[cnt] = edge_lvl[idx]
        cnt += 1
    roots = np.zeros(m, dtype=np.bool_)
    for v in range(m):
        if parent[v] == v:
            roots[v] = True
    return merged, born[:cnt], died[:cnt], roots


@njit(cache=True)
def count_expansions(simp, nbr_ptr, nbr, nbr_eid):
    out = np.zeros(simp.shape[0], dtype=np.int64)
    for i in range(simp.shape[0]):
        s = simp[i]
        last = s[s.shape[0] - 1]
        for p in range(nbr_ptr[last], nbr_ptr[last + 1]):
            w = nbr[p]
            if w <= last:
                continue
            ok = True
            for v in s[:-1]:
                if edge_id(nbr_ptr, nbr, nbr_eid, v, w) < 0:
                    ok = False
                    break
            if ok:
                out[i] += 1
    return out


@njit(cache=True)
def fill_expansions(simp, simp_ld, counts, nranks, vlvl, erank, nbr_ptr, nbr, nbr_eid, m):
    """Simplexes one dimension up with ``w > max(s)``, in lexicographic order."""
    total = counts.sum()
    k1 = simp.shape[1]
    out = np.empty((total, k1 + 1), dtype=np.int64)
    out_ld = np.empty(total, dtype=np.int64)
    out_code = np.empty(total, dtype=np.int64)
    row = 0
    for i in range(simp.shape[0]):
        if counts[i] == 0:
            continue
        s = simp[i]
        last = s[k1 - 1]
        s_lvl = simp_ld[i] // nranks
        s_dr = simp_ld[i] % nranks
        for p in range(nbr_ptr[last], nbr_ptr[last + 1]):
            w = nbr[p]
            if w <= last:
                continue
            dr = s_dr
            ok = True
            for v in s:
                e = edge_id(nbr_ptr, nbr, nbr_eid, v, w)
                if e < 0:
                    ok = False
                    break
                if erank[e] > dr:
                    dr = erank[e]
            if not ok:
                continue
            code = 0
            for t in range(k1):
                out[row, t] = s[t]
                code = code * m + s[t]
            out[row, k1] = w
            out_code[row] = code * m + w
            lv = vlvl[w] if vlvl[w] > s_lvl else s_lvl
            out_ld[row] = lv * nranks + dr
            row += 1
    return out, out_ld, out_code
