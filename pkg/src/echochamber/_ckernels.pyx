# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops. Semantics mirror ``_pykernels`` exactly."""
import numpy as np
cimport numpy as cnp

cnp.import_array()

ctypedef cnp.int64_t i64
ctypedef cnp.float64_t f64

# dense pair accumulator is used while n*n stays below this many cells
cdef Py_ssize_t DENSE_LIMIT = 1 << 24


def cooccurrence(indptr, indices, Py_ssize_t n):
    cdef const i64[::1] ptr = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef const i64[::1] idx = np.ascontiguousarray(indices, dtype=np.int64)
    cdef Py_ssize_t nh = ptr.shape[0] - 1
    cdef Py_ssize_t h, a, b, lo, hi, i, j, t
    cdef i64 npairs = 0
    cdef i64[:, ::1] dense
    cdef i64[::1] codes
    for h in range(nh):
        t = ptr[h + 1] - ptr[h]
        npairs += t * (t - 1) // 2

    if n * n <= DENSE_LIMIT:
        dense_arr = np.zeros((n, n), dtype=np.int64)
        dense = dense_arr
        for h in range(nh):
            lo = ptr[h]
            hi = ptr[h + 1]
            for a in range(lo, hi):
                i = idx[a]
                for b in range(a + 1, hi):
                    dense[i, idx[b]] += 1
        rows, cols = np.nonzero(np.triu(dense_arr, 1))
        return rows.astype(np.int64), cols.astype(np.int64), dense_arr[rows, cols]

    codes_arr = np.empty(npairs, dtype=np.int64)
    codes = codes_arr
    t = 0
    for h in range(nh):
        lo = ptr[h]
        hi = ptr[h + 1]
        for a in range(lo, hi):
            i = idx[a]
            for b in range(a + 1, hi):
                codes[t] = i * n + idx[b]
                t += 1
    uniq, counts = np.unique(codes_arr, return_counts=True)
    return (uniq // n).astype(np.int64), (uniq % n).astype(np.int64), counts.astype(np.int64)


def louvain_local_moves(indptr, indices, data, strengths, order, i64[::1] community,
                        f64[::1] tot, double m2, Py_ssize_t max_sweeps):
    cdef const i64[::1] ptr = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef const i64[::1] idx = np.ascontiguousarray(indices, dtype=np.int64)
    cdef const f64[::1] wts = np.ascontiguousarray(data, dtype=np.float64)
    cdef const f64[::1] k = np.ascontiguousarray(strengths, dtype=np.float64)
    cdef const i64[::1] ordv = np.ascontiguousarray(order, dtype=np.int64)
    cdef Py_ssize_t n = ptr.shape[0] - 1
    w_to_arr = np.zeros(n, dtype=np.float64)
    has_arr = np.zeros(n, dtype=np.uint8)
    seen_arr = np.empty(n, dtype=np.int64)
    cdef f64[::1] w_to = w_to_arr
    cdef cnp.uint8_t[::1] has = has_arr
    cdef i64[::1] seen = seen_arr
    cdef Py_ssize_t sweep, t, e, s, nseen
    cdef i64 i, j, c, ci, best, moves
    cdef i64 total_moves = 0
    cdef double ki, gain, best_gain, wci

    for sweep in range(max_sweeps):
        moves = 0
        for t in range(ordv.shape[0]):
            i = ordv[t]
            ci = community[i]
            ki = k[i]
            nseen = 0
            for e in range(ptr[i], ptr[i + 1]):
                j = idx[e]
                if j == i:
                    continue
                c = community[j]
                if has[c]:
                    w_to[c] += wts[e]
                else:
                    has[c] = 1
                    w_to[c] = wts[e]
                    seen[nseen] = c
                    nseen += 1
            tot[ci] -= ki
            best = ci
            wci = w_to[ci] if has[ci] else 0.0
            best_gain = wci - tot[ci] * ki / m2
            for s in range(nseen):
                c = seen[s]
                if c == ci:
                    continue
                gain = w_to[c] - tot[c] * ki / m2
                if gain > best_gain:
                    best_gain = gain
                    best = c
            tot[best] += ki
            if best != ci:
                community[i] = best
                moves += 1
            for s in range(nseen):
                has[seen[s]] = 0
        total_moves += moves
        if moves == 0:
            break
    return total_moves


def label_propagation_sweep(indptr, indices, data, i64[::1] labels, order, uniforms):
    cdef const i64[::1] ptr = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef const i64[::1] idx = np.ascontiguousarray(indices, dtype=np.int64)
    cdef const f64[::1] wts = np.ascontiguousarray(data, dtype=np.float64)
    cdef const i64[::1] ordv = np.ascontiguousarray(order, dtype=np.int64)
    cdef const f64[::1] u = np.ascontiguousarray(uniforms, dtype=np.float64)
    cdef Py_ssize_t n = ptr.shape[0] - 1
    acc_arr = np.zeros(n, dtype=np.float64)
    has_arr = np.zeros(n, dtype=np.uint8)
    seen_arr = np.empty(n, dtype=np.int64)
    cdef f64[::1] acc = acc_arr
    cdef cnp.uint8_t[::1] has = has_arr
    cdef i64[::1] seen = seen_arr
    cdef Py_ssize_t t, e, s, nseen, nties, pick
    cdef i64 i, j, lab, new
    cdef i64 changed = 0
    cdef double best

    for t in range(ordv.shape[0]):
        i = ordv[t]
        nseen = 0
        for e in range(ptr[i], ptr[i + 1]):
            j = idx[e]
            if j == i:
                continue
            lab = labels[j]
            if has[lab]:
                acc[lab] += wts[e]
            else:
                has[lab] = 1
                acc[lab] = wts[e]
                seen[nseen] = lab
                nseen += 1
        if nseen == 0:
            continue
        best = acc[seen[0]]
        for s in range(nseen):
            if acc[seen[s]] > best:
                best = acc[seen[s]]
        nties = 0
        for s in range(nseen):
            if acc[seen[s]] == best:
                nties += 1
        pick = <Py_ssize_t>(u[t] * nties)
        new = -1
        for s in range(nseen):
            if acc[seen[s]] == best:
                if pick == 0:
                    new = seen[s]
                    break
                pick -= 1
        if new != labels[i]:
            changed += 1
            labels[i] = new
        for s in range(nseen):
            has[seen[s]] = 0
    return changed


def label_propagation_stable(indptr, indices, data, labels):
    cdef const i64[::1] ptr = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef const i64[::1] idx = np.ascontiguousarray(indices, dtype=np.int64)
    cdef const f64[::1] wts = np.ascontiguousarray(data, dtype=np.float64)
    cdef const i64[::1] lab = np.ascontiguousarray(labels, dtype=np.int64)
    cdef Py_ssize_t n = ptr.shape[0] - 1
    acc_arr = np.zeros(n, dtype=np.float64)
    has_arr = np.zeros(n, dtype=np.uint8)
    seen_arr = np.empty(n, dtype=np.int64)
    cdef f64[::1] acc = acc_arr
    cdef cnp.uint8_t[::1] has = has_arr
    cdef i64[::1] seen = seen_arr
    cdef Py_ssize_t i, e, s, nseen
    cdef i64 j, l
    cdef double best, mine
    cdef bint ok = True

    for i in range(n):
        nseen = 0
        for e in range(ptr[i], ptr[i + 1]):
            j = idx[e]
            if j == i:
                continue
            l = lab[j]
            if has[l]:
                acc[l] += wts[e]
            else:
                has[l] = 1
                acc[l] = wts[e]
                seen[nseen] = l
                nseen += 1
        if nseen > 0:
            best = acc[seen[0]]
            for s in range(nseen):
                if acc[seen[s]] > best:
                    best = acc[seen[s]]
            mine = acc[lab[i]] if has[lab[i]] else -1.0
            if mine != best:
                ok = False
        for s in range(nseen):
            has[seen[s]] = 0
        if not ok:
            return False
    return True
