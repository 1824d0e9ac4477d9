"""Pure-Python versions of the inner loops in ``_ckernels.pyx``.

Both implementations must produce identical results, bit for bit: the
arithmetic below is written in the same order as the compiled version.
"""
import numpy as np


def cooccurrence(indptr, indices, n):
    """Count shared hubs for every pair of members.

    ``indptr``/``indices`` is a CSR listing, for each hub, its members as
    sorted unique integers in ``[0, n)``. Returns ``(rows, cols, counts)``
    with ``rows < cols``, sorted lexicographically.
    """
    indptr = np.asarray(indptr).tolist()
    indices = np.asarray(indices).tolist()
    counts = {}
    for h in range(len(indptr) - 1):
        members = indices[indptr[h]:indptr[h + 1]]
        k = len(members)
        for a in range(k):
            i = members[a]
            for b in range(a + 1, k):
                key = (i, members[b])
                counts[key] = counts.get(key, 0) + 1
    keys = sorted(counts)
    rows = np.array([k[0] for k in keys], dtype=np.int64)
    cols = np.array([k[1] for k in keys], dtype=np.int64)
    vals = np.array([counts[k] for k in keys], dtype=np.int64)
    return rows, cols, vals


def louvain_local_moves(indptr, indices, data, strengths, order, community, tot, m2, max_sweeps):
    """One Louvain local-moving phase; mutates ``community`` and ``tot``.

    Returns the number of node moves made.
    """
    ptr = indptr.tolist()
    idx = indices.tolist()
    wts = data.tolist()
    k = strengths.tolist()
    comm = community.tolist()
    tt = tot.tolist()
    total_moves = 0
    for _ in range(max_sweeps):
        moves = 0
        for i in order.tolist():
            ci = comm[i]
            ki = k[i]
            w_to = {}
            seen = []
            for e in range(ptr[i], ptr[i + 1]):
                j = idx[e]
                if j == i:
                    continue
                c = comm[j]
                if c in w_to:
                    w_to[c] += wts[e]
                else:
                    w_to[c] = wts[e]
                    seen.append(c)
            tt[ci] -= ki
            best = ci
            best_gain = w_to.get(ci, 0.0) - tt[ci] * ki / m2
            for c in seen:
                if c == ci:
                    continue
                gain = w_to[c] - tt[c] * ki / m2
                if gain > best_gain:
                    best_gain = gain
                    best = c
            tt[best] += ki
            if best != ci:
                comm[i] = best
                moves += 1
        total_moves += moves
        if moves == 0:
            break
    community[:] = comm
    tot[:] = tt
    return total_moves


def _label_weights(ptr, idx, wts, labels, i):
    acc = {}
    seen = []
    for e in range(ptr[i], ptr[i + 1]):
        j = idx[e]
        if j == i:
            continue
        lab = labels[j]
        if lab in acc:
            acc[lab] += wts[e]
        else:
            acc[lab] = wts[e]
            seen.append(lab)
    return acc, seen


def label_propagation_sweep(indptr, indices, data, labels, order, uniforms):
    """One asynchronous sweep; node ``order[t]`` consumes ``uniforms[t]``
    to break ties. Mutates ``labels``; returns the number of changes."""
    ptr = indptr.tolist()
    idx = indices.tolist()
    wts = data.tolist()
    lab = labels.tolist()
    u = uniforms.tolist()
    changed = 0
    for t, i in enumerate(order.tolist()):
        acc, seen = _label_weights(ptr, idx, wts, lab, i)
        if not seen:
            continue
        best = acc[seen[0]]
        for c in seen:
            if acc[c] > best:
                best = acc[c]
        ties = [c for c in seen if acc[c] == best]
        new = ties[int(u[t] * len(ties))]
        if new != lab[i]:
            changed += 1
            lab[i] = new
    labels[:] = lab
    return changed


def label_propagation_stable(indptr, indices, data, labels):
    """True when every node's label is among its weighted-majority labels."""
    ptr = indptr.tolist()
    idx = indices.tolist()
    wts = data.tolist()
    lab = labels.tolist()
    for i in range(len(ptr) - 1):
        acc, seen = _label_weights(ptr, idx, wts, lab, i)
        if not seen:
            continue
        best = max(acc[c] for c in seen)
        if acc.get(lab[i], -1.0) != best:
            return False
    return True
