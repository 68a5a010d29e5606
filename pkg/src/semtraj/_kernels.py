"""Compiled inner loops. All kernels release the GIL so worker threads overlap."""

import numpy as np
from numba import njit

_jit = njit(nogil=True, cache=True)


@_jit
def _n_choose_k(n, k):
    if k > n:
        return 0
    r = 1
    for i in range(k):
        r = r * (n - i) // (i + 1)
    return r


@_jit
def shingle_rows(types, offsets, k, base):
    """Distinct ordered k-subsequence keys of every row, one output row each.

    A shingle (t1, ..., tk) is keyed as the base-``base`` number t1 t2 ... tk.
    Negative (unknown) positions are skipped before enumeration.
    """
    n = offsets.shape[0] - 1
    total = 0
    longest = 0
    for r in range(n):
        if offsets[r + 1] - offsets[r] > longest:
            longest = offsets[r + 1] - offsets[r]
        usable = 0
        for p in range(offsets[r], offsets[r + 1]):
            if types[p] >= 0:
                usable += 1
        total += _n_choose_k(usable, k)
    keys = np.empty(total, dtype=np.int64)
    owners = np.empty(total, dtype=np.int64)
    buf = np.empty(longest, dtype=np.int64)
    idx = np.empty(k, dtype=np.int64)
    out = 0
    for r in range(n):
        m = 0
        for p in range(offsets[r], offsets[r + 1]):
            if types[p] >= 0:
                buf[m] = types[p]
                m += 1
        if m < k:
            continue
        start = out
        for i in range(k):
            idx[i] = i
        while True:
            key = 0
            for i in range(k):
                key = key * base + buf[idx[i]]
            keys[out] = key
            out += 1
            i = k - 1
            while i >= 0 and idx[i] == m - k + i:
                i -= 1
            if i < 0:
                break
            idx[i] += 1
            for j in range(i + 1, k):
                idx[j] = idx[j - 1] + 1
        seg = np.sort(keys[start:out])
        w = start
        for j in range(seg.shape[0]):
            if j == 0 or seg[j] != seg[j - 1]:
                keys[w] = seg[j]
                owners[w] = r
                w += 1
        out = w
    return keys[:out], owners[:out]


@_jit
def task_pair_count(tasks):
    total = 0
    for t in range(tasks.shape[0]):
        a = tasks[t, 1] - tasks[t, 0]
        if tasks[t, 4] == 1:
            total += a * (a - 1) // 2
        else:
            total += a * (tasks[t, 3] - tasks[t, 2])
    return total


@_jit
def group_pairs(members, tasks, n_rows):
    """Pair codes ``i * n_rows + j`` (i < j) for every tile task.

    ``tasks[t] = (a0, a1, b0, b1, same)``: when ``same`` is 1 the task pairs
    ``members[a0:a1]`` with itself, otherwise it crosses ``members[a0:a1]``
    with ``members[b0:b1]``. Members within a group are sorted ascending and
    a-tiles precede b-tiles, so every emitted pair is already canonical.
    """
    out = np.empty(task_pair_count(tasks), dtype=np.int64)
    w = 0
    for t in range(tasks.shape[0]):
        a0, a1, b0, b1, same = tasks[t, 0], tasks[t, 1], tasks[t, 2], tasks[t, 3], tasks[t, 4]
        if same == 1:
            for x in range(a0, a1):
                base = members[x] * n_rows
                for y in range(x + 1, a1):
                    out[w] = base + members[y]
                    w += 1
        else:
            for x in range(a0, a1):
                base = members[x] * n_rows
                for y in range(b0, b1):
                    out[w] = base + members[y]
                    w += 1
    return out


@_jit
def lcs_pairs(codes, offsets, left, right):
    """LCS length for each (left[p], right[p]) row pair at one level.

    Negative codes never match, not even each other.
    """
    n = left.shape[0]
    out = np.empty(n, dtype=np.int32)
    width = 1
    for r in range(offsets.shape[0] - 1):
        if offsets[r + 1] - offsets[r] + 1 > width:
            width = offsets[r + 1] - offsets[r] + 1
    row = np.zeros(width, dtype=np.int32)
    for p in range(n):
        a0 = offsets[left[p]]
        a1 = offsets[left[p] + 1]
        b0 = offsets[right[p]]
        b1 = offsets[right[p] + 1]
        lb = b1 - b0
        for j in range(lb + 1):
            row[j] = 0
        for i in range(a0, a1):
            x = codes[i]
            diag = 0
            for j in range(1, lb + 1):
                up = row[j]
                if x >= 0 and x == codes[b0 + j - 1]:
                    row[j] = diag + 1
                elif row[j - 1] > up:
                    row[j] = row[j - 1]
                diag = up
        out[p] = row[lb]
    return out
