"""Compiled face counter: the same traversal as ``FaceIterator`` on word arrays.

Used where only per-depth counts are needed (f-vectors of large inputs).  The
frame layout mirrors the streaming iterator exactly, so counts, ``phi``,
``max_depth`` and ``peak_frames`` agree with it record for record.
"""
from __future__ import annotations

import numpy as np
from numba import njit

from .iterator import IterStats, _alpha, _top_record
from .lattice_io import LatticeInput, require_valid


def masks_to_words(masks, nwords: int) -> np.ndarray:
    out = np.zeros((len(masks), nwords), dtype=np.uint64)
    nbytes = 8 * nwords
    for i, m in enumerate(masks):
        out[i] = np.frombuffer(m.to_bytes(nbytes, "little"), dtype="<u8")
    return out


@njit(cache=True)
def _subset(x, y, sup, ns):
    for t in range(ns):
        w = sup[t]
        if x[w] & ~y[w]:
            return False
    return True


@njit(cache=True)
def _equal(x, y, sup, ns):
    for t in range(ns):
        w = sup[t]
        if x[w] != y[w]:
            return False
    return True


@njit(cache=True)
def _count(coatoms, ignored, iatoms, depth_cap):
    # Every set held at a level lies inside the face chosen one level up, so
    # each level only touches the words where that face is nonzero (sup).
    m, nw = coatoms.shape
    cap = max(m, 1)
    coat = np.zeros((depth_cap + 1, cap, nw), dtype=np.uint64)
    nc = np.zeros(depth_cap + 1, dtype=np.int64)
    cur = np.zeros((depth_cap + 1, nw), dtype=np.uint64)
    sup = np.zeros((depth_cap + 1, nw), dtype=np.int64)
    nsup = np.zeros(depth_cap + 1, dtype=np.int64)
    pending = np.zeros(depth_cap + 1, dtype=np.bool_)
    base = np.zeros(depth_cap + 1, dtype=np.int64)
    lo = np.zeros(depth_cap + 1, dtype=np.int64)
    k0 = ignored.shape[0]
    per_level = k0 + cap * (depth_cap + 1) + 1
    ign = np.zeros(((depth_cap + 1) * per_level, nw), dtype=np.uint64)
    for i in range(k0):
        ign[i] = ignored[i]
    nig = k0
    counts = np.zeros(depth_cap + 1, dtype=np.int64)
    removed = np.zeros(cap, dtype=np.bool_)
    aI = np.zeros(nw, dtype=np.uint64)

    for i in range(m):
        coat[0, i] = coatoms[i]
    for w in range(nw):
        sup[0, w] = w
    nsup[0] = nw
    nc[0] = m
    base[0] = nig
    level = 0
    phi = 1
    max_depth = 0
    peak = 1
    empties = 0
    while level >= 0:
        sp = sup[level]
        ns = nsup[level]
        if pending[level]:
            pending[level] = False
            for t in range(ns):
                w = sp[t]
                aI[w] = cur[level, w] | iatoms[w]
            k = 0
            for i in range(nc[level]):
                if not _subset(coat[level, i], aI, sp, ns):
                    if k != i:
                        coat[level, k] = coat[level, i]
                    k += 1
            nc[level] = k
            for t in range(ns):
                w = sp[t]
                ign[nig, w] = aI[w]
            nig += 1
            continue
        if nc[level] == 0:
            nig = base[level]
            level -= 1
            continue

        a = coat[level, 0]
        pending[level] = True
        hit = False
        child = level + 1
        cs = 0
        for t in range(ns):
            w = sp[t]
            cur[level, w] = a[w]
            if a[w]:
                sup[child, cs] = w
                cs += 1
                if a[w] & iatoms[w]:
                    hit = True
        if not hit:
            counts[level] += 1
            if cs == 0:
                empties += 1

        csp = sup[child]
        k = 0
        for b in range(1, nc[level]):
            x = coat[child, k]
            for t in range(cs):
                w = csp[t]
                x[w] = a[w] & coat[level, b, w]
            inside = False
            for y in range(lo[level], nig):
                if _subset(x, ign[y], csp, cs):
                    inside = True
                    break
            if not inside:
                k += 1
        for i in range(k):
            removed[i] = False
            for j in range(k):
                if j != i and _subset(coat[child, i], coat[child, j], csp, cs):
                    if j < i or not _equal(coat[child, i], coat[child, j], csp, cs):
                        removed[i] = True
                        break
        kk = 0
        for i in range(k):
            if not removed[i]:
                if kk != i:
                    for t in range(cs):
                        w = csp[t]
                        coat[child, kk, w] = coat[child, i, w]
                kk += 1

        phi += 1
        if child > max_depth:
            max_depth = child
        if kk > 0:
            # the child sees the ignored sets cut down to a; disjoint ones
            # collapse into a single empty set (it still swallows the empty face)
            nc[child] = kk
            nsup[child] = cs
            base[child] = nig
            start = nig
            saw_empty = False
            for y in range(lo[level], start):
                empty = True
                for t in range(cs):
                    w = csp[t]
                    v = ign[y, w] & a[w]
                    ign[nig, w] = v
                    if v:
                        empty = False
                if not empty:
                    nig += 1
                elif not saw_empty:
                    saw_empty = True
                    nig += 1
            lo[child] = start
            level = child
            if level + 1 > peak:
                peak = level + 1
    return counts, phi, max_depth, peak, empties


def count_by_depth(inp: LatticeInput, check: bool = True) -> tuple[dict[int, int], IterStats, bool]:
    """Per-depth face counts (top at depth -1), run statistics, and whether
    the empty face was among the emitted faces."""
    if check:
        require_valid(inp)
    n = inp.n_atoms
    nwords = max(1, -(-n // 64))
    coat = masks_to_words([c.mask for c in inp.coatoms], nwords)
    ign = masks_to_words([s.mask for s in inp.ignored_sets], nwords)
    iat = masks_to_words([inp.ignored_atoms.mask], nwords)[0]
    depth_cap = min(len(inp.coatoms), n + 1) + 1
    counts, phi, max_depth, peak, empties = _count(coat, ign, iat, depth_cap)
    st = IterStats(n, len(inp.coatoms), _alpha(inp), int(phi), int(max_depth), int(peak))
    out = {d: int(c) for d, c in enumerate(counts) if c}
    top = _top_record(inp)
    if top is not None:
        out[-1] = 1
    st.emitted = sum(out.values())
    return out, st, bool(empties) or (top is not None and not top.atoms)
