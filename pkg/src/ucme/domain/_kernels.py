"""Hot numeric kernels, JIT-compiled when numba is available.

Both implementations of each kernel are algorithmically identical; the
pure-Python versions keep the package fully functional without numba.
"""

from __future__ import annotations

import math

import numpy as np

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:   # pragma: no cover - numba is an optional speedup
    _HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn
        if args and callable(args[0]):
            return args[0]
        return wrap


@njit(cache=True)
def fragment_labels(edge_a, edge_b, edge_len, assignment, min_len):
    """Union-find labels of same-room connectivity, once over all shared
    walls and once over walls of at least `min_len`.

    Returns two int32 arrays mapping each cell to a component root;
    unassigned cells keep themselves as root.
    """
    n = len(assignment)
    parent_all = np.arange(n, dtype=np.int32)
    parent_wide = np.arange(n, dtype=np.int32)
    for i in range(len(edge_a)):
        a = edge_a[i]
        r = assignment[a]
        if r < 0:
            continue
        b = edge_b[i]
        if assignment[b] != r:
            continue
        ra = a
        while parent_all[ra] != ra:
            parent_all[ra] = parent_all[parent_all[ra]]
            ra = parent_all[ra]
        rb = b
        while parent_all[rb] != rb:
            parent_all[rb] = parent_all[parent_all[rb]]
            rb = parent_all[rb]
        if ra != rb:
            parent_all[rb] = ra
        if edge_len[i] >= min_len:
            ra = a
            while parent_wide[ra] != ra:
                parent_wide[ra] = parent_wide[parent_wide[ra]]
                ra = parent_wide[ra]
            rb = b
            while parent_wide[rb] != rb:
                parent_wide[rb] = parent_wide[parent_wide[rb]]
                rb = parent_wide[rb]
            if ra != rb:
                parent_wide[rb] = ra
    for c in range(n):
        root = c
        while parent_all[root] != root:
            root = parent_all[root]
        parent_all[c] = root
        root = c
        while parent_wide[root] != root:
            root = parent_wide[root]
        parent_wide[c] = root
    return parent_all, parent_wide


@njit(cache=True)
def loop_geometry(points, offsets):
    """Area, perimeter and wall-angle orthogonality of closed loops.

    `points[offsets[i]:offsets[i+1]]` is loop i.  Returns per-loop areas
    and perimeters plus the orthogonality sum and angle count over all
    loops with at least 3 vertices.
    """
    nloops = len(offsets) - 1
    areas = np.zeros(nloops)
    perims = np.zeros(nloops)
    orth_sum = 0.0
    n_angles = 0
    half_pi = math.pi / 2.0
    three_q = 3.0 * math.pi / 4.0
    for li in range(nloops):
        start = offsets[li]
        end = offsets[li + 1]
        k = end - start
        if k < 2:
            continue
        area2 = 0.0
        perim = 0.0
        x1 = points[end - 1, 0]
        y1 = points[end - 1, 1]
        for i in range(start, end):
            x2 = points[i, 0]
            y2 = points[i, 1]
            area2 += x1 * y2 - x2 * y1
            perim += math.hypot(x2 - x1, y2 - y1)
            x1 = x2
            y1 = y2
        areas[li] = 0.5 * abs(area2)
        perims[li] = perim
        if k < 3:
            continue
        for i in range(k):
            cx = points[start + i, 0]
            cy = points[start + i, 1]
            j = i - 1 if i > 0 else k - 1
            px = points[start + j, 0]
            py = points[start + j, 1]
            j = i + 1 if i + 1 < k else 0
            nx = points[start + j, 0]
            ny = points[start + j, 1]
            ux = px - cx
            uy = py - cy
            vx = nx - cx
            vy = ny - cy
            nu = math.hypot(ux, uy)
            nv = math.hypot(vx, vy)
            if nu < 1e-12 or nv < 1e-12:
                continue
            c = (ux * vx + uy * vy) / (nu * nv)
            if c > 1.0:
                c = 1.0
            elif c < -1.0:
                c = -1.0
            theta = math.acos(c)
            t = 2.0 * theta / math.pi
            if theta < half_pi:
                orth_sum += t
            elif theta < three_q:
                orth_sum += 2.0 - t
            else:
                orth_sum += t - 1.0
            n_angles += 1
    return areas, perims, orth_sum, n_angles


@njit(cache=True)
def boundary_stats(v0, v1, x0, y0, x1, y1, offsets):
    """Trace each room's boundary edges into loops and measure them.

    Edges are grouped per room by `offsets`; v0/v1 are quantized endpoint
    ids, x/y the raw endpoint coordinates.  Returns the perimeter of each
    room's largest loop plus the orthogonality sum and count of all wall
    angles across every loop.
    """
    nrooms = len(offsets) - 1
    perims = np.zeros(nrooms)
    orth_sum = 0.0
    n_angles = 0
    half_pi = math.pi / 2.0
    three_q = 3.0 * math.pi / 4.0
    for ri in range(nrooms):
        lo = offsets[ri]
        hi = offsets[ri + 1]
        m = hi - lo
        if m == 0:
            continue
        ids = np.empty(2 * m, dtype=np.int64)
        for i in range(m):
            ids[2 * i] = v0[lo + i]
            ids[2 * i + 1] = v1[lo + i]
        uniq = np.unique(ids)
        nv = len(uniq)
        lv0 = np.empty(m, dtype=np.int32)
        lv1 = np.empty(m, dtype=np.int32)
        deg = np.zeros(nv, dtype=np.int32)
        for i in range(m):
            a = np.searchsorted(uniq, v0[lo + i])
            b = np.searchsorted(uniq, v1[lo + i])
            lv0[i] = a
            lv1[i] = b
            deg[a] += 1
            deg[b] += 1
        indptr = np.zeros(nv + 1, dtype=np.int32)
        for k in range(nv):
            indptr[k + 1] = indptr[k] + deg[k]
        incident = np.empty(2 * m, dtype=np.int32)
        fill = indptr[:nv].copy()
        for i in range(m):
            incident[fill[lv0[i]]] = i
            fill[lv0[i]] += 1
            incident[fill[lv1[i]]] = i
            fill[lv1[i]] += 1

        used = np.zeros(m, dtype=np.bool_)
        px = np.empty(2 * m + 1)
        py = np.empty(2 * m + 1)
        best_area = -1.0
        for start in range(m):
            if used[start]:
                continue
            used[start] = True
            cnt = 1
            px[0] = x0[lo + start]
            py[0] = y0[lo + start]
            home = lv0[start]
            cur = lv1[start]
            cx = x1[lo + start]
            cy = y1[lo + start]
            while cur != home:
                px[cnt] = cx
                py[cnt] = cy
                cnt += 1
                nxt = -1
                for t in range(indptr[cur], indptr[cur + 1]):
                    e = incident[t]
                    if not used[e]:
                        nxt = e
                        break
                if nxt < 0:
                    break   # open chain: degenerate boundary
                used[nxt] = True
                if lv0[nxt] == cur:
                    cur = lv1[nxt]
                    cx = x1[lo + nxt]
                    cy = y1[lo + nxt]
                else:
                    cur = lv0[nxt]
                    cx = x0[lo + nxt]
                    cy = y0[lo + nxt]
            if cnt < 2:
                continue
            area2 = 0.0
            perim = 0.0
            ax = px[cnt - 1]
            ay = py[cnt - 1]
            for i in range(cnt):
                bx = px[i]
                by = py[i]
                area2 += ax * by - bx * ay
                perim += math.hypot(bx - ax, by - ay)
                ax = bx
                ay = by
            area = 0.5 * abs(area2)
            if area > best_area:
                best_area = area
                perims[ri] = perim
            if cnt < 3:
                continue
            for i in range(cnt):
                cx_ = px[i]
                cy_ = py[i]
                j = i - 1 if i > 0 else cnt - 1
                ux = px[j] - cx_
                uy = py[j] - cy_
                j = i + 1 if i + 1 < cnt else 0
                vx = px[j] - cx_
                vy = py[j] - cy_
                nu = math.hypot(ux, uy)
                nv_ = math.hypot(vx, vy)
                if nu < 1e-12 or nv_ < 1e-12:
                    continue
                c = (ux * vx + uy * vy) / (nu * nv_)
                if c > 1.0:
                    c = 1.0
                elif c < -1.0:
                    c = -1.0
                theta = math.acos(c)
                t = 2.0 * theta / math.pi
                if theta < half_pi:
                    orth_sum += t
                elif theta < three_q:
                    orth_sum += 2.0 - t
                else:
                    orth_sum += t - 1.0
                n_angles += 1
    return perims, orth_sum, n_angles


def warm_up_kernels() -> bool:
    """Trigger JIT compilation on tiny inputs; returns numba availability."""
    fragment_labels(
        np.array([0], dtype=np.int32), np.array([1], dtype=np.int32),
        np.array([1.0]), np.array([0, 0], dtype=np.int16), 0.5,
    )
    loop_geometry(
        np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]),
        np.array([0, 3], dtype=np.int64),
    )
    boundary_stats(
        np.array([0, 1, 2], dtype=np.int64),
        np.array([1, 2, 0], dtype=np.int64),
        np.array([0.0, 1.0, 0.0]), np.array([0.0, 0.0, 1.0]),
        np.array([1.0, 0.0, 0.0]), np.array([0.0, 1.0, 0.0]),
        np.array([0, 3], dtype=np.int64),
    )
    return _HAVE_NUMBA
