"""Bounded Voronoi tessellation and the derived cell/edge structure.

The tessellation is the geometric substrate every layout lives on: sites
define convex cells clipped to the plot rectangle, and rooms are unions of
cells.  Clipping works by mirroring boundary-near sites across each plot
edge before triangulating; inside the rectangle the diagram is unchanged by
the mirrors, while each boundary cell gains an exact edge on the plot
border.  A cheap exactness check (cell areas must tile the plot) catches
the rare case where the mirror margin was too small, and the build retries
with a wider margin.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import Delaunay, QhullError, cKDTree

# Border-edge neighbor codes, stored in edge_cells[:, 1].
BORDER_LEFT = -1
BORDER_RIGHT = -2
BORDER_BOTTOM = -3
BORDER_TOP = -4

_AREA_TOL = 1e-6
_MIN_EDGE_LEN = 1e-12


class TessellationError(ValueError):
    """Raised when a site set admits no valid clipped tessellation."""


class Tessellation:
    """Voronoi cells of `sites` clipped to [0, width] x [0, height].

    Edge arrays describe the full planar subdivision:
      edge_cells[e] = (a, b)  with b >= 0 for a shared wall between cells
                      a and b, or a border code (< 0) for a wall of cell a
                      lying on the plot boundary.
      edge_verts[e] = endpoint indices into `verts`.
    """

    __slots__ = (
        "sites", "width", "height", "verts", "edge_cells", "edge_verts",
        "edge_len", "areas", "touches_border", "interior_fraction",
        "largest_component_fraction", "_nbr_indptr", "_nbr_cells",
        "_nbr_edges", "_edge_key_map", "_nbr_lists", "_nbr_edge_lists",
        "_nbr_sets", "_interior_lists",
    )

    def __init__(self, sites: np.ndarray, width: float, height: float,
                 verts, edge_cells, edge_verts, edge_len, areas):
        self.sites = sites
        self.width = width
        self.height = height
        self.verts = verts
        self.edge_cells = edge_cells
        self.edge_verts = edge_verts
        self.edge_len = edge_len
        self.areas = areas

        n = len(sites)
        border = edge_cells[:, 1] < 0
        self.touches_border = np.zeros(n, dtype=bool)
        self.touches_border[edge_cells[border, 0]] = True
        self.interior_fraction = 1.0 - self.touches_border.mean()

        interior = ~border
        a = edge_cells[interior, 0]
        b = edge_cells[interior, 1]
        eids = np.nonzero(interior)[0]
        src = np.concatenate([a, b])
        dst = np.concatenate([b, a])
        via = np.concatenate([eids, eids]).astype(np.int32)
        order = np.argsort(src, kind="stable")
        src, dst, via = src[order], dst[order], via[order]
        self._nbr_indptr = np.searchsorted(src, np.arange(n + 1)).astype(np.int32)
        self._nbr_cells = dst.astype(np.int32)
        self._nbr_edges = via

        graph = csr_matrix((np.ones(len(a)), (a, b)), shape=(n, n))
        ncomp, labels = connected_components(graph, directed=False)
        if ncomp == 1:
            self.largest_component_fraction = 1.0
        else:
            self.largest_component_fraction = np.bincount(labels).max() / n
        self._edge_key_map = None
        self._nbr_lists = None
        self._nbr_edge_lists = None
        self._nbr_sets = None
        self._interior_lists = None

    @property
    def n_cells(self) -> int:
        return len(self.sites)

    def neighbors(self, cell: int) -> np.ndarray:
        return self._nbr_cells[self._nbr_indptr[cell]:self._nbr_indptr[cell + 1]]

    def neighbor_edges(self, cell: int) -> np.ndarray:
        """Edge ids of the shared walls around `cell` (border walls excluded)."""
        return self._nbr_edges[self._nbr_indptr[cell]:self._nbr_indptr[cell + 1]]

    def neighbor_lists(self) -> list[list[int]]:
        """Adjacency as plain int lists (fast to iterate); built lazily."""
        if self._nbr_lists is None:
            cells = self._nbr_cells.tolist()
            indptr = self._nbr_indptr.tolist()
            self._nbr_lists = [
                cells[indptr[c]:indptr[c + 1]] for c in range(self.n_cells)
            ]
        return self._nbr_lists

    def neighbor_edge_lists(self) -> list[list[int]]:
        if self._nbr_edge_lists is None:
            edges = self._nbr_edges.tolist()
            indptr = self._nbr_indptr.tolist()
            self._nbr_edge_lists = [
                edges[indptr[c]:indptr[c + 1]] for c in range(self.n_cells)
            ]
        return self._nbr_edge_lists

    def neighbor_sets(self) -> list[set[int]]:
        if self._nbr_sets is None:
            self._nbr_sets = [set(lst) for lst in self.neighbor_lists()]
        return self._nbr_sets

    def interior_edge_arrays(self):
        """Interior edges as parallel arrays (cell_a, cell_b, length)."""
        if self._interior_lists is None:
            mask = self.edge_cells[:, 1] >= 0
            self._interior_lists = (
                np.ascontiguousarray(self.edge_cells[mask, 0]),
                np.ascontiguousarray(self.edge_cells[mask, 1]),
                np.ascontiguousarray(self.edge_len[mask]),
            )
        return self._interior_lists

    def edge_key(self, edge_id: int) -> tuple[int, int]:
        """Stable identifier for an edge: (min cell, max cell) for shared
        walls, (cell, border code) for plot-border walls."""
        a, b = self.edge_cells[edge_id]
        if b < 0:
            return (int(a), int(b))
        return (min(int(a), int(b)), max(int(a), int(b)))

    def edge_id_of(self, key: tuple[int, int]) -> int | None:
        if self._edge_key_map is None:
            a = self.edge_cells[:, 0].astype(np.int64)
            b = self.edge_cells[:, 1].astype(np.int64)
            lo = np.where(b < 0, a, np.minimum(a, b))
            hi = np.where(b < 0, b, np.maximum(a, b))
            self._edge_key_map = {
                (la, lb): e
                for e, (la, lb) in enumerate(zip(lo.tolist(), hi.tolist()))
            }
        return self._edge_key_map.get(key)

    def edge_segment(self, edge_id: int) -> np.ndarray:
        return self.verts[self.edge_verts[edge_id]]

    def cell_polygon(self, cell: int) -> np.ndarray:
        """Vertices of one convex cell in counterclockwise order."""
        mask = (self.edge_cells[:, 0] == cell) | (self.edge_cells[:, 1] == cell)
        vids = np.unique(self.edge_verts[mask])
        pts = self.verts[vids]
        center = self.sites[cell]
        order = np.argsort(np.arctan2(pts[:, 1] - center[1], pts[:, 0] - center[0]))
        return pts[order]


def build_tessellation(sites: np.ndarray, width: float, height: float,
                       margin: float | None = None) -> Tessellation:
    """Build the clipped Voronoi tessellation of `sites`.

    Only sites within a margin of each plot side are mirrored across it.
    By default the margin is derived per side from the largest
    nearest-site distance along that side, which provably covers every
    cell that can reach the boundary; the exactness check and margin
    -doubling retry remain as a safety net.  Raises TessellationError for
    degenerate inputs (duplicate sites) that no margin can fix.
    """
    sites = np.ascontiguousarray(sites, dtype=np.float64)
    n = len(sites)
    if n < 3:
        raise TessellationError("need at least 3 sites")
    if margin is None:
        margins = _side_margins(sites, width, height)
    else:
        margins = np.full(4, float(margin))
    full = max(width, height)
    last_error = "exactness check failed"
    while True:
        result = _try_build(sites, width, height, margins)
        if isinstance(result, Tessellation):
            return result
        last_error = result
        if margins.min() >= full:
            raise TessellationError(
                f"degenerate site set ({last_error}); sites may coincide"
            )
        margins = np.minimum(margins * 2.0, full)


_BOUNDARY_SAMPLE_STEP = 0.5


def _side_margins(sites: np.ndarray, width: float, height: float) -> np.ndarray:
    """Per-side mirror margins that are guaranteed to cover every cell
    touching that side.

    A cell touches side S at a point q only if its site lies within
    d(q) = distance from q to the nearest site, so max_q d(q) over the
    side bounds the required margin.  d is 1-Lipschitz along the side,
    hence sampling every `step` meters and adding step/2 is sound.
    """
    step = _BOUNDARY_SAMPLE_STEP
    nx = max(2, int(math.ceil(width / step)) + 1)
    ny = max(2, int(math.ceil(height / step)) + 1)
    xs = np.linspace(0.0, width, nx)
    ys = np.linspace(0.0, height, ny)
    samples = np.concatenate([
        np.stack([np.zeros(ny), ys], axis=1),            # left
        np.stack([np.full(ny, width), ys], axis=1),      # right
        np.stack([xs, np.zeros(nx)], axis=1),            # bottom
        np.stack([xs, np.full(nx, height)], axis=1),     # top
    ])
    d, _ = cKDTree(sites).query(samples)
    slack = step / 2.0 + 1e-6
    out = np.empty(4)
    out[0] = d[:ny].max() + slack
    out[1] = d[ny:2 * ny].max() + slack
    out[2] = d[2 * ny:2 * ny + nx].max() + slack
    out[3] = d[2 * ny + nx:].max() + slack
    return out


def _try_build(sites: np.ndarray, width: float, height: float,
               margins: np.ndarray) -> Tessellation | str:
    n = len(sites)
    allpts, side_counts = _mirror(sites, width, height, margins)
    try:
        tri = Delaunay(allpts)
    except QhullError as exc:
        return f"triangulation failed: {exc}"

    simp = tri.simplices
    pa = allpts[simp[:, 0]]
    pb = allpts[simp[:, 1]]
    pc = allpts[simp[:, 2]]
    ab = pb - pa
    ac = pc - pa
    denom = 2.0 * (ab[:, 0] * ac[:, 1] - ab[:, 1] * ac[:, 0])
    degenerate = np.abs(denom) < 1e-300
    if degenerate.any():
        denom = np.where(degenerate, 1.0, denom)
    ab2 = ab[:, 0] ** 2 + ab[:, 1] ** 2
    ac2 = ac[:, 0] ** 2 + ac[:, 1] ** 2
    ux = (ac[:, 1] * ab2 - ab[:, 1] * ac2) / denom
    uy = (ab[:, 0] * ac2 - ac[:, 0] * ab2) / denom
    verts = pa + np.stack([ux, uy], axis=1)

    ntri = len(simp)
    tid = np.arange(ntri)
    rp_parts, rv_parts = [], []
    for k in range(3):
        nb = tri.neighbors[:, k]
        s1 = simp[:, (k + 1) % 3]
        s2 = simp[:, (k + 2) % 3]
        on_hull = nb == -1
        if ((on_hull) & ((s1 < n) | (s2 < n))).any():
            return "a cell is unbounded"
        keep = nb > tid
        rp_parts.append(np.stack([s1[keep], s2[keep]], axis=1))
        rv_parts.append(np.stack([tid[keep], nb[keep]], axis=1))
    rp = np.vstack(rp_parts)
    rv = np.vstack(rv_parts)

    involves_cell = rp.min(axis=1) < n
    rp, rv = rp[involves_cell], rv[involves_cell]
    seg = verts[rv[:, 1]] - verts[rv[:, 0]]
    lengths = np.hypot(seg[:, 0], seg[:, 1])
    real = lengths > _MIN_EDGE_LEN
    rp, rv, lengths = rp[real], rv[real], lengths[real]

    # Ridges to a mirrored site are walls on the plot border.
    hi = rp.max(axis=1)
    lo = rp.min(axis=1)
    is_border = hi >= n
    offsets = np.cumsum(np.concatenate([[n], side_counts]))
    side = np.clip(np.searchsorted(offsets, hi, side="right") - 1, 0, 3)
    edge_cells = np.stack(
        [lo, np.where(is_border, -1 - side, hi)], axis=1
    ).astype(np.int32)
    edge_verts = rv.astype(np.int32)

    edge_cells, edge_verts, lengths = _merge_border_edges(
        edge_cells, edge_verts, lengths, verts
    )

    areas = np.zeros(n)
    v0 = verts[edge_verts[:, 0]]
    v1 = verts[edge_verts[:, 1]]
    for col in (0, 1):
        owner = edge_cells[:, col]
        mask = owner >= 0
        s = sites[owner[mask]]
        cross = (v0[mask, 0] - s[:, 0]) * (v1[mask, 1] - s[:, 1]) \
            - (v0[mask, 1] - s[:, 1]) * (v1[mask, 0] - s[:, 0])
        areas += np.bincount(owner[mask], weights=0.5 * np.abs(cross),
                             minlength=n)

    if abs(areas.sum() - width * height) > _AREA_TOL * max(1.0, width * height):
        return "cell areas do not tile the plot"
    counts = np.bincount(edge_cells[edge_cells >= 0], minlength=n)
    if counts.min() < 3:
        return "a cell has fewer than 3 walls"
    uv = np.concatenate([v0, v1])
    if uv[:, 0].min() < -1e-7 or uv[:, 0].max() > width + 1e-7 \
            or uv[:, 1].min() < -1e-7 or uv[:, 1].max() > height + 1e-7:
        return "a cell spills outside the plot"

    return Tessellation(sites, width, height, verts, edge_cells, edge_verts,
                        lengths, areas)


def _mirror(sites: np.ndarray, width: float, height: float,
            margins: np.ndarray):
    """Mirror boundary-near sites across each side.

    Returns the stacked points and the per-side mirror counts; sides are
    ordered left, right, bottom, top.
    """
    x, y = sites[:, 0], sites[:, 1]
    parts = [sites]
    counts = []
    for sel, axis, line in (
        (x < margins[0], 0, 0.0),
        (x > width - margins[1], 0, width),
        (y < margins[2], 1, 0.0),
        (y > height - margins[3], 1, height),
    ):
        p = sites[sel].copy()
        p[:, axis] = 2.0 * line - p[:, axis]
        parts.append(p)
        counts.append(len(p))
    return np.vstack(parts), np.asarray(counts)


def _merge_border_edges(edge_cells, edge_verts, lengths, verts):
    """Collapse collinear border fragments of one cell wall into one edge.

    A convex cell meets each plot side in at most one segment, but that
    segment can arrive as several ridges (one per mirrored neighbor).
    """
    border = edge_cells[:, 1] < 0
    if not border.any():
        return edge_cells, edge_verts, lengths
    key = edge_cells[border, 0].astype(np.int64) * 4 + (-1 - edge_cells[border, 1])
    uniq, inverse, counts = np.unique(key, return_inverse=True, return_counts=True)
    if (counts == 1).all():
        return edge_cells, edge_verts, lengths

    b_idx = np.nonzero(border)[0]
    keep = np.ones(len(edge_cells), dtype=bool)
    new_verts = edge_verts.copy()
    new_len = lengths.copy()
    for g in np.nonzero(counts > 1)[0]:
        members = b_idx[inverse == g]
        vids = edge_verts[members].ravel()
        pts = verts[vids]
        side = -1 - edge_cells[members[0], 1]
        axis = 1 if side in (0, 1) else 0   # free axis along the border line
        lo = vids[np.argmin(pts[:, axis])]
        hi = vids[np.argmax(pts[:, axis])]
        first = members[0]
        new_verts[first] = (lo, hi)
        new_len[first] = lengths[members].sum()
        keep[members[1:]] = False
    return edge_cells[keep], new_verts[keep], new_len[keep]


def reflect_into(values: np.ndarray, limit: float) -> np.ndarray:
    """Reflect coordinates back into [0, limit] (billiard wrap)."""
    m = np.mod(values, 2.0 * limit)
    return np.where(m <= limit, m, 2.0 * limit - m)


def polygon_area(points: np.ndarray) -> float:
    x, y = points[:, 0], points[:, 1]
    return 0.5 * abs(float(np.dot(x, np.roll(y, 1)) - np.dot(y, np.roll(x, 1))))
