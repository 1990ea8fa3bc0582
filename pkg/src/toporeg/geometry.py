"""Planar Delaunay triangulation and alpha filtration values.

Simplices are plain sorted tuples of point indices; a simplex with ``k + 1``
vertices has dimension ``k``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.spatial import cKDTree

from .errors import AllCollinearError, DuplicatePointsError, ToporegError
from .predicates import diametral_sign, incircle_perturbed, orient2d

DUPLICATE_TOL = 1e-12
_GHOST = -1

Simplex = Tuple[int, ...]


def check_points(points, tol=DUPLICATE_TOL) -> np.ndarray:
    """Return ``points`` as a finite ``(n, 2)`` float array without duplicates."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ToporegError(f"expected an (n, 2) array of coordinates, got shape {pts.shape}")
    if not np.all(np.isfinite(pts)):
        raise ToporegError("coordinates must be finite")
    if len(pts) > 1:
        close = cKDTree(pts).query_pairs(tol, p=np.inf, output_type="ndarray")
        if len(close):
            i, j = sorted(int(v) for v in close[np.lexsort(close.T[::-1])][0])
            raise DuplicatePointsError(f"points {i} and {j} coincide within {tol:g}")
    return pts


@dataclass(frozen=True)
class PointCloud:
    """Ordered planar points with optional string ids."""

    points: np.ndarray
    ids: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        pts = check_points(self.points)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        if self.ids is not None:
            ids = tuple(str(i) for i in self.ids)
            if len(ids) != len(pts):
                raise ToporegError(f"{len(ids)} ids for {len(pts)} points")
            object.__setattr__(self, "ids", ids)

    def __len__(self):
        return len(self.points)

    def labels(self) -> Tuple[str, ...]:
        return self.ids if self.ids is not None else tuple(str(i) for i in range(len(self)))


def _as_array(cloud) -> np.ndarray:
    if isinstance(cloud, PointCloud):
        return cloud.points
    return check_points(cloud)


# --------------------------------------------------------------------------
# Delaunay triangulation (incremental Bowyer-Watson with ghost triangles)
# --------------------------------------------------------------------------

class _Triangulator:
    """Incremental construction; ghost triangles ``(a, b, GHOST)`` close the
    hull so that points outside it are handled like interior ones."""

    def __init__(self, pts):
        self.pts = pts
        self.tris = []
        self.edges = {}  # directed edge (u, v) -> id of the triangle holding it
        self.last = 0
        self.turn = 0

    def _add(self, a, b, c):
        t = len(self.tris)
        self.tris.append((a, b, c))
        self.edges[(a, b)] = t
        self.edges[(b, c)] = t
        self.edges[(c, a)] = t
        if c != _GHOST:
            self.last = t
        return t

    def _remove(self, t):
        a, b, c = self.tris[t]
        del self.edges[(a, b)], self.edges[(b, c)], self.edges[(c, a)]
        self.tris[t] = None

    def _in_conflict(self, t, p):
        a, b, c = self.tris[t]
        pts = self.pts
        if c == _GHOST:
            # outside the hull edge b -> a, or on its open segment
            s = orient2d(pts[a], pts[b], pts[p])
            if s:
                return s > 0
            pa, pb, pp = pts[a], pts[b], pts[p]
            return (pp[0] - pa[0]) * (pp[0] - pb[0]) + (pp[1] - pa[1]) * (pp[1] - pb[1]) < 0
        return incircle_perturbed(pts, a, b, c, p) > 0

    def _locate(self, p):
        pts = self.pts
        pp = pts[p]
        t = self.last
        while True:
            tri = self.tris[t]
            if tri[2] == _GHOST:
                return t
            self.turn = (self.turn + 1) % 3
            for k in range(3):
                x, y = tri[(self.turn + k) % 3], tri[(self.turn + k + 1) % 3]
                if orient2d(pts[x], pts[y], pp) < 0:
                    t = self.edges[(y, x)]
                    break
            else:
                return t

    def start(self, i, j, k):
        if orient2d(self.pts[i], self.pts[j], self.pts[k]) < 0:
            j, k = k, j
        self._add(i, j, k)
        self._add(j, i, _GHOST)
        self._add(k, j, _GHOST)
        self._add(i, k, _GHOST)
        self.last = 0

    def insert(self, p):
        t0 = self._locate(p)
        cavity = {t0}
        stack = [t0]
        boundary = []
        checked = {}
        while stack:
            t = stack.pop()
            a, b, c = self.tris[t]
            for x, y in ((a, b), (b, c), (c, a)):
                nb = self.edges[(y, x)]
                if nb in cavity:
                    continue
                hit = checked.get(nb)
                if hit is None:
                    hit = checked[nb] = self._in_conflict(nb, p)
                if hit:
                    cavity.add(nb)
                    stack.append(nb)
                else:
                    boundary.append((x, y))
        for t in sorted(cavity):
            self._remove(t)
        for x, y in boundary:
            if x == _GHOST:
                self._add(y, p, x)
            elif y == _GHOST:
                self._add(p, x, y)
            else:
                self._add(x, y, p)

    def triangles(self):
        out = [tuple(sorted(t)) for t in self.tris if t is not None and t[2] != _GHOST]
        return sorted(out)


def delaunay(cloud) -> Tuple[list, list]:
    """Delaunay triangulation of at least three planar points.

    Returns ``(edges, triangles)`` as lexicographically sorted lists of sorted
    index tuples. Cocircular configurations are resolved by symbolic
    perturbation favouring the lowest vertex index, so the output depends
    only on the input coordinates and their order.
    """
    pts_arr = _as_array(cloud)
    n = len(pts_arr)
    if n < 3:
        raise ToporegError("delaunay needs at least 3 points")
    pts = [tuple(map(float, p)) for p in pts_arr]
    k = next((k for k in range(2, n) if orient2d(pts[0], pts[1], pts[k]) != 0), None)
    if k is None:
        raise AllCollinearError(f"all {n} points are collinear")
    tri = _Triangulator(pts)
    tri.start(0, 1, k)
    for p in range(2, n):
        if p != k:
            tri.insert(p)
    triangles = tri.triangles()
    edges = sorted({e for a, b, c in triangles for e in ((a, b), (a, c), (b, c))})
    return edges, triangles


# --------------------------------------------------------------------------
# alpha filtration
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Filtration:
    """Simplices of the Delaunay triangulation with their alpha values.

    ``simplices`` lists vertices (index ``i`` is point ``i``), then edges, then
    triangles, each block in lexicographic order. ``source[k]`` is ``k`` for a
    Gabriel simplex and otherwise the index of the triangle whose squared
    circumradius the value was inherited from. ``order`` sorts simplices by
    (value, dimension, vertices).
    """

    simplices: Tuple[Simplex, ...]
    values: np.ndarray
    source: np.ndarray
    order: np.ndarray
    dims: np.ndarray = field(repr=False)

    def __len__(self):
        return len(self.simplices)

    @property
    def n_points(self) -> int:
        return int(np.sum(self.dims == 0))

    def is_gabriel(self, k: int) -> bool:
        return int(self.source[k]) == k

    def index(self, simplex: Sequence[int]) -> int:
        return self._lookup[tuple(sorted(simplex))]

    @property
    def _lookup(self):
        cache = self.__dict__.get("_lookup_cache")
        if cache is None:
            cache = {s: i for i, s in enumerate(self.simplices)}
            object.__setattr__(self, "_lookup_cache", cache)
        return cache


def circumradius_sq(a, b, c) -> np.ndarray:
    """Squared circumradii of triangles given as (m, 2) vertex arrays."""
    b = np.asarray(b, dtype=float) - a
    c = np.asarray(c, dtype=float) - a
    bb = np.einsum("ij,ij->i", b, b)
    cc = np.einsum("ij,ij->i", c, c)
    d = 2.0 * (b[:, 0] * c[:, 1] - b[:, 1] * c[:, 0])
    ux = (c[:, 1] * bb - b[:, 1] * cc) / d
    uy = (b[:, 0] * cc - c[:, 0] * bb) / d
    return ux * ux + uy * uy


def alpha_filtration(cloud) -> Filtration:
    """Alpha values of every simplex of the Delaunay triangulation.

    Triangles get their squared circumradius. An edge is Gabriel when no
    opposite vertex of an incident triangle lies strictly inside its
    diametral circle (points on the circle do not count); it then gets its
    squared half-length, and otherwise the smallest value among the
    triangles whose opposite vertex breaks the condition.
    """
    pts = _as_array(cloud)
    n = len(pts)
    if n == 0:
        raise ToporegError("empty point cloud")
    if n == 1:
        edges, triangles = [], []
    elif n == 2:
        edges, triangles = [(0, 1)], []
    else:
        edges, triangles = delaunay(pts)

    simplices = [(i,) for i in range(n)] + edges + triangles
    ne, nt = len(edges), len(triangles)
    values = np.zeros(len(simplices))
    source = np.arange(len(simplices))
    dims = np.repeat([0, 1, 2], [n, ne, nt])

    if nt:
        tri = np.array(triangles)
        values[n + ne:] = circumradius_sq(pts[tri[:, 0]], pts[tri[:, 1]], pts[tri[:, 2]])
    if ne:
        e = np.array(edges)
        diff = pts[e[:, 0]] - pts[e[:, 1]]
        values[n:n + ne] = 0.25 * np.einsum("ij,ij->i", diff, diff)

    edge_index = {e: n + i for i, e in enumerate(edges)}
    plist = [tuple(map(float, p)) for p in pts]
    for t, (a, b, c) in enumerate(triangles):
        ti = n + ne + t
        for (u, v), w in (((a, b), c), ((a, c), b), ((b, c), a)):
            if diametral_sign(plist[u], plist[v], plist[w]) < 0:
                ei = edge_index[(u, v)]
                if source[ei] == ei or values[ti] < values[source[ei]]:
                    source[ei] = ti
    inherited = np.nonzero(source != np.arange(len(simplices)))[0]
    values[inherited] = values[source[inherited]]

    lex = [s + (-1,) * (3 - len(s)) for s in simplices]
    lex = np.array(lex)
    order = np.lexsort((lex[:, 2], lex[:, 1], lex[:, 0], dims, values))
    return Filtration(tuple(simplices), values, source, order, dims)


# --------------------------------------------------------------------------
# gradients of filtration values
# --------------------------------------------------------------------------

def circumradius_sq_grad(a, b, c) -> np.ndarray:
    """Gradient of the squared circumradius with respect to a, b and c.

    Returns a (3, 2) array with one row per vertex.
    """
    a = np.asarray(a, dtype=float)
    bx, by = np.asarray(b, dtype=float) - a
    cx, cy = np.asarray(c, dtype=float) - a
    B = bx * bx + by * by
    C = cx * cx + cy * cy
    D = 2.0 * (bx * cy - by * cx)
    ux = (cy * B - by * C) / D
    uy = (bx * C - cx * B) / D
    r2 = ux * ux + uy * uy
    k = 2.0 / D

    def part(dnx, dny, dd):
        return k * (ux * dnx + uy * dny - r2 * dd)

    g_b = (part(2 * bx * cy, C - 2 * bx * cx, 2 * cy),
           part(2 * by * cy - C, -2 * by * cx, -2 * cx))
    g_c = (part(-2 * cx * by, 2 * cx * bx - B, -2 * by),
           part(B - 2 * cy * by, 2 * cy * bx, 2 * bx))
    g_b = np.array(g_b)
    g_c = np.array(g_c)
    return np.stack([-(g_b + g_c), g_b, g_c])


def value_grad_local(pts: np.ndarray, filtration: Filtration, k: int):
    """Gradient of the value of simplex ``k`` restricted to the vertices of
    its defining simplex: returns ``(vertex_indices, (m, 2) gradients)``."""
    s = filtration.simplices[int(filtration.source[k])]
    if len(s) == 1:
        return s, np.zeros((1, 2))
    if len(s) == 2:
        u, v = s
        g = 0.5 * (pts[u] - pts[v])
        return s, np.stack([g, -g])
    return s, circumradius_sq_grad(pts[s[0]], pts[s[1]], pts[s[2]])


def alpha_value_gradient(cloud, filtration: Filtration, simplex_index: int) -> np.ndarray:
    """Dense (n, 2) gradient of one filtration value with respect to all points."""
    pts = _as_array(cloud)
    if not 0 <= simplex_index < len(filtration):
        raise IndexError(f"simplex index {simplex_index} out of range")
    out = np.zeros_like(pts)
    verts, g = value_grad_local(pts, filtration, simplex_index)
    out[list(verts)] += g
    return out
