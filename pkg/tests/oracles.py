"""Independent reference implementations used by the tests.

Nothing here imports toporeg internals: Delaunay and alpha values are found
by brute force over all triples with exact rational arithmetic, and
persistence by dense left-to-right reduction of the boundary matrix.
"""

from fractions import Fraction
from itertools import combinations

import numpy as np
from scipy.sparse.csgraph import minimum_spanning_tree
from scipy.spatial.distance import pdist, squareform


def _frac(pts):
    return [(Fraction(float(x)), Fraction(float(y))) for x, y in pts]


def _orient(a, b, c):
    return (a[0] - c[0]) * (b[1] - c[1]) - (a[1] - c[1]) * (b[0] - c[0])


def _det3(m):
    return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))


def _lifted_incircle(P, lifts, a, b, c, d):
    """Lifted determinant; positive when d is inside the circle of ccw abc."""
    rows = [[P[k][0] - P[d][0], P[k][1] - P[d][1], lifts[k] - lifts[d]] for k in (a, b, c)]
    return _det3(rows)


def brute_delaunay(pts, delta=Fraction(1, 2 ** 40)):
    """Triangles with an empty circumcircle, found over all triples.

    Each point's lifted coordinate is raised by ``delta ** (k + 1)``, so
    cocircular ties are decided by the lowest index involved. ``delta``
    must be small relative to the coordinates' exact determinants, which
    holds for small integer lattices and generic random clouds.
    """
    P = _frac(pts)
    n = len(P)
    lifts = [x * x + y * y + delta ** (k + 1) for k, (x, y) in enumerate(P)]
    tris = []
    for a, b, c in combinations(range(n), 3):
        o = _orient(P[a], P[b], P[c])
        if o == 0:
            continue
        ccw = (a, b, c) if o > 0 else (a, c, b)
        if all(_lifted_incircle(P, lifts, *ccw, d) < 0 for d in range(n) if d not in (a, b, c)):
            tris.append((a, b, c))
    return tris


def _circumradius_sq(P, a, b, c):
    (ax, ay), (bx, by), (cx, cy) = P[a], P[b], P[c]
    bx, by, cx, cy = bx - ax, by - ay, cx - ax, cy - ay
    d = 2 * (bx * cy - by * cx)
    ux = (cy * (bx * bx + by * by) - by * (cx * cx + cy * cy)) / d
    uy = (bx * (cx * cx + cy * cy) - cx * (bx * bx + by * by)) / d
    return ux * ux + uy * uy


def brute_alpha(pts):
    """Simplices and alpha values of the alpha complex, by definition.

    An edge whose diametral disk holds no point strictly inside gets its
    squared half-length; otherwise the smallest circumradius among its
    triangles. Returns ``(simplices, values)`` as lists.
    """
    P = _frac(pts)
    n = len(P)
    tris = brute_delaunay(pts) if n >= 3 else []
    edges = sorted({e for t in tris for e in combinations(t, 2)}) if tris else (
        [(0, 1)] if n == 2 else [])
    tri_val = {t: _circumradius_sq(P, *t) for t in tris}
    simplices = [(i,) for i in range(n)]
    values = [Fraction(0)] * n
    for u, v in edges:
        blocked = any((P[w][0] - P[u][0]) * (P[w][0] - P[v][0])
                      + (P[w][1] - P[u][1]) * (P[w][1] - P[v][1]) < 0
                      for w in range(n) if w not in (u, v))
        if blocked:
            val = min(tri_val[t] for t in tris if u in t and v in t)
        else:
            val = ((P[u][0] - P[v][0]) ** 2 + (P[u][1] - P[v][1]) ** 2) / 4
        simplices.append((u, v))
        values.append(val)
    for t in tris:
        simplices.append(t)
        values.append(tri_val[t])
    return simplices, [float(v) for v in values]


def naive_diagrams(simplices, values, max_dim=1):
    """Persistence pairs by exhaustive left-to-right column reduction.

    Returns, per dimension, a sorted list of
    ``(birth_vertices, death_vertices_or_None, birth, death)`` with
    zero-persistence pairs removed.
    """
    key = [(values[k], len(s), s) for k, s in enumerate(simplices)]
    order = sorted(range(len(simplices)), key=lambda k: key[k])
    ordered = [simplices[k] for k in order]
    vals = [values[k] for k in order]
    pos = {s: i for i, s in enumerate(ordered)}
    m = len(ordered)
    D = np.zeros((m, m), dtype=np.uint8)
    for j, s in enumerate(ordered):
        if len(s) > 1:
            for face in combinations(s, len(s) - 1):
                D[pos[face], j] = 1

    def low(j):
        nz = np.nonzero(D[:, j])[0]
        return nz[-1] if len(nz) else -1

    for j in range(m):
        changed = True
        while changed:
            changed = False
            lj = low(j)
            if lj < 0:
                break
            for i in range(j):
                if low(i) == lj:
                    D[:, j] ^= D[:, i]
                    changed = True
                    break
    out = [[] for _ in range(max_dim + 1)]
    killed = set()
    for j in range(m):
        lj = low(j)
        if lj >= 0:
            killed.add(lj)
            dim = len(ordered[lj]) - 1
            if dim <= max_dim and vals[lj] != vals[j]:
                out[dim].append((ordered[lj], ordered[j], vals[lj], vals[j]))
    for i in range(m):
        dim = len(ordered[i]) - 1
        if dim <= max_dim and i not in killed and low(i) < 0:
            out[dim].append((ordered[i], None, vals[i], float("inf")))
    return [sorted(d, key=lambda r: (r[0], r[1] or ())) for d in out]


def mst_deaths(pts):
    """Squared half-lengths of Euclidean minimum-spanning-tree edges, sorted."""
    T = minimum_spanning_tree(squareform(pdist(pts))).toarray()
    return np.sort((T[T > 0] / 2.0) ** 2)


def central_difference(f, x, h=1e-6):
    """Central finite-difference gradient of a scalar function of an array."""
    x = np.array(x, dtype=float)
    g = np.zeros_like(x)
    flat = x.reshape(-1)
    gflat = g.reshape(-1)
    for k in range(flat.size):
        old = flat[k]
        flat[k] = old + h
        fp = f(x)
        flat[k] = old - h
        fm = f(x)
        flat[k] = old
        gflat[k] = (fp - fm) / (2 * h)
    return g


def relative_error(a, b):
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    scale = max(np.linalg.norm(a), np.linalg.norm(b))
    return 0.0 if scale == 0 else float(np.linalg.norm(a - b) / scale)
