"""Orientation and in-circle predicates with a floating-point filter.

Each predicate first evaluates the determinant in double precision and
accepts the sign when it clears a forward error bound (Shewchuk's stage-A
bounds). Otherwise the determinant is recomputed exactly with rationals;
doubles convert to ``Fraction`` without rounding, so the fallback is exact.
"""

from fractions import Fraction

_EPS = 2.0 ** -53
_CCW_BOUND = (3.0 + 16.0 * _EPS) * _EPS
_ICC_BOUND = (10.0 + 96.0 * _EPS) * _EPS


def _sign(x):
    return (x > 0) - (x < 0)


def orient2d(a, b, c):
    """Sign of the signed area of triangle (a, b, c): +1 ccw, -1 cw, 0 collinear."""
    detleft = (a[0] - c[0]) * (b[1] - c[1])
    detright = (a[1] - c[1]) * (b[0] - c[0])
    det = detleft - detright
    bound = _CCW_BOUND * (abs(detleft) + abs(detright))
    if det > bound or -det > bound:
        return 1 if det > 0 else -1
    return _orient2d_exact(a, b, c)


def _orient2d_exact(a, b, c):
    ax, ay = Fraction(a[0]), Fraction(a[1])
    bx, by = Fraction(b[0]), Fraction(b[1])
    cx, cy = Fraction(c[0]), Fraction(c[1])
    return _sign((ax - cx) * (by - cy) - (ay - cy) * (bx - cx))


def incircle(a, b, c, d):
    """Positive when d lies strictly inside the circle through ccw (a, b, c)."""
    adx, ady = a[0] - d[0], a[1] - d[1]
    bdx, bdy = b[0] - d[0], b[1] - d[1]
    cdx, cdy = c[0] - d[0], c[1] - d[1]
    bdxcdy, cdxbdy = bdx * cdy, cdx * bdy
    cdxady, adxcdy = cdx * ady, adx * cdy
    adxbdy, bdxady = adx * bdy, bdx * ady
    alift = adx * adx + ady * ady
    blift = bdx * bdx + bdy * bdy
    clift = cdx * cdx + cdy * cdy
    det = (alift * (bdxcdy - cdxbdy)
           + blift * (cdxady - adxcdy)
           + clift * (adxbdy - bdxady))
    permanent = ((abs(bdxcdy) + abs(cdxbdy)) * alift
                 + (abs(cdxady) + abs(adxcdy)) * blift
                 + (abs(adxbdy) + abs(bdxady)) * clift)
    bound = _ICC_BOUND * permanent
    if det > bound or -det > bound:
        return 1 if det > 0 else -1
    return _incircle_exact(a, b, c, d)


def _incircle_exact(a, b, c, d):
    dx, dy = Fraction(d[0]), Fraction(d[1])
    adx, ady = Fraction(a[0]) - dx, Fraction(a[1]) - dy
    bdx, bdy = Fraction(b[0]) - dx, Fraction(b[1]) - dy
    cdx, cdy = Fraction(c[0]) - dx, Fraction(c[1]) - dy
    det = ((adx * adx + ady * ady) * (bdx * cdy - cdx * bdy)
           + (bdx * bdx + bdy * bdy) * (cdx * ady - adx * cdy)
           + (cdx * cdx + cdy * cdy) * (adx * bdy - bdx * ady))
    return _sign(det)


def incircle_perturbed(points, ia, ib, ic, id_):
    """In-circle sign with cocircular ties broken symbolically by index.

    The lifted coordinate of point ``k`` is raised by an infinitesimal
    ``eps_k`` with ``eps_0 >> eps_1 >> ...``, so the lowest index involved
    decides a tie. ``(ia, ib, ic)`` must be counter-clockwise. Never
    returns 0 for distinct points.
    """
    a, b, c, d = points[ia], points[ib], points[ic], points[id_]
    s = incircle(a, b, c, d)
    if s:
        return s
    # coefficient of eps_k in the lifted determinant, for each vertex
    for k in sorted((ia, ib, ic, id_)):
        if k == ia:
            s = orient2d(b, c, d)
        elif k == ib:
            s = -orient2d(a, c, d)
        elif k == ic:
            s = orient2d(a, b, d)
        else:
            s = -orient2d(a, b, c)
        if s:
            return s
    return 0


def diametral_sign(u, v, w):
    """Sign of (w - u).(w - v): negative iff w is strictly inside the circle
    with diameter uv, zero when w is on it."""
    p1 = (w[0] - u[0]) * (w[0] - v[0])
    p2 = (w[1] - u[1]) * (w[1] - v[1])
    det = p1 + p2
    bound = 8.0 * _EPS * (abs(p1) + abs(p2))
    if det > bound or -det > bound:
        return 1 if det > 0 else -1
    wx, wy = Fraction(w[0]), Fraction(w[1])
    exact = ((wx - Fraction(u[0])) * (wx - Fraction(v[0]))
             + (wy - Fraction(u[1])) * (wy - Fraction(v[1])))
    return _sign(exact)
