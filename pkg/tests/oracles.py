"""Independent cross-check helpers for the test suite.

Everything here recomputes expected values from first principles with raw
Fraction arithmetic (or guarded int64 batches), deliberately avoiding the
library code paths under test.  Generators draw small rational data so all
downstream computations stay exact.
"""

from fractions import Fraction
from math import gcd

import numpy as np

from subgrad.polykernel import Polyhedron


def point_in_hrep(point, hrep) -> bool:
    """Membership decided directly from facet rows, no library call."""
    for h in hrep:
        if sum(n * x for n, x in zip(h.normal, point)) > h.offset:
            return False
    return True


def translate_subset(a_hrep, b_vertices, x) -> bool:
    """Whether x + conv(b_vertices) lies inside the H-polytope a_hrep."""
    for v in b_vertices:
        shifted = tuple(xi + vi for xi, vi in zip(x, v))
        if not point_in_hrep(shifted, a_hrep):
            return False
    return True


def common_scale(fractions) -> int:
    lcm = 1
    for f in fractions:
        lcm = lcm * f.denominator // gcd(lcm, f.denominator)
    return lcm


def lattice_points(lo, hi, n):
    """n evenly spaced rationals per axis, inclusive, as a list of tuples."""
    axes = []
    for a, b in zip(lo, hi):
        if a == b:
            axes.append([a] * n)
        else:
            step = (b - a) / (n - 1)
            axes.append([a + step * i for i in range(n)])
    points = [()]
    for axis in axes:
        points = [p + (v,) for p in points for v in axis]
    return points


def erosion_grid_check(a: Polyhedron, b: Polyhedron, star: Polyhedron, n: int = 21):
    """Compares star membership with the definitional check x + B in A on an
    n^dim lattice over A's bounding box, batched in int64 after verifying the
    products cannot overflow.  Returns the number of lattice points compared.
    """
    a = a.canonical()
    b = b.canonical()
    star = star.canonical()
    assert not b.rays, "oracle handles polytopes only"
    lo, hi = [], []
    for i in range(a.dim):
        coords = [v[i] for v in a.vertices]
        lo.append(min(coords) - 1)
        hi.append(max(coords) + 1)
    pts = lattice_points(lo, hi, n)

    # Definitional side: x + B in A  <=>  N_a x <= min_v (o_a - N_a v).
    na = [h.normal for h in a.hrep]
    oa = [h.offset for h in a.hrep]
    thresh = []
    for row, off in zip(na, oa):
        thresh.append(min(off - sum(r * v for r, v in zip(row, vert)) for vert in b.vertices))

    ns = [h.normal for h in star.hrep] if not star.is_empty else None
    os_ = [h.offset for h in star.hrep] if not star.is_empty else None

    scale = common_scale(
        [c for p in pts for c in p]
        + [c for row in na for c in row]
        + oa
        + thresh
        + ([c for row in ns for c in row] + os_ if ns is not None else [])
    )
    # int64 overflow guard: dot products of scaled ints must fit comfortably
    def scaled(rows):
        return [[int(c * scale) for c in row] for row in rows]

    ip = scaled(pts)
    ina = scaled(na)
    ith = [int(t * scale * scale) for t in thresh]
    bound = max(
        (max(abs(c) for r in ip for c in r) if ip else 0),
        (max(abs(c) for r in ina for c in r) if ina else 1),
    )
    if bound * bound * a.dim >= 2**62:
        # fall back to exact Fractions for pathological scales
        for x in pts:
            expected = translate_subset(a.hrep, b.vertices, x)
            got = point_in_hrep(x, star.hrep) if not star.is_empty else False
            assert expected == got, f"erosion mismatch at {x}"
        return len(pts)

    xp = np.array(ip, dtype=np.int64)
    inside_def = (xp @ np.array(ina, dtype=np.int64).T <= np.array(ith, dtype=np.int64)).all(axis=1)
    if star.is_empty:
        inside_star = np.zeros(len(pts), dtype=bool)
    else:
        ins = np.array(scaled(ns), dtype=np.int64)
        ios = np.array([int(o * scale * scale) for o in os_], dtype=np.int64)
        sbound = max(abs(int(c)) for r in scaled(ns) for c in r) if ns else 1
        assert max(bound, sbound) ** 2 * a.dim < 2**62
        inside_star = (xp @ ins.T <= ios).all(axis=1)
    mism = np.flatnonzero(inside_def != inside_star)
    assert mism.size == 0, f"erosion mismatch at lattice point {pts[mism[0]]}"
    return len(pts)


def pa_value(pieces, x) -> Fraction:
    """max over affine pieces, raw arithmetic."""
    return max(sum(a * xi for a, xi in zip(p.slope, x)) + p.intercept for p in pieces)


def pa_directional(pieces, x, d) -> Fraction:
    """One-sided derivative of a finite max of affine pieces: the best slope
    among pieces active at x."""
    vals = [
        (sum(a * xi for a, xi in zip(p.slope, x)) + p.intercept, p) for p in pieces
    ]
    top = max(v for v, _ in vals)
    return max(sum(a * di for a, di in zip(p.slope, d)) for v, p in vals if v == top)


# ---------------------------------------------------------------------------
# random rational data
# ---------------------------------------------------------------------------


def rand_fraction(rng, span=8, max_den_pow=2) -> Fraction:
    num = int(rng.integers(-span, span + 1))
    den = 2 ** int(rng.integers(0, max_den_pow + 1))
    return Fraction(num, den)


def rand_vector(rng, dim, span=8, max_den_pow=2):
    return tuple(rand_fraction(rng, span, max_den_pow) for _ in range(dim))


def rand_polytope(rng, dim, max_verts=8, span=6) -> Polyhedron:
    n = int(rng.integers(1, max_verts + 1))
    verts = [rand_vector(rng, dim, span) for _ in range(n)]
    return Polyhedron.from_vrep(verts, dim=dim)


def rand_pa(rng, dim, max_pieces=6, slope_span=4, max_den_pow=1):
    from subgrad.funcmodel import AffinePiece, PAConvexFunction

    n = int(rng.integers(1, max_pieces + 1))
    pieces = [
        AffinePiece(
            rand_vector(rng, dim, slope_span, max_den_pow),
            rand_fraction(rng, 4, max_den_pow),
        )
        for _ in range(n)
    ]
    return PAConvexFunction(pieces)


def rand_box(rng, dim, span=4) -> Polyhedron:
    lo = [rand_fraction(rng, span) for _ in range(dim)]
    hi = [l + abs(rand_fraction(rng, span)) + 1 for l in lo]
    rows = []
    for i in range(dim):
        e = tuple(Fraction(1 if j == i else 0) for j in range(dim))
        rows.append((e, hi[i]))
        rows.append((tuple(-c for c in e), -lo[i]))
    return Polyhedron.from_hrep(rows, dim)


def rand_dc(rng, dim, max_pieces=4, restricted=False):
    """Random DC pair; when restricted, g gets a box domain around zero."""
    from subgrad.funcmodel import DCFunction, PAConvexFunction

    g = rand_pa(rng, dim, max_pieces)
    h = rand_pa(rng, dim, max_pieces)
    if restricted:
        box = rand_box(rng, dim)
        g = PAConvexFunction(g.pieces, domain=box)
    return DCFunction(g, h)
