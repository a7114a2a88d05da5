"""Exact rational polyhedra with double-description conversion.

A polyhedron carries an H-representation (finite list of halfspaces
``<normal, x> <= offset``) and/or a V-representation (vertices plus recession
rays; lineality is stored as opposite ray pairs).  Conversion between the two
runs the double description method on the homogenization cone, entirely over
``fractions.Fraction`` — no floating point anywhere.

Canonical form
--------------
``Polyhedron.canonical()`` produces a representation that depends only on the
point set: facets and rays are scaled to coprime integer entries, vertices and
rays are projected orthogonally off the lineality space, the lineality basis
is brought to reduced row echelon form and emitted as +/- ray pairs, and all
lists are sorted lexicographically.  Structural comparison of canonical forms
therefore decides set equality.

The empty set is canonically ``x1 <= -1, -x1 <= -1`` with no vertices; the
whole space has an empty facet list.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

from .errors import (
    CapExceeded,
    DimensionMismatch,
    EmptySetError,
    NegativeEps,
    NotACone,
    ParseError,
    PointNotInSet,
    UnsupportedNorm,
)
from .rationals import (
    ONE,
    ZERO,
    Vector,
    format_rational,
    format_vector,
    is_zero_vector,
    lexmin_sign,
    orthogonalize,
    parse_rational,
    parse_vector,
    primitive,
    project_off,
    rref,
    vadd,
    vdot,
    vneg,
    vscale,
    vsub,
    vzero,
)


@dataclass
class Caps:
    """Size limits enforced by representation conversion."""

    max_dim: int = 8
    max_facets: int = 100_000
    max_generators: int = 100_000


CAPS = Caps()


class Halfspace(NamedTuple):
    """Closed halfspace ``<normal, x> <= offset``."""

    normal: Vector
    offset: Fraction

    def scaled_primitive(self) -> "Halfspace":
        joint = primitive(tuple(self.normal) + (self.offset,))
        return Halfspace(joint[:-1], joint[-1])


def halfspace(normal: Sequence, offset) -> Halfspace:
    return Halfspace(parse_vector(normal), parse_rational(offset))


@dataclass(frozen=True)
class NormSpec:
    """Which norm scales epsilon terms: l1, linf, or a polyhedral l2 stand-in.

    ``l2approx`` carries a facet count (>= 4, even); its unit ball is inscribed
    in the Euclidean ball and its dual ball circumscribes it, so exact results
    computed with it bracket the Euclidean ones.
    """

    kind: str
    facets: int | None = None

    def __post_init__(self):
        if self.kind not in ("l1", "linf", "l2approx"):
            raise ParseError(f"unknown norm kind {self.kind!r}")
        if self.kind == "l2approx":
            if self.facets is None or self.facets < 4 or self.facets % 2 != 0 or self.facets > 512:
                raise ParseError("l2approx needs an even facet count in [4, 512]")
        elif self.facets is not None:
            raise ParseError(f"{self.kind} takes no facet count")

    @staticmethod
    def parse(text: str) -> "NormSpec":
        text = text.strip().lower()
        if text == "l1":
            return L1
        if text == "linf":
            return LINF
        if text.startswith("l2approx:"):
            try:
                k = int(text.split(":", 1)[1])
            except ValueError as exc:
                raise ParseError(f"bad norm spec {text!r}") from exc
            return NormSpec("l2approx", k)
        raise ParseError(f"bad norm spec {text!r}")

    def to_json(self) -> str:
        if self.kind == "l2approx":
            return f"l2approx:{self.facets}"
        return self.kind


L1 = NormSpec("l1")
LINF = NormSpec("linf")


# ---------------------------------------------------------------------------
# Double description core
# ---------------------------------------------------------------------------


def _unit_vectors(dim: int) -> list[Vector]:
    return [tuple(ONE if j == i else ZERO for j in range(dim)) for i in range(dim)]


def _cone_generators(ineqs: Sequence[Vector], dim: int) -> tuple[list[Vector], list[Vector]]:
    """Minimal generators (lines, rays) of ``{x : a.x <= 0 for a in ineqs}``.

    Incremental double description with the combinatorial adjacency test;
    lineality is eliminated eagerly so the ray part stays pointed modulo the
    line span.  Rays are kept as primitive integer vectors.
    """
    lines: list[Vector] = _unit_vectors(dim)
    rays: list[tuple[Vector, frozenset[int]]] = []
    for idx, a in enumerate(ineqs):
        if is_zero_vector(a):
            continue
        lvals = [vdot(a, l) for l in lines]
        pivot = next((i for i, v in enumerate(lvals) if v != 0), None)
        if pivot is not None:
            l0, v0 = lines[pivot], lvals[pivot]
            r0 = l0 if v0 < 0 else vneg(l0)
            r0v = v0 if v0 < 0 else -v0
            new_lines = []
            for i, l in enumerate(lines):
                if i == pivot:
                    continue
                lv = lvals[i]
                new_lines.append(l if lv == 0 else vsub(l, vscale(lv / r0v, r0)))
            new_rays = []
            for r, zset in rays:
                rv = vdot(a, r)
                if rv != 0:
                    r = vsub(r, vscale(rv / r0v, r0))
                new_rays.append((primitive(r), zset | {idx}))
            new_rays.append((primitive(r0), frozenset(range(idx))))
            lines = new_lines
            rays = new_rays
            continue
        values = [vdot(a, r) for r, _ in rays]
        if all(v <= 0 for v in values):
            rays = [
                (r, zset | {idx}) if values[i] == 0 else (r, zset)
                for i, (r, zset) in enumerate(rays)
            ]
            continue
        keep: list[tuple[Vector, frozenset[int]]] = []
        pos: list[tuple[Vector, frozenset[int], Fraction]] = []
        neg: list[tuple[Vector, frozenset[int], Fraction]] = []
        for (r, zset), v in zip(rays, values):
            if v > 0:
                pos.append((r, zset, v))
            elif v < 0:
                neg.append((r, zset, v))
                keep.append((r, zset))
            else:
                keep.append((r, zset | {idx}))
        all_zsets = [zset for _, zset in rays]
        combos: list[tuple[Vector, frozenset[int]]] = []
        for rp, zp, vp in pos:
            for rn, zn, vn in neg:
                common = zp & zn
                adjacent = True
                for other in all_zsets:
                    if other is zp or other is zn:
                        continue
                    if common <= other:
                        adjacent = False
                        break
                if not adjacent:
                    continue
                w = vadd(vscale(vp, rn), vscale(-vn, rp))
                combos.append((primitive(w), common | {idx}))
        rays = keep + combos
        if len(rays) > CAPS.max_generators:
            raise CapExceeded(
                f"generator count {len(rays)} exceeds cap {CAPS.max_generators}"
            )
    return lines, [r for r, _ in rays]


def _hrep_to_vrep(
    halfspaces: Sequence[Halfspace], dim: int
) -> tuple[list[Vector], list[Vector], list[Vector]]:
    """Raw (vertices, rays, lines) of an H-rep via homogenization."""
    ineqs = [tuple(h.normal) + (-h.offset,) for h in halfspaces]
    ineqs.append(vzero(dim) + (-ONE,))  # t >= 0
    lines, rays = _cone_generators(ineqs, dim + 1)
    for l in lines:
        if l[dim] != 0:
            raise AssertionError("homogenization line with nonzero last coordinate")
    vertices = []
    cone_rays = []
    for r in rays:
        t = r[dim]
        if t > 0:
            vertices.append(tuple(x / t for x in r[:dim]))
        else:
            cone_rays.append(r[:dim])
    return vertices, cone_rays, [l[:dim] for l in lines]


def _canonical_vrep(
    vertices: Iterable[Vector], rays: Iterable[Vector], lines: Iterable[Vector]
) -> tuple[tuple[Vector, ...], tuple[Vector, ...]]:
    """Project off the lineality span and sort; lines become +/- ray pairs."""
    line_basis = rref(lines)
    ortho = orthogonalize(line_basis)
    verts = sorted({project_off(v, ortho) for v in vertices})
    ray_set = set()
    for r in rays:
        p = primitive(project_off(r, ortho))
        if not is_zero_vector(p):
            ray_set.add(p)
    for l in line_basis:
        p = primitive(l)
        ray_set.add(p)
        ray_set.add(vneg(p))
    return tuple(verts), tuple(sorted(ray_set))


def _empty_hrep(dim: int) -> tuple[Halfspace, ...]:
    e1 = tuple(ONE if i == 0 else ZERO for i in range(dim))
    return (Halfspace(e1, -ONE), Halfspace(vneg(e1), -ONE))


def _vrep_to_hrep(
    vertices: Sequence[Vector], rays: Sequence[Vector], dim: int
) -> tuple[Halfspace, ...]:
    """Canonical facets of conv(vertices) + cone(rays) via the polar cone."""
    if not vertices:
        return _empty_hrep(dim)
    gens = {primitive(tuple(v) + (ONE,)) for v in vertices}
    for r in rays:
        p = primitive(tuple(r) + (ZERO,))
        if not is_zero_vector(p):
            gens.add(p)
    lines, polar_rays = _cone_generators(sorted(gens), dim + 1)
    line_basis = rref(lines)
    ortho = orthogonalize(line_basis)
    facets = set()

    def emit(z: Vector) -> None:
        normal, neg_offset = z[:dim], z[dim]
        if is_zero_vector(normal):
            # 0 <= offset with offset >= 0: trivial, dropped.
            return
        facets.add(Halfspace(normal, -neg_offset).scaled_primitive())

    for r in polar_rays:
        p = primitive(project_off(r, ortho))
        if not is_zero_vector(p):
            emit(p)
    for l in line_basis:
        p = primitive(l)
        emit(p)
        emit(vneg(p))
    if len(facets) > CAPS.max_facets:
        raise CapExceeded(f"facet count {len(facets)} exceeds cap {CAPS.max_facets}")
    return tuple(sorted(facets))


# ---------------------------------------------------------------------------
# Polyhedron
# ---------------------------------------------------------------------------


class Polyhedron:
    """A (possibly empty, possibly unbounded) rational polyhedron.

    Instances are value objects; canonicalization is cached in place and all
    public accessors return canonical data.
    """

    __slots__ = ("dim", "_raw_hrep", "_raw_vrep", "_hrep", "_vertices", "_rays", "_empty")

    def __init__(self, dim: int, raw_hrep=None, raw_vrep=None):
        if dim < 1:
            raise DimensionMismatch("dimension must be >= 1")
        if dim > CAPS.max_dim:
            raise CapExceeded(f"dimension {dim} exceeds cap {CAPS.max_dim}")
        self.dim = dim
        self._raw_hrep = raw_hrep
        self._raw_vrep = raw_vrep
        self._hrep: tuple[Halfspace, ...] | None = None
        self._vertices: tuple[Vector, ...] | None = None
        self._rays: tuple[Vector, ...] | None = None
        self._empty: bool | None = None

    # -- constructors --------------------------------------------------

    @classmethod
    def from_hrep(cls, halfspaces: Iterable, dim: int) -> "Polyhedron":
        hs = []
        for h in halfspaces:
            if not isinstance(h, Halfspace):
                h = Halfspace(parse_vector(h[0]), parse_rational(h[1]))
            if len(h.normal) != dim:
                raise DimensionMismatch("halfspace normal has wrong length")
            hs.append(Halfspace(tuple(Fraction(x) for x in h.normal), Fraction(h.offset)))
        return cls(dim, raw_hrep=tuple(hs))

    @classmethod
    def from_vrep(cls, vertices: Iterable, rays: Iterable = (), *, dim: int) -> "Polyhedron":
        vs = [parse_vector(v, dim) for v in vertices]
        rs = [parse_vector(r, dim) for r in rays]
        return cls(dim, raw_vrep=(tuple(vs), tuple(rs)))

    @classmethod
    def whole_space(cls, dim: int) -> "Polyhedron":
        return cls(dim, raw_hrep=())

    @classmethod
    def empty(cls, dim: int) -> "Polyhedron":
        return cls(dim, raw_vrep=((), ()))

    @classmethod
    def singleton(cls, point: Sequence, dim: int | None = None) -> "Polyhedron":
        p = parse_vector(point)
        return cls.from_vrep([p], dim=dim or len(p))

    # -- canonicalization ----------------------------------------------

    def _canonicalize(self) -> None:
        if self._hrep is not None:
            return
        if self._raw_hrep is not None:
            raw = sorted({h.scaled_primitive() for h in self._raw_hrep})
            verts, rays, lines = _hrep_to_vrep(raw, self.dim)
            if not verts:
                self._vertices, self._rays = (), ()
                self._hrep = _empty_hrep(self.dim)
                self._empty = True
                return
            cv, cr = _canonical_vrep(verts, rays, lines)
        else:
            verts, rays = self._raw_vrep
            if not verts:
                self._vertices, self._rays = (), ()
                self._hrep = _empty_hrep(self.dim)
                self._empty = True
                return
            hrep = _vrep_to_hrep(verts, rays, self.dim)
            verts2, rays2, lines2 = _hrep_to_vrep(hrep, self.dim)
            if not verts2:
                raise AssertionError("nonempty V-rep produced an empty H-rep")
            cv, cr = _canonical_vrep(verts2, rays2, lines2)
        self._vertices, self._rays = cv, cr
        self._hrep = _vrep_to_hrep(cv, cr, self.dim)
        self._empty = False

    def canonical(self) -> "Polyhedron":
        self._canonicalize()
        return self

    @property
    def hrep(self) -> tuple[Halfspace, ...]:
        self._canonicalize()
        return self._hrep

    @property
    def vertices(self) -> tuple[Vector, ...]:
        self._canonicalize()
        return self._vertices

    @property
    def rays(self) -> tuple[Vector, ...]:
        self._canonicalize()
        return self._rays

    @property
    def is_empty(self) -> bool:
        if self._empty is None:
            if self._raw_vrep is not None and self._hrep is None:
                self._empty = not self._raw_vrep[0]
            else:
                self._canonicalize()
        return self._empty

    def is_bounded(self) -> bool:
        return not self.is_empty and not self.rays

    # -- comparison / display -------------------------------------------

    def _key(self):
        self._canonicalize()
        return (self.dim, self._hrep, self._vertices, self._rays)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polyhedron):
            return NotImplemented
        if self.dim != other.dim:
            return False
        return self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def __repr__(self) -> str:
        if self.is_empty:
            return f"Polyhedron(dim={self.dim}, empty)"
        return (
            f"Polyhedron(dim={self.dim}, facets={len(self.hrep)}, "
            f"vertices={len(self.vertices)}, rays={len(self.rays)})"
        )

    def pretty(self) -> str:
        """Human-readable inequality listing."""
        if self.is_empty:
            return "  (empty set)"
        if not self.hrep:
            return "  (whole space)"
        lines = []
        for h in self.hrep:
            terms = []
            for i, a in enumerate(h.normal):
                if a == 0:
                    continue
                coeff = format_rational(a)
                if coeff == "1":
                    terms.append(f"+ x{i + 1}")
                elif coeff == "-1":
                    terms.append(f"- x{i + 1}")
                elif a > 0:
                    terms.append(f"+ {coeff} x{i + 1}")
                else:
                    terms.append(f"- {format_rational(-a)} x{i + 1}")
            lhs = " ".join(terms).lstrip("+ ") or "0"
            lines.append(f"  {lhs} <= {format_rational(h.offset)}")
        return "\n".join(lines)

    # -- serialization ---------------------------------------------------

    def to_json(self) -> dict:
        self._canonicalize()
        return {
            "dim": self.dim,
            "hrep": [
                {"normal": format_vector(h.normal), "offset": format_rational(h.offset)}
                for h in self._hrep
            ],
            "vrep": {
                "vertices": [format_vector(v) for v in self._vertices],
                "rays": [format_vector(r) for r in self._rays],
            },
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Polyhedron":
        if not isinstance(obj, dict) or "dim" not in obj:
            raise ParseError("polyhedron object needs a 'dim' field")
        dim = obj["dim"]
        if not isinstance(dim, int):
            raise ParseError("'dim' must be an integer")
        have_h = obj.get("hrep") is not None
        have_v = obj.get("vrep") is not None
        if not have_h and not have_v:
            raise ParseError("polyhedron needs an 'hrep' or a 'vrep'")
        from_h = from_v = None
        if have_h:
            hs = [
                Halfspace(parse_vector(e["normal"], dim), parse_rational(e["offset"]))
                for e in obj["hrep"]
            ]
            from_h = cls.from_hrep(hs, dim)
        if have_v:
            v = obj["vrep"]
            from_v = cls.from_vrep(v.get("vertices", ()), v.get("rays", ()), dim=dim)
        if from_h is not None and from_v is not None:
            if from_h != from_v:
                raise ParseError("hrep and vrep describe different sets")
            return from_h
        return from_h if from_h is not None else from_v


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------


def _same_dim(*polys: Polyhedron) -> int:
    dims = {p.dim for p in polys}
    if len(dims) != 1:
        raise DimensionMismatch(f"mixed dimensions {sorted(dims)}")
    return dims.pop()


def dual_description(p: Polyhedron) -> Polyhedron:
    """Force both representations; idempotent canonicalization."""
    return p.canonical()


def support_function(p: Polyhedron, direction: Sequence) -> Fraction | float:
    """sup over p of <direction, x>; +inf when unbounded in that direction."""
    d = parse_vector(direction, p.dim)
    if p.is_empty:
        raise EmptySetError("support function of the empty set")
    for r in p.rays:
        if vdot(d, r) > 0:
            return math.inf
    return max(vdot(d, v) for v in p.vertices)


def contains_point(p: Polyhedron, point: Sequence) -> bool:
    x = parse_vector(point, p.dim)
    hrep = p._raw_hrep if p._hrep is None and p._raw_hrep is not None else p.hrep
    return all(vdot(h.normal, x) <= h.offset for h in hrep)


def strictly_contains_point(p: Polyhedron, point: Sequence) -> bool:
    """Interior membership (canonical facets satisfied strictly)."""
    x = parse_vector(point, p.dim)
    if p.is_empty:
        return False
    return all(vdot(h.normal, x) < h.offset for h in p.hrep)


def contains_polyhedron(p: Polyhedron, q: Polyhedron) -> tuple[bool, Vector | None]:
    """Is q a subset of p?  On failure returns a point of q outside p."""
    _same_dim(p, q)
    if q.is_empty:
        return True, None
    if p.is_empty:
        return False, q.vertices[0]
    hrep = p.hrep
    for v in q.vertices:
        for h in hrep:
            if vdot(h.normal, v) > h.offset:
                return False, v
    base = q.vertices[0]
    for r in q.rays:
        for h in hrep:
            slope = vdot(h.normal, r)
            if slope > 0:
                slack = h.offset - vdot(h.normal, base)
                t = slack / slope + 1 if slack > 0 else ONE
                return False, vadd(base, vscale(t, r))
    return True, None


def intersect(p: Polyhedron, q: Polyhedron) -> Polyhedron:
    dim = _same_dim(p, q)
    hp = p._raw_hrep if p._raw_hrep is not None else p.hrep
    hq = q._raw_hrep if q._raw_hrep is not None else q.hrep
    return Polyhedron.from_hrep(tuple(hp) + tuple(hq), dim)


def intersect_many(polys: Sequence[Polyhedron]) -> Polyhedron:
    if not polys:
        raise ValueError("intersect_many needs at least one operand")
    dim = _same_dim(*polys)
    rows: list[Halfspace] = []
    for p in polys:
        rows.extend(p._raw_hrep if p._raw_hrep is not None else p.hrep)
    return Polyhedron.from_hrep(rows, dim)


def minkowski_sum(p: Polyhedron, q: Polyhedron) -> Polyhedron:
    """Pointwise sum; empty + anything = empty by convention."""
    dim = _same_dim(p, q)
    if p.is_empty or q.is_empty:
        return Polyhedron.empty(dim)
    verts = [vadd(v, w) for v in p.vertices for w in q.vertices]
    rays = list(p.rays) + list(q.rays)
    return Polyhedron.from_vrep(verts, rays, dim=dim)


def translate(p: Polyhedron, shift: Sequence) -> Polyhedron:
    t = parse_vector(shift, p.dim)
    if p.is_empty:
        return Polyhedron.empty(p.dim)
    hrep = p._raw_hrep if p._raw_hrep is not None else p.hrep
    moved = [Halfspace(h.normal, h.offset + vdot(h.normal, t)) for h in hrep]
    return Polyhedron.from_hrep(moved, p.dim)


def star_difference(a: Polyhedron, b: Polyhedron) -> Polyhedron:
    """Erosion ``a (-*) b = {x : x + b subseteq a}``.

    Computed by shifting every facet of ``a`` inward by the support value of
    ``b`` in the facet normal direction.  Conventions: b empty -> whole space;
    a empty (b nonempty) -> empty.
    """
    dim = _same_dim(a, b)
    if b.is_empty:
        return Polyhedron.whole_space(dim)
    if a.is_empty:
        return Polyhedron.empty(dim)
    shifted = []
    for h in a.hrep:
        s = support_function(b, h.normal)
        if s == math.inf:
            return Polyhedron.empty(dim)
        shifted.append(Halfspace(h.normal, h.offset - s))
    return Polyhedron.from_hrep(shifted, dim)


def affine_image(p: Polyhedron, matrix: Sequence[Sequence], offset: Sequence | None = None) -> Polyhedron:
    """Image ``{M x + c : x in p}`` in the row dimension of M."""
    rows = [parse_vector(r, p.dim) for r in matrix]
    out_dim = len(rows)
    if out_dim < 1:
        raise DimensionMismatch("affine image needs at least one output row")
    c = parse_vector(offset, out_dim) if offset is not None else vzero(out_dim)
    if p.is_empty:
        return Polyhedron.empty(out_dim)
    verts = [vadd(tuple(vdot(r, v) for r in rows), c) for v in p.vertices]
    rays = []
    for ray in p.rays:
        img = tuple(vdot(r, ray) for r in rows)
        if not is_zero_vector(img):
            rays.append(img)
    return Polyhedron.from_vrep(verts, rays, dim=out_dim)


def normal_cone_at(p: Polyhedron, point: Sequence) -> Polyhedron:
    """Outer normal cone of p at a point of p (cone of active facet normals)."""
    x = parse_vector(point, p.dim)
    if not contains_point(p, x):
        raise PointNotInSet(f"{x} is not in the polyhedron")
    active = [h.normal for h in p.hrep if vdot(h.normal, x) == h.offset]
    return Polyhedron.from_vrep([vzero(p.dim)], active, dim=p.dim)


def tangent_cone_at(p: Polyhedron, point: Sequence) -> Polyhedron:
    """Cone of feasible directions at a point of p (polar of the normal cone)."""
    x = parse_vector(point, p.dim)
    if not contains_point(p, x):
        raise PointNotInSet(f"{x} is not in the polyhedron")
    rows = [Halfspace(h.normal, ZERO) for h in p.hrep if vdot(h.normal, x) == h.offset]
    return Polyhedron.from_hrep(rows, p.dim)


def cone_is_linear_subspace(c: Polyhedron) -> bool:
    """True iff the polyhedral cone c equals -c.

    Raises NotACone unless c is a cone (canonically: single vertex at 0).
    """
    if c.is_empty or c.vertices != (vzero(c.dim),):
        raise NotACone("expected a cone generated by rays from the origin")
    rays = set(c.rays)
    return all(vneg(r) in rays for r in rays)


def conic_hull(p: Polyhedron) -> Polyhedron:
    """Smallest closed convex cone containing p (generated by its V-rep)."""
    if p.is_empty:
        raise EmptySetError("conic hull of the empty set")
    gens = [v for v in p.vertices if not is_zero_vector(v)]
    gens.extend(p.rays)
    return Polyhedron.from_vrep([vzero(p.dim)], gens, dim=p.dim)


def bounding_box(p: Polyhedron) -> list[tuple[Fraction, Fraction]]:
    if p.is_empty:
        raise EmptySetError("bounding box of the empty set")
    if p.rays:
        raise EmptySetError("bounding box of an unbounded polyhedron")
    verts = p.vertices
    return [
        (min(v[i] for v in verts), max(v[i] for v in verts))
        for i in range(p.dim)
    ]


# ---------------------------------------------------------------------------
# Norm balls and gap distance
# ---------------------------------------------------------------------------


def _l2approx_directions(k: int) -> list[Vector]:
    """k unit-norm rational plane directions in +/- pairs, near-uniform."""
    half = k // 2
    dirs: list[Vector] = []
    for j in range(half):
        theta = math.pi * j / half
        t = Fraction(math.tan(theta / 2)).limit_denominator(8 * k)
        num = 1 + t * t
        u = ((1 - t * t) / num, 2 * t / num)
        dirs.append(u)
    out = []
    seen = set()
    for u in dirs:
        for v in (u, vneg(u)):
            if v not in seen:
                seen.add(v)
                out.append(v)
    if len(out) != k:
        raise UnsupportedNorm(f"could not realize {k} distinct l2approx facets")
    return out


def norm_unit_ball(norm: NormSpec, dim: int) -> Polyhedron:
    """Unit ball of the (primal) norm; for l2approx it is inscribed in the
    Euclidean ball (touching at rational points), so the approx norm dominates
    the Euclidean norm."""
    if norm.kind == "l1":
        units = _unit_vectors(dim)
        return Polyhedron.from_vrep([u for v in units for u in (v, vneg(v))], dim=dim)
    if norm.kind == "linf":
        rows = [Halfspace(s, ONE) for v in _unit_vectors(dim) for s in (v, vneg(v))]
        return Polyhedron.from_hrep(rows, dim)
    if dim == 1:
        return Polyhedron.from_vrep([(ONE,), (-ONE,)], dim=1)
    if dim == 2:
        return Polyhedron.from_vrep(_l2approx_directions(norm.facets), dim=2)
    raise UnsupportedNorm("l2approx is available in dimensions 1 and 2 only")


def dual_norm_ball(norm: NormSpec, eps, dim: int) -> Polyhedron:
    """Ball of radius eps in the dual norm (l1 <-> linf; l2approx's dual ball
    circumscribes the Euclidean eps-ball with k facets)."""
    e = parse_rational(eps)
    if e < 0:
        raise NegativeEps(f"radius must be nonnegative, got {e}")
    if norm.kind == "l1":
        rows = [Halfspace(s, e) for v in _unit_vectors(dim) for s in (v, vneg(v))]
        return Polyhedron.from_hrep(rows, dim)
    if norm.kind == "linf":
        units = _unit_vectors(dim)
        return Polyhedron.from_vrep(
            [vscale(e, u) for v in units for u in (v, vneg(v))], dim=dim
        )
    if dim == 1:
        return Polyhedron.from_vrep([(e,), (-e,)], dim=1)
    if dim == 2:
        rows = [Halfspace(u, e) for u in _l2approx_directions(norm.facets)]
        return Polyhedron.from_hrep(rows, 2)
    raise UnsupportedNorm("l2approx is available in dimensions 1 and 2 only")


def l2approx_hausdorff_bound(norm: NormSpec, eps: float) -> float:
    """Upper bound on the Hausdorff distance between the l2approx dual ball of
    radius eps and the Euclidean eps-ball: eps * (sec(gamma/2) - 1) with gamma
    the largest angular gap between consecutive facet normals."""
    if norm.kind != "l2approx":
        return 0.0
    dirs = _l2approx_directions(norm.facets)
    angles = sorted(math.atan2(float(u[1]), float(u[0])) for u in dirs)
    gaps = [b - a for a, b in zip(angles, angles[1:])]
    gaps.append(2 * math.pi - (angles[-1] - angles[0]))
    gamma = max(gaps)
    return float(eps) * (1.0 / math.cos(gamma / 2.0) - 1.0)


def gap(a: Polyhedron, b: Polyhedron, norm: NormSpec = L1) -> Fraction | float:
    """inf { ||x - y|| : x in a, y in b }; +inf when either set is empty.

    Exact LP for l1/linf.  For l2approx the value is an upper bound on the
    Euclidean gap (the approximating norm dominates the Euclidean one).
    """
    dim = _same_dim(a, b)
    if a.is_empty or b.is_empty:
        return math.inf
    from .simplex import OPTIMAL, solve_lp

    ball = norm_unit_ball(norm, dim)
    nvars = 2 * dim + 1
    a_ub: list[list[Fraction]] = []
    b_ub: list[Fraction] = []
    for h in a.hrep:
        a_ub.append(list(h.normal) + [ZERO] * dim + [ZERO])
        b_ub.append(h.offset)
    for h in b.hrep:
        a_ub.append([ZERO] * dim + list(h.normal) + [ZERO])
        b_ub.append(h.offset)
    for h in ball.hrep:
        row = list(h.normal) + [-x for x in h.normal] + [-h.offset]
        a_ub.append(row)
        b_ub.append(ZERO)
    objective = [ZERO] * (2 * dim) + [ONE]
    nonneg = [False] * (2 * dim) + [True]
    res = solve_lp(objective, a_ub, b_ub, nonneg=nonneg)
    if res.status != OPTIMAL:
        raise AssertionError(f"gap LP should be solvable, got {res.status}")
    return res.value
