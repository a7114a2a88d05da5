"""Piecewise-affine convex functions, DC pairs, and black-box test functions.

Exact calculus lives here: subdifferentials of max-affine functions with
polyhedral domains, epsilon-enlargements, and two independent constructions
of the Dini-Hadamard epsilon-subdifferential of a difference g - h.

Derivation used by the definitional route
-----------------------------------------
For piecewise-affine convex g, h with polyhedral domains and a point xb in
dom g (dom g contained in dom h), the lower Dini-Hadamard derivative of
f = g - h is d-f(xb; d) = g'(xb; d) - h'(xb; d) on the tangent cone of dom g
and +inf off it.  Since g'(xb; .) is the support function of the subgradient
set of g at xb (and likewise for h), a functional u satisfies

    <u, d> <= d-f(xb; d) + eps * ||d||    for every direction d

if and only if  u + subdiff(h, xb)  is contained in  subdiff(g, xb) + eps*D,
with D the dual-norm unit ball.  That containment is what
``dc_dini_subdifferential_definitional`` computes, by intersecting translates
over the vertices of subdiff(h, xb) and guarding recession rays.  The erosion
route in ``dc_dini_subdifferential`` never shares code with it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    EmptyDomain,
    EvaluationFailure,
    NegativeEps,
    ParseError,
    PointOutsideDomain,
    PointOutsideDomainInterior,
    UnsupportedNorm,
)
from .polykernel import (
    L1,
    NormSpec,
    Polyhedron,
    contains_point,
    contains_polyhedron,
    dual_norm_ball,
    intersect,
    intersect_many,
    minkowski_sum,
    normal_cone_at,
    star_difference,
    strictly_contains_point,
    tangent_cone_at,
    translate,
)
from .rationals import (
    Vector,
    format_rational,
    format_vector,
    parse_rational,
    parse_vector,
    vadd,
    vdot,
    vneg,
)


@dataclass(frozen=True)
class AffinePiece:
    """One affine minorant x -> <slope, x> + intercept."""

    slope: Vector
    intercept: Fraction

    @staticmethod
    def make(slope: Sequence, intercept) -> "AffinePiece":
        return AffinePiece(parse_vector(slope), parse_rational(intercept))

    def value_at(self, x: Vector) -> Fraction:
        return vdot(self.slope, x) + self.intercept


class PAConvexFunction:
    """Finite max of affine pieces on a polyhedral domain (+inf outside).

    A proper domain encodes f plus the indicator of the domain; the default
    domain is the whole space.
    """

    __slots__ = ("pieces", "domain", "name", "_float_cache")

    def __init__(self, pieces: Iterable, domain: Polyhedron | None = None, name: str = ""):
        parsed = []
        for p in pieces:
            if not isinstance(p, AffinePiece):
                p = AffinePiece.make(p[0], p[1])
            parsed.append(p)
        if not parsed:
            raise ParseError("a piecewise-affine function needs at least one piece")
        dims = {len(p.slope) for p in parsed}
        if len(dims) != 1:
            raise DimensionMismatch("pieces have mixed dimensions")
        dim = dims.pop()
        if domain is None:
            domain = Polyhedron.whole_space(dim)
        if domain.dim != dim:
            raise DimensionMismatch("domain dimension does not match pieces")
        seen = set()
        unique = []
        for p in parsed:
            key = (p.slope, p.intercept)
            if key not in seen:
                seen.add(key)
                unique.append(p)
        self.pieces = tuple(unique)
        self.domain = domain
        self.name = name
        self._float_cache = None

    @property
    def dim(self) -> int:
        return len(self.pieces[0].slope)

    # -- evaluation -------------------------------------------------------

    def evaluate(self, x: Sequence) -> Fraction | float:
        """Exact value; +inf outside the domain."""
        p = parse_vector(x, self.dim)
        if not contains_point(self.domain, p):
            return math.inf
        return max(piece.value_at(p) for piece in self.pieces)

    def _float_data(self):
        if self._float_cache is None:
            slopes = np.array(
                [[float(a) for a in p.slope] for p in self.pieces], dtype=float
            )
            intercepts = np.array([float(p.intercept) for p in self.pieces], dtype=float)
            dom = self.domain
            if dom._raw_hrep is not None or dom._hrep is not None:
                hrep = dom._raw_hrep if dom._raw_hrep is not None else dom.hrep
            else:
                hrep = dom.hrep
            normals = np.array(
                [[float(a) for a in h.normal] for h in hrep], dtype=float
            ).reshape(len(hrep), self.dim)
            offsets = np.array([float(h.offset) for h in hrep], dtype=float)
            self._float_cache = (slopes, intercepts, normals, offsets)
        return self._float_cache

    def evaluate_batch(self, xs: np.ndarray) -> np.ndarray:
        """Float values for an (N, dim) array; +inf outside the domain."""
        xs = np.asarray(xs, dtype=float).reshape(-1, self.dim)
        slopes, intercepts, normals, offsets = self._float_data()
        vals = (xs @ slopes.T + intercepts).max(axis=1)
        if len(normals):
            outside = (xs @ normals.T > offsets).any(axis=1)
            vals = np.where(outside, np.inf, vals)
        return vals

    def eval_float(self, x: Sequence) -> float:
        return float(self.evaluate_batch(np.atleast_2d(np.asarray(x, dtype=float)))[0])

    # -- exact calculus ----------------------------------------------------

    def _require_in_domain(self, x: Sequence) -> Vector:
        p = parse_vector(x, self.dim)
        if not contains_point(self.domain, p):
            raise PointOutsideDomain(f"{p} is outside the effective domain")
        return p

    def active_pieces(self, x: Sequence) -> tuple[AffinePiece, ...]:
        """Pieces attaining the max at x (exact ties)."""
        p = self._require_in_domain(x)
        values = [piece.value_at(p) for piece in self.pieces]
        top = max(values)
        return tuple(pc for pc, v in zip(self.pieces, values) if v == top)

    def subdifferential_at(self, x: Sequence) -> Polyhedron:
        """conv{active slopes} + normal cone of the domain at x."""
        p = self._require_in_domain(x)
        slopes = [pc.slope for pc in self.active_pieces(p)]
        hull = Polyhedron.from_vrep(slopes, dim=self.dim)
        ncone = normal_cone_at(self.domain, p)
        return minkowski_sum(hull, ncone)

    def eps_subdifferential_at(self, x: Sequence, eps, norm: NormSpec = L1) -> Polyhedron:
        """Dini-Hadamard eps-subdifferential: for a convex function this is
        the subdifferential fattened by the dual-norm ball of radius eps."""
        e = parse_rational(eps)
        if e < 0:
            raise NegativeEps(f"eps must be nonnegative, got {e}")
        sub = self.subdifferential_at(x)
        if e == 0:
            return sub
        return minkowski_sum(sub, dual_norm_ball(norm, e, self.dim))

    def directional_derivative(self, x: Sequence, h: Sequence) -> Fraction:
        """One-sided derivative at an interior point: max over active slopes."""
        p = parse_vector(x, self.dim)
        if not strictly_contains_point(self.domain, p):
            raise PointOutsideDomainInterior(
                f"{p} is not interior to the effective domain"
            )
        d = parse_vector(h, self.dim)
        return max(vdot(pc.slope, d) for pc in self.active_pieces(p))

    def one_sided_derivative(self, x: Sequence, h: Sequence) -> Fraction | float:
        """Directional derivative valid on the whole domain: +inf when the
        direction leaves the domain's tangent cone."""
        p = self._require_in_domain(x)
        d = parse_vector(h, self.dim)
        if not contains_point(tangent_cone_at(self.domain, p), d):
            return math.inf
        return max(vdot(pc.slope, d) for pc in self.active_pieces(p))

    def restrict(self, a: Polyhedron) -> "PAConvexFunction":
        """Same pieces on the intersected domain (f plus an indicator)."""
        dom = intersect(self.domain, a)
        if dom.is_empty:
            raise EmptyDomain("restriction has an empty effective domain")
        return PAConvexFunction(self.pieces, dom, name=self.name)

    # -- serialization ------------------------------------------------------

    def to_json(self) -> dict:
        dom = self.domain
        is_whole = dom == Polyhedron.whole_space(self.dim)
        return {
            "type": "pa_convex",
            "pieces": [
                {"slope": format_vector(p.slope), "intercept": format_rational(p.intercept)}
                for p in self.pieces
            ],
            "domain": None if is_whole else dom.to_json(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "PAConvexFunction":
        if obj.get("type") != "pa_convex":
            raise ParseError("expected a pa_convex function object")
        pieces = [AffinePiece.make(p["slope"], p["intercept"]) for p in obj["pieces"]]
        dom = obj.get("domain")
        domain = Polyhedron.from_json(dom) if dom is not None else None
        return cls(pieces, domain)

    def __repr__(self) -> str:
        return f"PAConvexFunction(dim={self.dim}, pieces={len(self.pieces)})"


def pa_sum(f: PAConvexFunction, g: PAConvexFunction) -> PAConvexFunction:
    """Pointwise sum via pairwise piece sums; domains intersect."""
    if f.dim != g.dim:
        raise DimensionMismatch("summands have different dimensions")
    pieces = [
        AffinePiece(vadd(p.slope, q.slope), p.intercept + q.intercept)
        for p in f.pieces
        for q in g.pieces
    ]
    dom = intersect(f.domain, g.domain)
    if dom.is_empty:
        raise EmptyDomain("sum has an empty effective domain")
    return PAConvexFunction(pieces, dom)


def f_eps_expand(f: PAConvexFunction, x: Sequence, eps, norm: NormSpec = L1) -> PAConvexFunction:
    """Exact PA form of f + eps * ||. - x||_1.

    The l1 term is the max over sign vectors sigma of <sigma, . - x>, so each
    piece splits into 2^dim shifted pieces.  Only the l1 norm keeps the
    result piecewise-affine.
    """
    if norm.kind != "l1":
        raise UnsupportedNorm("f_eps_expand supports the l1 norm only")
    e = parse_rational(eps)
    if e < 0:
        raise NegativeEps(f"eps must be nonnegative, got {e}")
    xb = parse_vector(x, f.dim)
    if e == 0:
        return f
    sign_patterns = []
    for bits in range(2 ** f.dim):
        sigma = tuple(
            Fraction(1) if (bits >> i) & 1 else Fraction(-1) for i in range(f.dim)
        )
        sign_patterns.append(sigma)
    pieces = []
    for p in f.pieces:
        for sigma in sign_patterns:
            slope = vadd(p.slope, tuple(e * s for s in sigma))
            intercept = p.intercept - e * vdot(sigma, xb)
            pieces.append(AffinePiece(slope, intercept))
    return PAConvexFunction(pieces, f.domain)


# ---------------------------------------------------------------------------
# DC pairs
# ---------------------------------------------------------------------------


class DCFunction:
    """Ordered pair (g, h) of PA convex functions; f = g - h.

    Requires dom g contained in dom h, so f is well defined with the
    convention (+inf) - (+inf) = +inf.
    """

    __slots__ = ("g", "h", "name")

    def __init__(self, g: PAConvexFunction, h: PAConvexFunction, name: str = ""):
        if g.dim != h.dim:
            raise DimensionMismatch("g and h have different dimensions")
        ok, witness = contains_polyhedron(h.domain, g.domain)
        if not ok:
            raise ParseError(f"dom g must be contained in dom h; {witness} escapes")
        self.g = g
        self.h = h
        self.name = name

    @property
    def dim(self) -> int:
        return self.g.dim

    def evaluate(self, x: Sequence) -> Fraction | float:
        gv = self.g.evaluate(x)
        if gv == math.inf:
            return math.inf
        return gv - self.h.evaluate(x)

    def evaluate_batch(self, xs: np.ndarray) -> np.ndarray:
        gv = self.g.evaluate_batch(xs)
        hv = self.h.evaluate_batch(xs)
        out = gv - hv
        return np.where(np.isinf(gv), np.inf, out)

    def eval_float(self, x: Sequence) -> float:
        return float(self.evaluate_batch(np.atleast_2d(np.asarray(x, dtype=float)))[0])

    def to_json(self) -> dict:
        return {"type": "dc", "g": self.g.to_json(), "h": self.h.to_json()}

    @classmethod
    def from_json(cls, obj: dict) -> "DCFunction":
        if obj.get("type") != "dc":
            raise ParseError("expected a dc function object")
        return cls(
            PAConvexFunction.from_json(obj["g"]), PAConvexFunction.from_json(obj["h"])
        )

    def __repr__(self) -> str:
        return f"DCFunction(dim={self.dim})"


def dc_dini_subdifferential(
    dc: DCFunction, x: Sequence, eps=0, eta=0, norm: NormSpec = L1
) -> Polyhedron:
    """Erosion route: (eps+eta)-subdifferential of g eroded by the
    eta-subdifferential of h."""
    e = parse_rational(eps)
    n = parse_rational(eta)
    if e < 0 or n < 0:
        raise NegativeEps("eps and eta must be nonnegative")
    a = dc.g.eps_subdifferential_at(x, e + n, norm)
    b = dc.h.eps_subdifferential_at(x, n, norm)
    return star_difference(a, b)


def dc_dini_subdifferential_definitional(
    dc: DCFunction, x: Sequence, eps=0, norm: NormSpec = L1
) -> Polyhedron:
    """Independent route from the derivative definition.

    Membership of u reduces to u + subdiff(h) inside subdiff(g) + eps*D (see
    the module docstring), evaluated here by translate-and-intersect: every
    recession ray of subdiff(h) must recede in the target, and then the set
    is the intersection of target translates over the vertices of subdiff(h).
    """
    e = parse_rational(eps)
    if e < 0:
        raise NegativeEps(f"eps must be nonnegative, got {e}")
    dim = dc.dim
    target = dc.g.subdifferential_at(x)
    if e != 0:
        target = minkowski_sum(target, dual_norm_ball(norm, e, dim))
    b = dc.h.subdifferential_at(x)
    target = target.canonical()
    for ray in b.rays:
        if any(vdot(h.normal, ray) > 0 for h in target.hrep):
            return Polyhedron.empty(dim)
    translates = [translate(target, vneg(v)) for v in b.vertices]
    return intersect_many(translates)


def dc_hypothesis_report(dc: DCFunction, x: Sequence) -> list[dict]:
    """Why the difference-formula equalities apply to this instance."""
    p = parse_vector(x, dc.dim)
    interior = strictly_contains_point(dc.g.domain, p)
    report = [
        {
            "hypothesis": "g piecewise-affine convex",
            "status": "holds",
            "provenance": "exact-by-construction",
        },
        {
            "hypothesis": "h piecewise-affine convex",
            "status": "holds",
            "provenance": "exact-by-construction",
        },
        {
            "hypothesis": "f = g - h calm at the point",
            "status": "holds",
            "provenance": "exact-by-convexity",
        },
        {
            "hypothesis": "g and h directionally approximately starshaped at the point",
            "status": "holds",
            "provenance": "exact-by-convexity",
        },
        {
            "hypothesis": "eps-subdifferential map of h spongiously gap-continuous",
            "status": "holds",
            "provenance": "exact-by-convexity",
        },
        {
            "hypothesis": "point interior to dom g",
            "status": "holds" if interior else "fails",
            "provenance": "exact",
        },
    ]
    return report


# ---------------------------------------------------------------------------
# Black-box expression functions for the sampling oracles
# ---------------------------------------------------------------------------

_LEAF_OPS = ("const", "coord")
_UNARY_OPS = ("neg", "abs", "sqrtabs", "staircase")
_BINARY_OPS = ("add", "sub", "mul")
_NARY_OPS = ("max", "min")


def _staircase_scalar(v: np.ndarray) -> np.ndarray:
    """Even 1-d test function: 0 at 0, +inf for |v| >= 1, and on (0, 1) a
    two-regime pattern indexed by m = ceil(1/v): slope 1/m segments through
    rational breakpoints for even m, and for odd m = 2n+1 the affine bridge
    (v - 1/(2n))/(2n+1) + 1/(2n)^2 with an upward jump at its left end."""
    av = np.abs(np.asarray(v, dtype=float))
    out = np.full(av.shape, np.inf)
    zero = av == 0.0
    out[zero] = 0.0
    inside = (av > 0.0) & (av < 1.0)
    a = av[inside]
    with np.errstate(divide="ignore"):
        m = np.ceil(1.0 / a)
    even = (m % 2.0) == 0.0
    vals = np.empty_like(a)
    vals[even] = a[even] / m[even]
    mo = m[~even]
    ao = a[~even]
    two_n = mo - 1.0
    vals[~even] = (ao - 1.0 / two_n) / mo + 1.0 / (two_n * two_n)
    out[inside] = vals
    return out


class BlackBoxFunction:
    """Expression tree evaluated in floating point, for the sampling probes.

    Grammar (prefix lists): ["const", c], ["coord", i], ["neg", e],
    ["abs", e], ["sqrtabs", e], ["staircase", e], ["add", a, b],
    ["sub", a, b], ["mul", a, b], ["max", e...], ["min", e...].
    The optional box domain sends points outside it to +inf.
    """

    __slots__ = ("expr", "dim", "box", "name")

    def __init__(self, expr, dim: int, box: Sequence | None = None, name: str = ""):
        if dim < 1:
            raise DimensionMismatch("dimension must be >= 1")
        self.expr = expr
        self.dim = dim
        if box is not None:
            box = [(float(lo), float(hi)) for lo, hi in box]
            if len(box) != dim:
                raise DimensionMismatch("box must have one (lo, hi) pair per coordinate")
        self.box = box
        self.name = name
        self._validate(expr)

    def _validate(self, node) -> None:
        if not isinstance(node, (list, tuple)) or not node:
            raise ParseError(f"bad expression node {node!r}")
        op = node[0]
        if op == "const":
            if len(node) != 2:
                raise ParseError("const takes one value")
            float(parse_rational(node[1]) if isinstance(node[1], str) else node[1])
        elif op == "coord":
            if len(node) != 2 or not isinstance(node[1], int):
                raise ParseError("coord takes one integer index")
            if not 0 <= node[1] < self.dim:
                raise ParseError(f"coordinate index {node[1]} out of range")
        elif op in _UNARY_OPS:
            if len(node) != 2:
                raise ParseError(f"{op} takes one argument")
            self._validate(node[1])
        elif op in _BINARY_OPS:
            if len(node) != 3:
                raise ParseError(f"{op} takes two arguments")
            self._validate(node[1])
            self._validate(node[2])
        elif op in _NARY_OPS:
            if len(node) < 2:
                raise ParseError(f"{op} takes at least one argument")
            for child in node[1:]:
                self._validate(child)
        else:
            raise ParseError(f"unknown expression operator {op!r}")

    def _eval(self, node, xs: np.ndarray) -> np.ndarray:
        op = node[0]
        if op == "const":
            c = node[1]
            val = float(parse_rational(c)) if isinstance(c, str) else float(c)
            return np.full(xs.shape[0], val)
        if op == "coord":
            return xs[:, node[1]]
        if op == "neg":
            return -self._eval(node[1], xs)
        if op == "abs":
            return np.abs(self._eval(node[1], xs))
        if op == "sqrtabs":
            return np.sqrt(np.abs(self._eval(node[1], xs)))
        if op == "staircase":
            return _staircase_scalar(self._eval(node[1], xs))
        if op == "add":
            return self._eval(node[1], xs) + self._eval(node[2], xs)
        if op == "sub":
            return self._eval(node[1], xs) - self._eval(node[2], xs)
        if op == "mul":
            return self._eval(node[1], xs) * self._eval(node[2], xs)
        if op == "max":
            return np.maximum.reduce([self._eval(c, xs) for c in node[1:]])
        if op == "min":
            return np.minimum.reduce([self._eval(c, xs) for c in node[1:]])
        raise EvaluationFailure(f"unknown operator {op!r}")

    def evaluate_batch(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=float).reshape(-1, self.dim)
        with np.errstate(invalid="raise", over="ignore"):
            try:
                vals = self._eval(self.expr, xs)
            except FloatingPointError as exc:
                raise EvaluationFailure(str(exc)) from exc
        if self.box is not None:
            lo = np.array([b[0] for b in self.box])
            hi = np.array([b[1] for b in self.box])
            outside = ((xs < lo) | (xs > hi)).any(axis=1)
            vals = np.where(outside, np.inf, vals)
        return vals

    def eval_float(self, x: Sequence) -> float:
        return float(self.evaluate_batch(np.atleast_2d(np.asarray(x, dtype=float)))[0])

    def to_json(self) -> dict:
        out = {"type": "blackbox", "expr": self.expr, "dim": self.dim}
        if self.box is not None:
            out["box"] = [[lo, hi] for lo, hi in self.box]
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "BlackBoxFunction":
        if obj.get("type") != "blackbox":
            raise ParseError("expected a blackbox function object")
        return cls(obj["expr"], obj["dim"], obj.get("box"))

    def __repr__(self) -> str:
        return f"BlackBoxFunction(dim={self.dim}, name={self.name!r})"


def function_from_json(obj: dict):
    """Dispatch a function file object to its concrete type."""
    kind = obj.get("type")
    if kind == "pa_convex":
        return PAConvexFunction.from_json(obj)
    if kind == "dc":
        return DCFunction.from_json(obj)
    if kind == "blackbox":
        return BlackBoxFunction.from_json(obj)
    raise ParseError(f"unknown function type {kind!r}")


# ---------------------------------------------------------------------------
# Convenience constructors used by scenarios and tests
# ---------------------------------------------------------------------------


def abs_function() -> PAConvexFunction:
    """|x| on the line."""
    return PAConvexFunction([((1,), 0), ((-1,), 0)], name="abs")


def linear_function(slope: Sequence, intercept=0) -> PAConvexFunction:
    return PAConvexFunction([(slope, intercept)], name="linear")


def l1_norm_function(dim: int) -> PAConvexFunction:
    """||x||_1 as a max over all sign patterns."""
    pieces = []
    for bits in range(2 ** dim):
        sigma = tuple(1 if (bits >> i) & 1 else -1 for i in range(dim))
        pieces.append((sigma, 0))
    return PAConvexFunction(pieces, name="l1")


def linf_norm_function(dim: int) -> PAConvexFunction:
    """||x||_inf as a max over signed coordinates."""
    pieces = []
    for i in range(dim):
        for s in (1, -1):
            slope = tuple(s if j == i else 0 for j in range(dim))
            pieces.append((slope, 0))
    return PAConvexFunction(pieces, name="linf")
