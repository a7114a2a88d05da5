"""Cone-constrained DC optimality certificates.

Feasible sets are pullbacks of polyhedral cones under affine maps, normal
cones come from two unrelated routes (active facets of the assembled
feasible set versus Lagrange generators from the dual cone), and blunt
minimality is decided by an exact vertex-inclusion test with a separating
descent direction extracted when it fails.  Every negative verdict ships a
witness that replays by plain evaluation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .dinioracle import DEFAULT_PLAN, ProbeVerdict, SamplingPlan, _l1_ball_points
from .errors import (
    DimensionMismatch,
    InfeasiblePoint,
    InternalCheckError,
    NegativeEps,
    NotACone,
    ParseError,
    PointNotInteriorDomG,
    UnboundedC,
)
from .funcmodel import DCFunction
from .polykernel import (
    Polyhedron,
    affine_image,
    cone_is_linear_subspace,
    conic_hull,
    contains_point,
    contains_polyhedron,
    minkowski_sum,
    normal_cone_at,
    strictly_contains_point,
)
from .rationals import (
    Vector,
    format_rational,
    format_vector,
    is_zero_vector,
    parse_rational,
    parse_vector,
    vadd,
    vdot,
    vneg,
    vscale,
    vzero,
)
from .simplex import OPTIMAL, solve_lp

_TAG_BLUNT = 5


def _parse_matrix(rows: Sequence[Sequence], width: int | None = None) -> tuple[Vector, ...]:
    out = tuple(parse_vector(r) for r in rows)
    if not out:
        raise ParseError("matrix needs at least one row")
    w = len(out[0]) if width is None else width
    if any(len(r) != w for r in out):
        raise DimensionMismatch("matrix rows have mixed widths")
    return out


def _matvec(m: tuple[Vector, ...], x: Vector) -> Vector:
    return tuple(vdot(row, x) for row in m)


def _mat_t_vec(m: tuple[Vector, ...], z: Vector) -> Vector:
    out = vzero(len(m[0]))
    for zi, row in zip(z, m):
        if zi != 0:
            out = vadd(out, vscale(zi, row))
    return out


def nonneg_orthant(dim: int) -> Polyhedron:
    rows = []
    for i in range(dim):
        normal = tuple(Fraction(-1) if j == i else Fraction(0) for j in range(dim))
        rows.append((normal, Fraction(0)))
    return Polyhedron.from_hrep(rows, dim)


def zero_cone(dim: int) -> Polyhedron:
    return Polyhedron.singleton(vzero(dim))


class ConstraintSystem:
    """Feasibility data: x in C and Mx + c in -K, with K a polyhedral cone."""

    __slots__ = ("C", "M", "c", "K")

    def __init__(
        self,
        c_set: Polyhedron,
        k_matrix: Sequence[Sequence],
        k_offset: Sequence,
        cone: Polyhedron | None = None,
    ):
        self.C = c_set
        self.M = _parse_matrix(k_matrix, c_set.dim)
        self.c = parse_vector(k_offset, len(self.M))
        self.K = cone if cone is not None else nonneg_orthant(len(self.M))
        if self.K.dim != len(self.M):
            raise DimensionMismatch("K lives in the wrong dimension")
        kc = self.K.canonical()
        if kc.vertices != (vzero(kc.dim),):
            raise NotACone("K must be a polyhedral cone with vertex at the origin")

    @property
    def dim(self) -> int:
        return self.C.dim

    def k_value(self, x: Vector) -> Vector:
        return vadd(_matvec(self.M, x), self.c)

    def to_json(self) -> dict:
        return {
            "C": self.C.to_json(),
            "k": {
                "M": [format_vector(row) for row in self.M],
                "c": format_vector(self.c),
            },
            "K": self.K.to_json(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ConstraintSystem":
        c_set = Polyhedron.from_json(obj["C"])
        k = obj["k"]
        cone = Polyhedron.from_json(obj["K"]) if "K" in obj and obj["K"] is not None else None
        return cls(c_set, k["M"], k["c"], cone)


class ProblemInstance:
    """A DC objective over a cone-constrained feasible set."""

    __slots__ = ("objective", "constraints")

    def __init__(self, objective: DCFunction, constraints: ConstraintSystem):
        if objective.dim != constraints.dim:
            raise DimensionMismatch("objective and constraints disagree on dimension")
        self.objective = objective
        self.constraints = constraints

    def to_json(self) -> dict:
        out = {"objective": self.objective.to_json()}
        out.update(self.constraints.to_json())
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "ProblemInstance":
        return cls(DCFunction.from_json(obj["objective"]), ConstraintSystem.from_json(obj))


def feasible_set(cs: ConstraintSystem) -> Polyhedron:
    """C intersected with the pullback of -K through x -> Mx + c."""
    rows = [(h.normal, h.offset) for h in cs.C.hrep]
    for h in cs.K.hrep:
        g = h.normal
        rows.append((vneg(_mat_t_vec(cs.M, g)), vdot(g, cs.c)))
    return Polyhedron.from_hrep(rows, cs.dim)


def qualification_check(cs: ConstraintSystem) -> tuple[str, Polyhedron]:
    """Tests whether the cone spanned by k(C) + K is a linear subspace.

    Needs C bounded so the affine image is a polytope; unbounded C is
    reported, never approximated.
    """
    if not cs.C.is_bounded():
        raise UnboundedC("qualification check needs a bounded C")
    image = affine_image(cs.C, cs.M, cs.c)
    span = minkowski_sum(image, cs.K)
    cone = conic_hull(span)
    status = "Holds" if cone_is_linear_subspace(cone) else "Fails"
    return status, cone


def dual_cone_generators(k_cone: Polyhedron) -> list[Vector]:
    """Generators of the positive dual cone, read off the facet normals."""
    return [vneg(h.normal) for h in k_cone.canonical().hrep]


def normal_cone_feasible(
    cs: ConstraintSystem, x: Sequence
) -> tuple[Polyhedron, Polyhedron, bool]:
    """Normal cone of the feasible set by two routes.

    direct: active facets of the assembled feasible set.  lagrange: the cone
    of M^T z* over dual-cone generators z* annihilating k(x), plus the
    normal cone of C; exactness of the second route rests on k being affine.
    """
    a_set = feasible_set(cs)
    xv = parse_vector(x, cs.dim)
    if not contains_point(a_set, xv):
        raise InfeasiblePoint(f"{xv} is not feasible")
    direct = normal_cone_at(a_set, xv)
    kx = cs.k_value(xv)
    rays = []
    for z in dual_cone_generators(cs.K):
        if vdot(z, kx) == 0:
            img = _mat_t_vec(cs.M, z)
            if not is_zero_vector(img):
                rays.append(img)
    base = Polyhedron.from_vrep([vzero(cs.dim)], rays=rays, dim=cs.dim)
    lagrange = minkowski_sum(base, normal_cone_at(cs.C, xv))
    agree = direct == lagrange
    return direct, lagrange, agree


def _member_of_generated_set(
    vertices: Sequence[Vector], rays: Sequence[Vector], point: Vector
) -> bool:
    """Exact LP feasibility of point in conv(vertices) + cone(rays)."""
    nv, nr = len(vertices), len(rays)
    dim = len(point)
    a_eq = []
    b_eq = []
    for j in range(dim):
        a_eq.append([v[j] for v in vertices] + [r[j] for r in rays])
        b_eq.append(point[j])
    a_eq.append([Fraction(1)] * nv + [Fraction(0)] * nr)
    b_eq.append(Fraction(1))
    res = solve_lp(
        [Fraction(0)] * (nv + nr),
        a_eq=a_eq,
        b_eq=b_eq,
        nonneg=[True] * (nv + nr),
    )
    return res.status == OPTIMAL


def _ray_in_cone(rays: Sequence[Vector], direction: Vector) -> bool:
    if not rays:
        return is_zero_vector(direction)
    dim = len(direction)
    a_eq = [[r[j] for r in rays] for j in range(dim)]
    b_eq = list(direction)
    res = solve_lp(
        [Fraction(0)] * len(rays),
        a_eq=a_eq,
        b_eq=b_eq,
        nonneg=[True] * len(rays),
    )
    return res.status == OPTIMAL


def _require_certifiable(p: ProblemInstance, x: Sequence) -> tuple[Polyhedron, Vector]:
    a_set = feasible_set(p.constraints)
    xv = parse_vector(x, p.constraints.dim)
    if not contains_point(a_set, xv):
        raise InfeasiblePoint(f"{xv} is not feasible")
    if not strictly_contains_point(p.objective.g.domain, xv):
        raise PointNotInteriorDomG(f"{xv} is not interior to dom g")
    return a_set, xv


def check_inclusion_28(p: ProblemInstance, x: Sequence) -> tuple[str, Vector | None]:
    """Vertex-by-vertex exact test of subdiff(h) inside subdiff(g) + N(A, x).

    Convexity of the right side makes vertex (plus recession ray)
    membership sufficient.  Returns the first failing vertex as witness.
    """
    a_set, xv = _require_certifiable(p, x)
    dg = p.objective.g.subdifferential_at(xv)
    na = normal_cone_at(a_set, xv)
    verts = dg.vertices
    rays = list(dg.rays) + list(na.rays)
    dh = p.objective.h.subdifferential_at(xv)
    for ray in dh.rays:
        if not _ray_in_cone(rays, ray):
            return "Fails", ray
    for v in dh.vertices:
        if not _member_of_generated_set(verts, rays, v):
            return "Fails", v
    return "Holds", None


def _descent_direction(
    target: Polyhedron, vertex: Vector, dim: int
) -> tuple[Vector, Fraction]:
    """Max-margin separator of a point from a polyhedron, inf-norm box 1.

    Maximizes t subject to <d, vertex - w> >= t for every vertex w of the
    target and <d, r> <= 0 for its rays; the ray constraints keep the
    support of the target finite along d, which is exactly membership of d
    in the tangent cone the descent argument needs.
    """
    tc = target.canonical()
    a_ub = []
    b_ub = []
    for w in tc.vertices:
        a_ub.append(list(vadd(w, vneg(vertex))) + [Fraction(1)])
        b_ub.append(Fraction(0))
    for r in tc.rays:
        a_ub.append(list(r) + [Fraction(0)])
        b_ub.append(Fraction(0))
    for i in range(dim):
        e = [Fraction(0)] * dim
        e[i] = Fraction(1)
        a_ub.append(e + [Fraction(0)])
        b_ub.append(Fraction(1))
        e2 = [Fraction(0)] * dim
        e2[i] = Fraction(-1)
        a_ub.append(e2 + [Fraction(0)])
        b_ub.append(Fraction(1))
    objective = [Fraction(0)] * dim + [Fraction(-1)]
    res = solve_lp(objective, a_ub=a_ub, b_ub=b_ub)
    if res.status != OPTIMAL:
        raise InternalCheckError(f"separator LP ended {res.status}")
    margin = -res.value
    if margin <= 0:
        raise InternalCheckError("separator margin is not positive")
    return tuple(res.x[:dim]), margin


@dataclass
class OptimalityCertificate:
    """Full record of a blunt-minimality certification."""

    feasible_at: bool
    qualification: str
    qualification_cone: Polyhedron | None
    normal_cone_direct: Polyhedron
    normal_cone_lagrange: Polyhedron
    routes_agree: bool
    inclusion28: str
    inclusion_witness: Vector | None
    verdict: str
    descent: dict | None
    lagrange_validated: bool
    hypothesis_report: list[dict]
    notes: tuple[str, ...] = ()

    @property
    def theorem_certified(self) -> bool:
        return all(e["status"] == "holds" for e in self.hypothesis_report)

    def to_json(self) -> dict:
        descent = None
        if self.descent is not None:
            descent = {
                "direction": format_vector(self.descent["direction"]),
                "rate": format_rational(self.descent["rate"]),
                "step": format_rational(self.descent["step"]),
                "violation_margin": format_rational(self.descent["violation_margin"]),
                "f_base": format_rational(self.descent["f_base"]),
                "f_step": format_rational(self.descent["f_step"]),
            }
        return {
            "feasible_at": self.feasible_at,
            "qualification": self.qualification,
            "qualification_cone": None
            if self.qualification_cone is None
            else self.qualification_cone.to_json(),
            "normal_cone_direct": self.normal_cone_direct.to_json(),
            "normal_cone_lagrange": self.normal_cone_lagrange.to_json(),
            "routes_agree": self.routes_agree,
            "inclusion28": self.inclusion28,
            "inclusion_witness": None
            if self.inclusion_witness is None
            else format_vector(self.inclusion_witness),
            "verdict": self.verdict,
            "descent": descent,
            "lagrange_validated": self.lagrange_validated,
            "hypothesis_report": self.hypothesis_report,
            "theorem_certified": self.theorem_certified,
            "notes": list(self.notes),
        }


def certify_blunt_minimizer(p: ProblemInstance, x: Sequence) -> OptimalityCertificate:
    """Decides spongiously local eps-blunt minimality for every eps > 0.

    The decision is the exact inclusion of subdiff(h) in subdiff(g) plus the
    feasible normal cone, cross-checked against the subdifferential of g
    restricted to the feasible set; the two must agree identically.  When
    the inclusion fails, a separating direction becomes a feasible descent
    witness with an exact negative rate and a replayable rational step.
    When the qualification fails (or C is unbounded), the verdict comes from
    the restricted-function route and the Lagrange form is left unvalidated.
    """
    a_set, xv = _require_certifiable(p, x)
    dc = p.objective
    cs = p.constraints
    notes: list[str] = []
    try:
        qualification, qcone = qualification_check(cs)
    except UnboundedC:
        qualification, qcone = "Fails", None
        notes.append("C unbounded: qualification not evaluated")
    direct, lagrange, agree = normal_cone_feasible(cs, xv)
    inclusion28, witness28 = check_inclusion_28(p, xv)
    g_restricted = dc.g.restrict(a_set)
    s30 = g_restricted.subdifferential_at(xv)
    s29 = minkowski_sum(dc.g.subdifferential_at(xv), direct)
    if s29 != s30:
        raise InternalCheckError(
            "restricted subdifferential disagrees with the sum of "
            "subdiff(g) and the feasible normal cone"
        )
    dh = dc.h.subdifferential_at(xv)
    inc30, _ = contains_polyhedron(s30, dh)
    if inc30 != (inclusion28 == "Holds"):
        raise InternalCheckError("vertex LP route and containment route disagree")
    lagrange_validated = qualification == "Holds" and agree
    if qualification != "Holds":
        notes.append(
            "qualification fails: decided via the restricted-function route; "
            "Lagrange representation not validated"
        )
    descent = None
    if inclusion28 == "Holds":
        verdict = "BluntMinimizerAllEps"
    else:
        verdict = "NotBluntMinimizer"
        d, _margin = _descent_direction(s30, witness28, cs.dim)
        rate = dc.g.directional_derivative(xv, d) - dc.h.directional_derivative(xv, d)
        if rate >= 0:
            raise InternalCheckError("descent direction has nonnegative rate")
        f_base = dc.evaluate(xv)
        step = Fraction(1)
        for _ in range(200):
            y = vadd(xv, vscale(step, d))
            if contains_point(a_set, y):
                f_step = dc.evaluate(y)
                if f_step - f_base == step * rate:
                    break
            step /= 2
        else:
            raise InternalCheckError("descent step did not stabilize")
        d_norm1 = sum(abs(z) for z in d)
        descent = {
            "direction": d,
            "rate": rate,
            "step": step,
            "violation_margin": -rate / d_norm1,
            "f_base": f_base,
            "f_step": f_step,
        }
    report = [
        {
            "hypothesis": "g piecewise-affine convex (lsc, approximately convex)",
            "status": "holds",
            "provenance": "exact-by-construction",
        },
        {
            "hypothesis": "f = g - h calm at the point",
            "status": "holds",
            "provenance": "exact-by-convexity",
        },
        {
            "hypothesis": "h directionally approximately starshaped, gap-continuous",
            "status": "holds",
            "provenance": "exact-by-convexity",
        },
        {
            "hypothesis": "point feasible",
            "status": "holds",
            "provenance": "exact",
        },
        {
            "hypothesis": "point interior to dom g",
            "status": "holds",
            "provenance": "exact",
        },
        {
            "hypothesis": "cone qualification",
            "status": "holds" if qualification == "Holds" else "fails",
            "provenance": "exact",
        },
    ]
    return OptimalityCertificate(
        feasible_at=True,
        qualification=qualification,
        qualification_cone=qcone,
        normal_cone_direct=direct,
        normal_cone_lagrange=lagrange,
        routes_agree=agree,
        inclusion28=inclusion28,
        inclusion_witness=witness28,
        verdict=verdict,
        descent=descent,
        lagrange_validated=lagrange_validated,
        hypothesis_report=report,
        notes=tuple(notes),
    )


def blunt_min_probe(
    p: ProblemInstance, x: Sequence, eps, plan: SamplingPlan = DEFAULT_PLAN
) -> ProbeVerdict:
    """Samples feasible points hunting for f(y) < f(x) - eps * ||y - x||_1.

    Candidates pass a float prefilter, then feasibility and the violation
    inequality are re-verified in exact rational arithmetic, so a reported
    witness is a proof.
    """
    e = parse_rational(eps)
    if e <= 0:
        raise NegativeEps(f"eps must be positive, got {eps}")
    a_set = feasible_set(p.constraints)
    xv = parse_vector(x, p.constraints.dim)
    if not contains_point(a_set, xv):
        raise InfeasiblePoint(f"{xv} is not feasible")
    dc = p.objective
    f0 = dc.evaluate(xv)
    f0f = float(f0)
    ef = float(e)
    dim = p.constraints.dim
    xf = np.array([float(v) for v in xv], dtype=float)
    hrep = a_set.hrep
    normals = np.array([[float(a) for a in h.normal] for h in hrep]).reshape(
        len(hrep), dim
    )
    offsets = np.array([float(h.offset) for h in hrep])
    shells: list[dict] = []
    any_feasible = False
    for k, r in enumerate(plan.shell_radii):
        rng = plan.rng(_TAG_BLUNT, k)
        w = _l1_ball_points(rng, plan.samples_per_shell, dim, r)
        pts = xf[None, :] + w
        feas = (
            (pts @ normals.T <= offsets[None, :] + 1e-9).all(axis=1)
            if len(hrep)
            else np.ones(len(pts), dtype=bool)
        )
        fv = dc.evaluate_batch(pts)
        margins = fv - f0f + ef * np.abs(w).sum(axis=1)
        usable = feas & np.isfinite(fv)
        any_feasible = any_feasible or bool(usable.any())
        inf_margin = float(np.min(margins[usable])) if usable.any() else math.inf
        shells.append({"radius": float(r), "inf": inf_margin})
        cand = np.flatnonzero(usable & (margins < 1e-9))
        cand = sorted(cand, key=lambda i: tuple(float(z) for z in pts[i]))
        for i in cand:
            yq = tuple(Fraction(float(z)) for z in pts[i])
            if not contains_point(a_set, yq):
                continue
            fy = dc.evaluate(yq)
            dist = sum(abs(a - b) for a, b in zip(yq, xv))
            if fy - f0 + e * dist < 0:
                witness = {
                    "x": [float(z) for z in pts[i]],
                    "x_exact": format_vector(yq),
                    "f_x": format_rational(fy),
                    "margin": format_rational(fy - f0 + e * dist),
                }
                return ProbeVerdict(
                    "FailsWithWitness",
                    witness,
                    shells,
                    notes=("violation verified in exact arithmetic",),
                )
    if not any_feasible:
        return ProbeVerdict(
            "Inconclusive", None, shells, notes=("no feasible samples",)
        )
    return ProbeVerdict(
        "Holds", None, shells, notes=("no violation found under this plan",)
    )
