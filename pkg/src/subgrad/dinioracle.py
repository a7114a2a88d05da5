"""Sampling oracles for Dini-Hadamard quantities of black-box functions.

Everything here is floating point and three-valued: sampling can exhibit a
violation (FailsWithWitness, always replayable) but can never prove one
absent, so "Holds" means "no violation found under this plan, plus any exact
shortcut that applies".  Exact answers live in funcmodel and calculus; these
probes cross-check them and extend coverage to functions given only as
expression trees.

Shell design
------------
A plan fixes a decreasing ladder of radii.  For shell radius r the sampler
draws pairs (t, u) with u in the l1 ball of radius r around the direction h
and t in two bands: an annulus band t in [r/2, r] whose quotients carry
roughly ulp(f)/t of rounding error and feed the derivative estimate, and a
deep band t in [r*2^-44, r/2] that hunts for divergence, where the joint
(t, u) -> (0, h) limit can fall far below any single-band quotient.  A
resolution gate classifies each sample: quotients whose worst-case rounding
error exceeds a precision budget are kept for divergence detection only, and
samples whose numerator is smaller than the evaluation noise floor are
discarded outright.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import EvaluationFailure, NegativeEps, ParseError, SubgradError
from .funcmodel import DCFunction, PAConvexFunction, dc_dini_subdifferential
from .polykernel import L1, gap
from .rationals import parse_rational, parse_vector

_EPS_MACH = float(np.finfo(np.float64).eps)
_RES_FACTOR = 8.0
_PRECISE_RTOL = 5e-7
_DEEP_SPAN = 43.0
_ANCHORS = 8
_CALM_TOL = 1e-4
_VERIFY_RTOL = 1e-10

_TAG_DINI = 0
_TAG_CALM = 1
_TAG_MEMBER = 2
_TAG_APPROX = 3
_TAG_GAP = 4
_TAG_BLUNT = 5


def _default_radii() -> tuple[float, ...]:
    return tuple(2.0 ** -k for k in range(1, 21))


@dataclass(frozen=True)
class SamplingPlan:
    """Deterministic sampling schedule shared by all probes.

    shell_radii must decrease strictly; every random stream is derived from
    seed and the (probe, shell) pair, so verdicts are independent of
    threading and evaluation order.
    """

    shell_radii: tuple[float, ...] = field(default_factory=_default_radii)
    samples_per_shell: int = 256
    seed: int = 0
    stabilization_window: int = 4
    stabilization_tol: float = 1e-6
    divergence_threshold: float = -1e6

    def __post_init__(self):
        radii = tuple(float(r) for r in self.shell_radii)
        if not radii:
            raise ParseError("shell_radii must be nonempty")
        if any(r <= 0 for r in radii):
            raise ParseError("shell radii must be positive")
        if any(a <= b for a, b in zip(radii, radii[1:])):
            raise ParseError("shell radii must decrease strictly")
        object.__setattr__(self, "shell_radii", radii)
        if self.samples_per_shell < 8:
            raise ParseError("samples_per_shell must be at least 8")
        if self.stabilization_window < 2:
            raise ParseError("stabilization_window must be at least 2")
        if self.stabilization_tol <= 0:
            raise ParseError("stabilization_tol must be positive")

    def rng(self, tag: int, shell_index: int) -> np.random.Generator:
        seq = np.random.SeedSequence(
            entropy=self.seed & 0xFFFFFFFFFFFFFFFF, spawn_key=(tag, shell_index)
        )
        return np.random.Generator(np.random.PCG64(seq))

    def with_overrides(self, **kw) -> "SamplingPlan":
        return replace(self, **kw)

    def to_json(self) -> dict:
        return {
            "shell_radii": list(self.shell_radii),
            "samples_per_shell": self.samples_per_shell,
            "seed": self.seed,
            "stabilization_window": self.stabilization_window,
            "stabilization_tol": self.stabilization_tol,
            "divergence_threshold": self.divergence_threshold,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "SamplingPlan":
        kw = {}
        for key in (
            "shell_radii",
            "samples_per_shell",
            "seed",
            "stabilization_window",
            "stabilization_tol",
            "divergence_threshold",
        ):
            if key in obj:
                kw[key] = tuple(obj[key]) if key == "shell_radii" else obj[key]
        return cls(**kw)


DEFAULT_PLAN = SamplingPlan()


def _sanitize(value):
    """JSON-safe copy: non-finite floats become strings, exact types decay."""
    if isinstance(value, dict):
        return {k: _sanitize(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_sanitize(v) for v in value]
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (np.floating, float)):
        f = float(value)
        if math.isnan(f):
            return "nan"
        if math.isinf(f):
            return "inf" if f > 0 else "-inf"
        return f
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    return value


@dataclass
class ProbeVerdict:
    """Three-valued probe outcome with per-shell diagnostics."""

    status: str
    witness: dict | None
    shells: list[dict]
    notes: tuple[str, ...] = ()

    @property
    def holds(self) -> bool:
        return self.status == "Holds"

    def to_json(self) -> dict:
        return _sanitize(
            {
                "status": self.status,
                "witness": self.witness,
                "shells": self.shells,
                "notes": list(self.notes),
            }
        )


@dataclass
class DiniEstimate:
    """Result of dini_directional_estimate with raw per-shell diagnostics."""

    estimate: float
    stable: bool
    diverged: bool
    shells: list[dict]
    witness: dict | None

    def to_json(self) -> dict:
        return _sanitize(
            {
                "estimate": self.estimate,
                "stable": self.stable,
                "diverged": self.diverged,
                "shells": self.shells,
                "witness": self.witness,
            }
        )


def _l1_ball_points(rng: np.random.Generator, n: int, dim: int, radius: float) -> np.ndarray:
    """Uniform points in the closed l1 ball, by rejection from the box."""
    out = np.empty((n, dim))
    filled = 0
    while filled < n:
        batch = max(4 * (n - filled), 32)
        cand = rng.uniform(-1.0, 1.0, size=(batch, dim))
        keep = cand[np.abs(cand).sum(axis=1) <= 1.0]
        take = min(len(keep), n - filled)
        out[filled : filled + take] = keep[:take]
        filled += take
    return out * radius


def _l1_sphere_points(rng: np.random.Generator, n: int, dim: int) -> np.ndarray:
    pts = _l1_ball_points(rng, n, dim, 1.0)
    norms = np.abs(pts).sum(axis=1)
    small = norms < 1e-12
    pts[small] = 0.0
    pts[small, 0] = 1.0
    norms[small] = 1.0
    return pts / norms[:, None]


def _as_float_vec(x: Sequence, dim: int) -> np.ndarray:
    exact = parse_vector(x, dim)
    return np.array([float(v) for v in exact], dtype=float)


def dini_directional_estimate(f, x, h, plan: SamplingPlan = DEFAULT_PLAN, *, tag: int = _TAG_DINI) -> DiniEstimate:
    """Sampled lower Dini-Hadamard derivative of f at x in direction h.

    Per shell the reported "inf" is the raw minimum quotient over all
    informative samples; "estimate_inf" restricts to samples whose rounding
    error passes the precision gate.  The estimate is the deepest available
    estimate_inf; the envelope diagnostic is the running min over this shell
    and all deeper ones, mirroring the monotone set of true shell infima.
    Divergence is flagged when at least two shells dive below the plan
    threshold, so a single rounding artifact cannot trigger it.
    """
    dim = f.dim
    xf = _as_float_vec(x, dim)
    hf = _as_float_vec(h, dim)
    fx = f.eval_float(xf)
    if not math.isfinite(fx):
        raise EvaluationFailure("f is not finite at the base point")
    res = _RES_FACTOR * _EPS_MACH * max(1.0, abs(fx))
    raws: list[float] = []
    ests: list[float | None] = []
    shells: list[dict] = []
    witness = None
    witness_q = math.inf
    for k, r in enumerate(plan.shell_radii):
        rng = plan.rng(tag, k)
        n = plan.samples_per_shell
        n_ann = n // 2
        n_deep = n - n_ann
        t_anchor = r * 2.0 ** (-np.arange(_ANCHORS) / _ANCHORS)
        t_ann = r * 2.0 ** (-rng.random(n_ann))
        t_deep = r * 2.0 ** (-(1.0 + _DEEP_SPAN * rng.random(n_deep)))
        t = np.concatenate([t_anchor, t_ann, t_deep])
        u = np.vstack(
            [
                np.tile(hf, (_ANCHORS, 1)),
                hf + _l1_ball_points(rng, n_ann + n_deep, dim, r),
            ]
        )
        pts = xf[None, :] + t[:, None] * u
        fv = f.evaluate_batch(pts)
        delta = fv - fx
        finite = np.isfinite(fv)
        with np.errstate(invalid="ignore", divide="ignore"):
            q = np.where(finite, delta / t, np.inf)
        precise = finite & (res / t <= _PRECISE_RTOL)
        coarse = finite & ~precise & (np.abs(delta) > res)
        info = precise | coarse
        absorbed = int((finite & ~info).sum())
        raw = float(np.min(q[info])) if info.any() else math.inf
        est = float(np.min(q[precise])) if precise.any() else None
        if raw < witness_q:
            witness_q = raw
            idx = int(np.argmin(np.where(info, q, np.inf)))
            witness = {
                "t": float(t[idx]),
                "u": [float(z) for z in u[idx]],
                "quotient": float(q[idx]),
            }
        raws.append(raw)
        ests.append(est)
        shells.append(
            {"radius": float(r), "inf": raw, "estimate_inf": est, "absorbed": absorbed}
        )
    env = math.inf
    for j in range(len(shells) - 1, -1, -1):
        env = min(env, raws[j])
        shells[j]["envelope"] = env
    diverged = sum(1 for v in raws if v < plan.divergence_threshold) >= 2
    estimate = math.inf
    for est in reversed(ests):
        if est is not None:
            estimate = est
            break
    stable = False
    if diverged:
        estimate = -math.inf
    else:
        w = plan.stabilization_window
        tail = [v for v in ests[-w:] if v is not None]
        if len(tail) == w and max(tail) - min(tail) <= plan.stabilization_tol:
            stable = True
    return DiniEstimate(estimate, stable, diverged, shells, witness)


def calmness_probe(f, x, plan: SamplingPlan = DEFAULT_PLAN) -> ProbeVerdict:
    """Tests d-f(x; 0) = 0, the calmness criterion.

    Piecewise-affine data is locally Lipschitz on its domain, so PA and DC
    inputs skip sampling.  For black boxes the h = 0 estimate diverging past
    the plan threshold falsifies calmness with a replayable (t, u) pair.
    """
    if isinstance(f, (PAConvexFunction, DCFunction)):
        return ProbeVerdict(
            "Holds",
            None,
            [],
            notes=("locally Lipschitz: piecewise-affine data, calmness exact",),
        )
    est = dini_directional_estimate(f, x, [0] * f.dim, plan, tag=_TAG_CALM)
    shells = [{"radius": s["radius"], "inf": s["inf"]} for s in est.shells]
    if est.diverged:
        witness = dict(est.witness or {})
        witness["threshold"] = plan.divergence_threshold
        return ProbeVerdict(
            "FailsWithWitness",
            witness,
            shells,
            notes=("NotCalm: difference quotients diverge below the threshold",),
        )
    if math.isfinite(est.estimate) and est.estimate >= -_CALM_TOL:
        return ProbeVerdict(
            "Holds", None, shells, notes=("quotients stay bounded near zero",)
        )
    return ProbeVerdict(
        "Inconclusive",
        None,
        shells,
        notes=("quotients negative or unstable without crossing the threshold",),
    )


def _lex_key(*arrays):
    def key(i: int):
        parts = []
        for a in arrays:
            v = a[i]
            if isinstance(v, np.ndarray):
                parts.extend(float(z) for z in v)
            else:
                parts.append(float(v))
        return tuple(parts)

    return key


def eps_subgradient_membership_probe(
    f, x, xstar, eps, alpha, plan: SamplingPlan = DEFAULT_PLAN
) -> ProbeVerdict:
    """Searches for points violating the eps-subgradient inequality at x.

    Violation: f(y) - f(x) < <xstar, y - x> - (alpha + eps) * ||y - x||_1.
    Holds needs both an empty search and a Holds from calmness_probe, since
    the inequality family defines membership only for calm functions.
    """
    e = float(parse_rational(eps))
    a = float(parse_rational(alpha))
    if e < 0:
        raise NegativeEps(f"eps must be nonnegative, got {eps}")
    if a <= 0:
        raise NegativeEps(f"alpha must be positive, got {alpha}")
    dim = f.dim
    xf = _as_float_vec(x, dim)
    sf = _as_float_vec(xstar, dim)
    fx = f.eval_float(xf)
    if not math.isfinite(fx):
        return ProbeVerdict(
            "Inconclusive", None, [], notes=("f is not finite at the base point",)
        )
    scale = max(1.0, abs(fx))
    shells: list[dict] = []
    any_finite = False
    for k, r in enumerate(plan.shell_radii):
        rng = plan.rng(_TAG_MEMBER, k)
        w = _l1_ball_points(rng, plan.samples_per_shell, dim, r)
        pts = xf[None, :] + w
        fv = f.evaluate_batch(pts)
        norms = np.abs(w).sum(axis=1)
        margin = fv - fx - w @ sf + (a + e) * norms
        finite = np.isfinite(fv) & (norms > 0)
        any_finite = any_finite or bool(finite.any())
        inf_margin = float(np.min(margin[finite])) if finite.any() else math.inf
        shells.append({"radius": float(r), "inf": inf_margin})
        bad = finite & (margin < -_VERIFY_RTOL * scale)
        if bad.any():
            idxs = np.flatnonzero(bad)
            best = min(idxs, key=_lex_key(pts, margin))
            witness = {
                "x": [float(z) for z in pts[best]],
                "f_x": float(fv[best]),
                "margin": float(margin[best]),
            }
            return ProbeVerdict(
                "FailsWithWitness",
                witness,
                shells,
                notes=("inequality violated at the witness point",),
            )
    if not any_finite:
        return ProbeVerdict(
            "Inconclusive", None, shells, notes=("no evaluable samples",)
        )
    calm = calmness_probe(f, x, plan)
    if calm.holds:
        return ProbeVerdict(
            "Holds",
            None,
            shells,
            notes=("no violation found under this plan",) + calm.notes,
        )
    return ProbeVerdict(
        "Inconclusive",
        None,
        shells,
        notes=("no violation found, but calmness is " + calm.status,),
    )


def _approx_margins(f, xs, ys, ts, eps_f, fx_vals, fy_vals):
    mids = ts[:, None] * xs + (1.0 - ts)[:, None] * ys
    fm = f.evaluate_batch(mids)
    dist = np.abs(xs - ys).sum(axis=1)
    rhs = ts * fx_vals + (1.0 - ts) * fy_vals + eps_f * ts * (1.0 - ts) * dist
    return rhs - fm, mids


def approx_regularity_probe(
    f,
    x,
    eps,
    mode: str,
    plan: SamplingPlan = DEFAULT_PLAN,
    direction: Sequence | None = None,
) -> ProbeVerdict:
    """Hunts for violations of the relaxed convexity inequalities.

    mode "convex": pairs x, y near the base point with mix parameter t; the
    pair spread is capped at min(radius/2, eps) because a spread beyond eps
    can violate the inequality even for functions that satisfy the property
    (the relaxation term scales with eps * ||x - y||, so wide pairs test a
    different regime than the t -> limit the property quantifies over).
    mode "starshaped": y is pinned to the base point.
    mode "directional": x = base + s*v with v near the given direction.
    Verdicts are literal: FailsWithWitness iff a sampled violation survives
    scalar re-evaluation, Holds otherwise.
    """
    e = float(parse_rational(eps))
    if e <= 0:
        raise NegativeEps(f"eps must be positive, got {eps}")
    if mode not in ("convex", "starshaped", "directional"):
        raise ParseError(f"unknown mode {mode!r}")
    if mode == "directional":
        if direction is None:
            raise ParseError("directional mode needs a direction")
        df = _as_float_vec(direction, f.dim)
    dim = f.dim
    xf = _as_float_vec(x, dim)
    fx = f.eval_float(xf)
    if not math.isfinite(fx):
        return ProbeVerdict(
            "Inconclusive", None, [], notes=("f is not finite at the base point",)
        )
    scale = max(1.0, abs(fx))
    t_anchor = np.array([0.25, 0.5, 0.75])
    shells: list[dict] = []
    any_finite = False
    for k, r in enumerate(plan.shell_radii):
        rng = plan.rng(_TAG_APPROX, k)
        n = plan.samples_per_shell
        if mode == "convex":
            w_cap = 0.999 * min(r / 2.0, e)
            centers = xf[None, :] + _l1_ball_points(rng, n, dim, r / 2.0)
            dirs = _l1_sphere_points(rng, n, dim)
            ell = w_cap * rng.random(n)
            rho = rng.random(n)
            xs0 = centers + (rho * ell)[:, None] * dirs
            ys0 = centers - ((1.0 - rho) * ell)[:, None] * dirs
        elif mode == "starshaped":
            xs0 = xf[None, :] + _l1_ball_points(rng, n, dim, r)
            ys0 = np.tile(xf, (n, 1))
        else:
            vs = df[None, :] + _l1_ball_points(rng, n, dim, r)
            s = r * rng.random(n)
            xs0 = xf[None, :] + s[:, None] * vs
            ys0 = np.tile(xf, (n, 1))
        t_rand = rng.random(n)
        reps = len(t_anchor) + 1
        xs = np.tile(xs0, (reps, 1))
        ys = np.tile(ys0, (reps, 1))
        ts = np.concatenate([np.repeat(t_anchor, n), t_rand])
        fxv = np.tile(f.evaluate_batch(xs0), reps)
        fyv = np.tile(f.evaluate_batch(ys0), reps)
        margin, _ = _approx_margins(f, xs, ys, ts, e, fxv, fyv)
        finite = np.isfinite(margin)
        any_finite = any_finite or bool(finite.any())
        inf_margin = float(np.min(margin[finite])) if finite.any() else math.inf
        shells.append({"radius": float(r), "inf": inf_margin})
        bad = finite & (margin < -_VERIFY_RTOL * scale)
        if bad.any():
            idxs = np.flatnonzero(bad)
            best = min(idxs, key=_lex_key(xs, ys, ts))
            xw = [float(z) for z in xs[best]]
            yw = [float(z) for z in ys[best]]
            tw = float(ts[best])
            lhs = f.eval_float(np.array(xw) * tw + np.array(yw) * (1.0 - tw))
            rhs = (
                tw * f.eval_float(xw)
                + (1.0 - tw) * f.eval_float(yw)
                + e * tw * (1.0 - tw) * float(np.abs(np.array(xw) - np.array(yw)).sum())
            )
            if not lhs > rhs:
                continue
            witness = {
                "x": xw,
                "y": yw,
                "t": tw,
                "lhs": lhs,
                "rhs": rhs,
                "margin": float(margin[best]),
            }
            return ProbeVerdict(
                "FailsWithWitness",
                witness,
                shells,
                notes=(f"{mode} inequality violated at the witness",),
            )
    if not any_finite:
        return ProbeVerdict(
            "Inconclusive", None, shells, notes=("no evaluable samples",)
        )
    return ProbeVerdict(
        "Holds", None, shells, notes=("no violation found under this plan",)
    )


def gap_continuity_probe(f, x, eps, plan: SamplingPlan = DEFAULT_PLAN) -> ProbeVerdict:
    """Tests gap continuity of the subdifferential map at x.

    The map is the exact subdifferential for a PA convex function and the
    exact Dini-Hadamard subdifferential (eps = eta = 0) for a DC pair; each
    sampled float point is promoted to exact rationals, so every reported
    gap is exact.  Decision runs deepest shell first: a shell whose gaps all
    stay below eps certifies Holds (a candidate delta), a shell whose gaps
    all reach eps certifies FailsWithWitness, anything else is Inconclusive.
    """
    e = parse_rational(eps)
    if e <= 0:
        raise NegativeEps(f"eps must be positive, got {eps}")
    if isinstance(f, PAConvexFunction):
        def map_at(p):
            return f.subdifferential_at(p)
    elif isinstance(f, DCFunction):
        def map_at(p):
            return dc_dini_subdifferential(f, p, 0, 0)
    else:
        raise ParseError(
            "gap continuity needs exact subdifferentials; pass a PA or DC function"
        )
    dim = f.dim
    exact_x = parse_vector(x, dim)
    xf = np.array([float(v) for v in exact_x], dtype=float)
    base = map_at(exact_x)
    n = min(plan.samples_per_shell, 16)
    shells: list[dict] = []
    records: list[tuple[int, list, list]] = []
    for k, r in enumerate(plan.shell_radii):
        rng = plan.rng(_TAG_GAP, k)
        w = _l1_ball_points(rng, n, dim, r)
        pts = xf[None, :] + w
        gaps = []
        used = []
        for row in pts:
            p = tuple(Fraction(float(v)) for v in row)
            try:
                g = gap(base, map_at(p), L1)
            except SubgradError:
                continue
            gaps.append(g)
            used.append([float(v) for v in row])
        if gaps:
            lo = min(gaps)
            hi = max(gaps)
        else:
            lo = hi = math.inf
        shells.append(
            {
                "radius": float(r),
                "inf": float(lo) if lo != math.inf else math.inf,
                "sup": float(hi) if hi != math.inf else math.inf,
            }
        )
        records.append((k, gaps, used))
    for k, gaps, used in reversed(records):
        if not gaps:
            continue
        if max(gaps) < e:
            return ProbeVerdict(
                "Holds",
                None,
                shells,
                notes=(f"all sampled gaps below eps in shell {k}",),
            )
        if min(gaps) >= e:
            pairs = sorted(zip(used, gaps), key=lambda z: tuple(z[0]))
            px, pg = pairs[0]
            witness = {
                "x": px,
                "gap": float(pg) if pg != math.inf else math.inf,
            }
            return ProbeVerdict(
                "FailsWithWitness",
                witness,
                shells,
                notes=(f"every sampled gap reaches eps in shell {k}",),
            )
    return ProbeVerdict(
        "Inconclusive", None, shells, notes=("no decisive shell under this plan",)
    )
