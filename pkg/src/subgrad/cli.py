"""Command-line front end: scenario files in, reports and exit codes out.

Exit codes: 0 the claim holds (Equal / Holds / certified), 1 a failure with
witness, 2 inconclusive, 3 input or validation error.  Text goes to stdout;
--json writes a machine report whose bytes depend only on inputs and seed,
never on wall time or thread count.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .calculus import (
    Certificate,
    check_corollary11,
    check_corollary12,
    check_difference_formula,
    check_inclusion_13,
    check_intersection_formula,
    check_sum_rule,
    local_min_necessary,
)
from .dinioracle import (
    DEFAULT_PLAN,
    SamplingPlan,
    approx_regularity_probe,
    calmness_probe,
    dini_directional_estimate,
    eps_subgradient_membership_probe,
    gap_continuity_probe,
)
from .errors import ParseError, SubgradError
from .funcmodel import (
    DCFunction,
    PAConvexFunction,
    dc_dini_subdifferential,
    dc_hypothesis_report,
    function_from_json,
)
from .optimality import ProblemInstance, blunt_min_probe, certify_blunt_minimizer
from .polykernel import CAPS, L1, NormSpec, Polyhedron, star_difference
from .rationals import format_rational, parse_rational

_CLAIM_TOKENS = {
    "sumrule12": "SumRule12",
    "inclusion13": "Inclusion13",
    "equality22": "Equality22",
    "equality26": "Equality26",
    "intersection27": "Intersection27",
    "cor11": "Cor11",
    "cor12a": "Cor12a",
    "cor12b": "Cor12b",
    "localmin": "LocalMinNecessary",
    "localminnecessary": "LocalMinNecessary",
}

_PROBE_KINDS = ("dini", "calmness", "membership", "regularity", "gap", "blunt")


@dataclass
class RunOutcome:
    """One scenario's verdict: exit code, text report, JSON payload."""

    exit_code: int
    text: str
    payload: dict


def _load_ref(value, base: Path) -> dict:
    """A scenario input: inline object, or a path relative to the scenario."""
    if isinstance(value, dict):
        return value
    if isinstance(value, str):
        path = Path(value)
        if not path.is_absolute():
            path = base / path
        try:
            with open(path) as fh:
                return json.load(fh)
        except OSError as exc:
            raise ParseError(f"cannot read {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path} is not valid JSON: {exc}") from exc
    raise ParseError(f"expected a file path or inline object, got {type(value).__name__}")


def _parse_point(value) -> tuple:
    if isinstance(value, str):
        parts = [p for p in value.split(",") if p.strip()]
    elif isinstance(value, (list, tuple)):
        parts = list(value)
    else:
        parts = [value]
    if not parts:
        raise ParseError("empty point")
    return tuple(parse_rational(p) for p in parts)


def _parse_rational_list(value) -> tuple:
    if isinstance(value, str):
        parts = [p for p in value.split(",") if p.strip()]
    else:
        parts = list(value)
    return tuple(parse_rational(p) for p in parts)


def _plan_from(scenario: dict, seed: int | None) -> SamplingPlan:
    plan = DEFAULT_PLAN
    if scenario.get("plan"):
        plan = SamplingPlan.from_json(scenario["plan"])
    if seed is not None:
        plan = plan.with_overrides(seed=seed)
    return plan


def _interval_text(p: Polyhedron) -> str | None:
    c = p.canonical()
    if c.dim != 1 or c.is_empty or c.rays:
        return None
    vals = sorted(v[0] for v in c.vertices)
    if len(vals) == 1:
        return f"[{format_rational(vals[0])}]"
    return f"[{format_rational(vals[0])}, {format_rational(vals[-1])}]"


def _poly_text(p: Polyhedron) -> str:
    c = p.canonical()
    if c.is_empty:
        return "empty"
    iv = _interval_text(c)
    if iv is not None:
        return iv
    vs = "; ".join(
        "(" + ", ".join(format_rational(x) for x in v) + ")" for v in c.vertices
    )
    out = "conv{" + vs + "}"
    if c.rays:
        rs = "; ".join(
            "(" + ", ".join(format_rational(x) for x in r) + ")" for r in c.rays
        )
        out += " + cone{" + rs + "}"
    return out


def _hypothesis_lines(report) -> list[str]:
    lines = ["hypotheses:"]
    for entry in report:
        lines.append(
            f"  [{entry['status']}] {entry['hypothesis']} ({entry['provenance']})"
        )
    return lines


def _certificate_outcome(scenario_name: str, cert: Certificate) -> RunOutcome:
    lhs, rhs = _poly_text(cert.lhs), _poly_text(cert.rhs)
    relation = {"Equal": "=", "StrictInclusion": "strictly inside", "Fails": "not within"}[
        cert.verdict
    ]
    lines = [
        f"scenario: {scenario_name}",
        f"claim: {cert.claim_id}",
        f"verdict: {cert.verdict}",
        f"sets: {lhs} {relation} {rhs}",
    ]
    if cert.witness is not None:
        lines.append(
            "witness: ("
            + ", ".join(format_rational(v) for v in cert.witness)
            + ")"
        )
    lines.extend(_hypothesis_lines(cert.hypothesis_report))
    lines.append(f"theorem_certified: {cert.theorem_certified}")
    for note in cert.notes:
        lines.append(f"note: {note}")
    code = 0 if cert.passed else 1
    payload = {"kind": "check", "exit": code}
    payload.update(cert.to_json())
    return RunOutcome(code, "\n".join(lines), payload)


def _probe_outcome(scenario_name: str, kind: str, verdict, extra_lines=()) -> RunOutcome:
    code = {"Holds": 0, "FailsWithWitness": 1, "Inconclusive": 2}[verdict.status]
    lines = [f"scenario: {scenario_name}", f"probe: {kind}", f"status: {verdict.status}"]
    if verdict.witness is not None:
        lines.append(f"witness: {json.dumps(verdict.witness, sort_keys=True, default=str)}")
    lines.extend(extra_lines)
    if verdict.shells:
        lines.append("shells:")
        for s in verdict.shells:
            lines.append(f"  radius {s['radius']:.9g}  inf {s['inf']}")
    for note in verdict.notes:
        lines.append(f"note: {note}")
    payload = {"kind": "probe", "probe": kind, "exit": code}
    payload.update(verdict.to_json())
    return RunOutcome(code, "\n".join(lines), payload)


def _function_hypothesis_lines(fn, point) -> list[str]:
    if isinstance(fn, DCFunction):
        return _hypothesis_lines(dc_hypothesis_report(fn, point))
    if isinstance(fn, PAConvexFunction):
        return [
            "hypotheses:",
            "  [holds] piecewise-affine convex model (exact-by-construction)",
        ]
    return ["hypotheses:", "  [unknown] black-box model, sampling only"]


def _run_subdiff(name: str, sc: dict, base: Path, ov: dict) -> RunOutcome:
    fn = function_from_json(_load_ref(sc["function"], base))
    point = _parse_point(ov.get("point") or sc["point"])
    eps = parse_rational(ov.get("eps") or sc.get("eps", 0))
    norm = NormSpec.parse(ov.get("norm") or sc.get("norm", "l1"))
    if isinstance(fn, DCFunction):
        eta = parse_rational(ov.get("eta") or sc.get("eta", 0))
        poly = dc_dini_subdifferential(fn, point, eps, eta, norm)
    elif isinstance(fn, PAConvexFunction):
        poly = fn.eps_subdifferential_at(point, eps, norm)
    else:
        raise ParseError("subdiff needs an exact function model, not a black box")
    payload = {"kind": "subdiff", "exit": 0, "polyhedron": poly.to_json()}
    return RunOutcome(0, json.dumps(poly.to_json(), indent=2, sort_keys=True), payload)


def _run_stardiff(name: str, sc: dict, base: Path, ov: dict) -> RunOutcome:
    a = Polyhedron.from_json(_load_ref(sc["A"], base))
    b = Polyhedron.from_json(_load_ref(sc["B"], base))
    poly = star_difference(a, b)
    payload = {"kind": "stardiff", "exit": 0, "polyhedron": poly.to_json()}
    return RunOutcome(0, json.dumps(poly.to_json(), indent=2, sort_keys=True), payload)


def _as_dc(obj) -> DCFunction:
    fn = function_from_json(obj)
    if not isinstance(fn, DCFunction):
        raise ParseError("this claim needs a DC function (type 'dc')")
    return fn


def _run_check(name: str, sc: dict, base: Path, ov: dict) -> RunOutcome:
    token = str(sc["claim"]).lower().replace("_", "").replace("-", "")
    claim = _CLAIM_TOKENS.get(token)
    if claim is None:
        raise ParseError(f"unknown claim {sc['claim']!r}")
    point = _parse_point(ov.get("point") or sc["point"])
    eps = parse_rational(ov.get("eps") or sc.get("eps", 0))
    eta = parse_rational(ov.get("eta") or sc.get("eta", 0))
    norm = NormSpec.parse(ov.get("norm") or sc.get("norm", "l1"))
    if claim == "SumRule12":
        f_obj = function_from_json(_load_ref(sc["f"], base))
        g_obj = function_from_json(_load_ref(sc["g"], base))
        if not isinstance(f_obj, PAConvexFunction) or not isinstance(
            g_obj, PAConvexFunction
        ):
            raise ParseError("sumrule12 needs two PA convex functions")
        cert = check_sum_rule(f_obj, g_obj, point, eps, eta)
        return _certificate_outcome(name, cert)
    dc = _as_dc(_load_ref(sc["dc"], base))
    if claim in ("Equality22", "Equality26"):
        cert = check_difference_formula(dc, point, eps, eta, norm)
        if cert.claim_id != claim:
            raise ParseError(
                f"eps={eps} eta={eta} selects {cert.claim_id}, not {claim}"
            )
    elif claim == "Inclusion13":
        cert = check_inclusion_13(dc, point, eps, eta, norm)
    elif claim == "Intersection27":
        mus = _parse_rational_list(sc.get("mus", ["0"]))
        cert = check_intersection_formula(dc, point, eps, mus, norm)
    elif claim == "Cor11":
        etas = _parse_rational_list(sc.get("etas", ["0", "1/2", "1"]))
        cert = check_corollary11(dc, point, etas)
    elif claim in ("Cor12a", "Cor12b"):
        cert = check_corollary12(dc, point, eps, norm, variant=claim[-1])
    elif claim == "LocalMinNecessary":
        cert = local_min_necessary(dc, point)
    else:
        raise ParseError(f"unhandled claim {claim}")
    return _certificate_outcome(name, cert)


def _run_certify(name: str, sc: dict, base: Path, ov: dict) -> RunOutcome:
    problem = ProblemInstance.from_json(_load_ref(sc["problem"], base))
    point = _parse_point(ov.get("point") or sc["point"])
    cert = certify_blunt_minimizer(problem, point)
    code = 0 if cert.verdict == "BluntMinimizerAllEps" else 1
    lines = [
        f"scenario: {name}",
        "claim: Theorem14",
        f"verdict: {cert.verdict}",
        f"qualification: {cert.qualification}",
        f"normal-cone routes agree: {cert.routes_agree}",
        f"inclusion of subdiff(h): {cert.inclusion28}",
        f"lagrange_validated: {cert.lagrange_validated}",
    ]
    if cert.descent is not None:
        d = cert.descent
        lines.append(
            "descent witness: direction ("
            + ", ".join(format_rational(v) for v in d["direction"])
            + f"), rate {format_rational(d['rate'])}"
            + f", step {format_rational(d['step'])}"
            + f", violation margin {format_rational(d['violation_margin'])}"
        )
    lines.extend(_hypothesis_lines(cert.hypothesis_report))
    lines.append(f"theorem_certified: {cert.theorem_certified}")
    for note in cert.notes:
        lines.append(f"note: {note}")
    payload = {"kind": "certify", "exit": code}
    payload.update(cert.to_json())
    return RunOutcome(code, "\n".join(lines), payload)


def _run_probe(name: str, sc: dict, base: Path, ov: dict) -> RunOutcome:
    kind = sc.get("probe")
    if kind not in _PROBE_KINDS:
        raise ParseError(f"unknown probe {kind!r}; expected one of {_PROBE_KINDS}")
    plan = _plan_from(sc, ov.get("seed"))
    point = _parse_point(ov.get("point") or sc["point"])
    if kind == "blunt":
        problem = ProblemInstance.from_json(_load_ref(sc["problem"], base))
        eps = ov.get("eps") or sc["eps"]
        verdict = blunt_min_probe(problem, point, eps, plan)
        return _probe_outcome(name, kind, verdict)
    fn = function_from_json(_load_ref(sc["function"], base))
    if kind == "dini":
        h = _parse_point(sc["direction"])
        est = dini_directional_estimate(fn, point, h, plan)
        code = 0 if est.stable else (1 if est.diverged else 2)
        lines = [
            f"scenario: {name}",
            "probe: dini",
            f"estimate: {est.estimate}",
            f"stable: {est.stable}",
            f"diverged: {est.diverged}",
        ]
        if est.witness:
            lines.append(
                f"witness: {json.dumps(est.witness, sort_keys=True, default=str)}"
            )
        lines.extend(_function_hypothesis_lines(fn, point))
        payload = {
            "kind": "probe",
            "probe": "dini",
            "exit": code,
            "verdict": "diverged" if est.diverged else ("stable" if est.stable else "unstable"),
        }
        payload.update(est.to_json())
        return RunOutcome(code, "\n".join(lines), payload)
    extra = _function_hypothesis_lines(fn, point)
    if kind == "calmness":
        verdict = calmness_probe(fn, point, plan)
    elif kind == "membership":
        xstar = _parse_point(sc["xstar"])
        eps = ov.get("eps") or sc.get("eps", 0)
        alpha = sc.get("alpha", "1")
        verdict = eps_subgradient_membership_probe(fn, point, xstar, eps, alpha, plan)
    elif kind == "regularity":
        eps = ov.get("eps") or sc["eps"]
        mode = sc.get("mode", "convex")
        direction = sc.get("direction")
        verdict = approx_regularity_probe(
            fn,
            point,
            eps,
            mode,
            plan,
            direction=None if direction is None else _parse_point(direction),
        )
    elif kind == "gap":
        eps = ov.get("eps") or sc["eps"]
        verdict = gap_continuity_probe(fn, point, eps, plan)
    else:
        raise ParseError(f"unhandled probe {kind}")
    return _probe_outcome(name, kind, verdict, extra_lines=extra)


_DISPATCH = {
    "subdiff": _run_subdiff,
    "stardiff": _run_stardiff,
    "check": _run_check,
    "certify": _run_certify,
    "probe": _run_probe,
}


def run_scenario_dict(sc: dict, base: Path, ov: dict, name: str) -> RunOutcome:
    kind = sc.get("kind")
    if kind not in _DISPATCH:
        raise ParseError(f"unknown scenario kind {kind!r}")
    try:
        return _DISPATCH[kind](name, sc, base, ov)
    except KeyError as exc:
        raise ParseError(f"scenario is missing field {exc.args[0]!r}") from exc


def run_scenario(path: Path, ov: dict) -> RunOutcome:
    try:
        with open(path) as fh:
            sc = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(sc, dict):
        raise ParseError(f"{path} must contain a JSON object")
    name = sc.get("name", Path(path).stem)
    return run_scenario_dict(sc, Path(path).parent, ov, name)


def corpus_run(directory: Path, pattern: str, jobs: int, ov: dict) -> RunOutcome:
    directory = Path(directory)
    if not directory.is_dir():
        raise ParseError(f"{directory} is not a directory")
    files = sorted(directory.glob(pattern), key=lambda p: p.name)
    if not files:
        raise ParseError(f"no scenario files matching {pattern!r} in {directory}")

    def work(path: Path):
        start = time.perf_counter()
        try:
            with open(path) as fh:
                sc = json.load(fh)
            claim = sc.get("claim") or sc.get("probe") or sc.get("kind", "?")
            out = run_scenario(path, ov)
        except SubgradError as exc:
            claim = "?"
            out = RunOutcome(3, f"error: {exc}", {"exit": 3, "error": str(exc)})
        except (OSError, json.JSONDecodeError, ValueError) as exc:
            claim = "?"
            out = RunOutcome(3, f"error: {exc}", {"exit": 3, "error": str(exc)})
        return path.name, str(claim), out, time.perf_counter() - start

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(work, files))
    else:
        rows = [work(f) for f in files]

    exits = [out.exit_code for _, _, out, _ in rows]
    if any(e == 1 for e in exits):
        code = 1
    elif any(e == 3 for e in exits):
        code = 3
    elif any(e == 2 for e in exits):
        code = 2
    else:
        code = 0
    width = max(len(n) for n, _, _, _ in rows)
    cwidth = max(len(c) for _, c, _, _ in rows)
    lines = []
    for fname, claim, out, wall in rows:
        verdict = out.payload.get("verdict") or out.payload.get("status") or (
            "ok" if out.exit_code == 0 else "error"
        )
        lines.append(
            f"{fname:<{width}}  {claim:<{cwidth}}  {verdict:<20}  {wall:8.3f}s"
        )
    lines.append(f"corpus exit: {code}")
    payload = {
        "kind": "corpus",
        "exit": code,
        "scenarios": [
            {
                "name": fname,
                "claim": claim,
                "verdict": out.payload.get("verdict")
                or out.payload.get("status")
                or ("ok" if out.exit_code == 0 else "error"),
                "exit": out.exit_code,
                "result": out.payload,
            }
            for fname, claim, out, _ in rows
        ],
    }
    return RunOutcome(code, "\n".join(lines), payload)


def _common_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--seed", type=int, default=None, help="override plan seed")
    parser.add_argument("--json", default=None, help="write JSON report to this path")
    parser.add_argument("--norm", default=None, help="l1 | linf | l2approx:<k>")
    parser.add_argument("--eps", default=None, help="rational p/q")
    parser.add_argument("--eta", default=None, help="rational p/q")
    parser.add_argument("--point", default=None, help="comma-separated rationals")
    parser.add_argument("--max-dim", type=int, default=None, help="dimension cap")


def _overrides(args) -> dict:
    return {
        "seed": args.seed,
        "norm": args.norm,
        "eps": args.eps,
        "eta": args.eta,
        "point": args.point,
    }


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="subgrad",
        description="exact subdifferential calculus with sampling cross-checks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("subdiff", help="eps-subdifferential of a function at a point")
    p.add_argument("--function", required=True)
    _common_flags(p)

    p = sub.add_parser("stardiff", help="star-difference of two polyhedra")
    p.add_argument("--A", required=True)
    p.add_argument("--B", required=True)
    _common_flags(p)

    p = sub.add_parser("check", help="verify a calculus claim on given data")
    p.add_argument("--claim", required=True)
    p.add_argument("--dc", default=None)
    p.add_argument("--f", default=None)
    p.add_argument("--g", default=None)
    p.add_argument("--mus", default=None)
    p.add_argument("--etas", default=None)
    _common_flags(p)

    p = sub.add_parser("certify", help="blunt-minimality certificate for a problem")
    p.add_argument("--problem", required=True)
    _common_flags(p)

    p = sub.add_parser("probe", help="sampling probe on a function or problem")
    p.add_argument("--probe", required=True, choices=_PROBE_KINDS)
    p.add_argument("--function", default=None)
    p.add_argument("--problem", default=None)
    p.add_argument("--direction", default=None)
    p.add_argument("--xstar", default=None)
    p.add_argument("--alpha", default=None)
    p.add_argument("--mode", default=None)
    p.add_argument("--plan", default=None)
    _common_flags(p)

    p = sub.add_parser("run", help="run one scenario file")
    p.add_argument("scenario")
    _common_flags(p)

    p = sub.add_parser("corpus", help="run every scenario in a directory")
    p.add_argument("directory")
    p.add_argument("--filter", default="*.json")
    p.add_argument("--jobs", type=int, default=1)
    _common_flags(p)

    return parser


def _scenario_from_flags(args) -> dict:
    sc: dict = {"kind": args.command}
    if args.command == "subdiff":
        sc["function"] = args.function
    elif args.command == "stardiff":
        sc["A"] = args.A
        sc["B"] = args.B
    elif args.command == "check":
        sc["claim"] = args.claim
        if args.dc:
            sc["dc"] = args.dc
        if args.f:
            sc["f"] = args.f
        if args.g:
            sc["g"] = args.g
        if args.mus:
            sc["mus"] = args.mus.split(",")
        if args.etas:
            sc["etas"] = args.etas.split(",")
    elif args.command == "certify":
        sc["problem"] = args.problem
    elif args.command == "probe":
        sc["probe"] = args.probe
        if args.function:
            sc["function"] = args.function
        if args.problem:
            sc["problem"] = args.problem
        if args.direction:
            sc["direction"] = args.direction
        if args.xstar:
            sc["xstar"] = args.xstar
        if args.alpha:
            sc["alpha"] = args.alpha
        if args.mode:
            sc["mode"] = args.mode
        if args.plan:
            with open(args.plan) as fh:
                sc["plan"] = json.load(fh)
    if args.point:
        sc["point"] = args.point
    if args.eps:
        sc["eps"] = args.eps
    if args.eta:
        sc["eta"] = args.eta
    if args.norm:
        sc["norm"] = args.norm
    return sc


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    env_cap = os.environ.get("SUBGRAD_MAX_FACETS")
    if env_cap:
        try:
            CAPS.max_facets = int(env_cap)
        except ValueError:
            print(f"SUBGRAD_MAX_FACETS={env_cap!r} is not an integer", file=sys.stderr)
            return 3
    if args.max_dim is not None:
        CAPS.max_dim = args.max_dim
    ov = _overrides(args)
    try:
        if args.command == "run":
            outcome = run_scenario(Path(args.scenario), ov)
        elif args.command == "corpus":
            outcome = corpus_run(Path(args.directory), args.filter, args.jobs, ov)
        else:
            sc = _scenario_from_flags(args)
            outcome = run_scenario_dict(sc, Path.cwd(), ov, args.command)
    except SubgradError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        if args.json:
            report = {"exit": 3, "error": f"{type(exc).__name__}: {exc}"}
            Path(args.json).write_text(
                json.dumps(report, indent=2, sort_keys=True) + "\n"
            )
        return 3
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    print(outcome.text)
    if args.json:
        Path(args.json).write_text(
            json.dumps(outcome.payload, indent=2, sort_keys=True) + "\n"
        )
    return outcome.exit_code


if __name__ == "__main__":
    sys.exit(main())
