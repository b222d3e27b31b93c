"""Command-line orchestration: evaluation, property suites, ratio hunts,
and canned reproduction scenarios, with machine-readable reports.

Reports are canonical: floats are serialized with 17 significant digits,
keys in fixed order, and nothing time- or host-dependent enters the JSON,
so re-running a command with the same seed and version produces
byte-identical output.  Wall-clock runtime is printed on the console only.

Exit codes: 0 consistent, 1 a property outcome contradicts the documented
expectation for that mechanism, 2 usage or parse errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .geometry import (
    GEOM_TOL,
    Lottery,
    Norm,
    Point,
    Profile,
    centroid,
    format_norm,
    parse_norm,
    radius,
)
from .mechanisms import MechanismSpec, apply, describe, parse_mechanism, resolve
from .objectives import (
    Objective,
    approx_ratio,
    cost_mc,
    cost_sc,
    opt_max_cost,
    opt_social_cost,
)
from .properties import (
    PropertyVerdict,
    Witness,
    check_2dictatorship,
    check_cost_continuity,
    check_group_strategyproof_at,
    check_support_segment,
    check_translation_invariance,
    check_unanimity,
    check_uncompromising,
)
from .search import (
    DISCUSSION_PROFILE,
    SearchConfig,
    search_gsp_violation,
    search_sp_violation,
    search_worst_ratio,
    structured_profiles,
)

PROPERTIES = (
    "unanimity",
    "translation_invariance",
    "strategyproof",
    "group_strategyproof",
    "support_segment",
    "2dictatorship",
    "cost_continuity",
    "uncompromising",
)

SCENARIOS = ("l1-median", "table1", "mech2-demo", "procaccia-n2")


# -- canonical serialization ---------------------------------------------------


def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return f"{x:.17g}"


def canonical_json(value) -> str:
    """Deterministic JSON: insertion-ordered keys, 17-significant-digit floats."""
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return _fmt_float(value)
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, dict):
        inner = ",".join(f"{json.dumps(str(k))}:{canonical_json(v)}" for k, v in value.items())
        return "{" + inner + "}"
    if isinstance(value, (list, tuple)):
        return "[" + ",".join(canonical_json(v) for v in value) + "]"
    raise TypeError(f"cannot serialize {type(value)!r}")


def point_json(pt: Point) -> list:
    return [float(c) for c in pt.coords]


def profile_json(profile: Profile) -> dict:
    return {"d": profile.d, "points": [point_json(p) for p in profile.points]}


def lottery_json(lot: Lottery) -> list:
    return [{"weight": float(w), "point": point_json(p)} for w, p in lot.atoms]


def witness_json(w: Witness) -> dict:
    return {
        "profile": profile_json(w.profile),
        "coalition": list(w.coalition),
        "misreports": [point_json(p) for p in w.misreports],
        "per_agent_delta": [
            {"agent": i, "cost_before": b, "cost_after": a}
            for i, b, a in w.per_agent_delta
        ],
        "note": w.note,
    }


def verdict_json(v: PropertyVerdict) -> dict:
    return {
        "property": v.name,
        "passed": v.passed,
        "inconclusive": v.inconclusive,
        "margin": v.margin,
        "witness": witness_json(v.witness) if v.witness is not None else None,
        "note": v.note,
    }


@dataclass
class ExperimentReport:
    scenario: str
    spec: str
    norm: str
    seed: int
    objective_values: dict = field(default_factory=dict)
    verdicts: list = field(default_factory=list)
    ratio_interval: Optional[tuple[float, float]] = None
    witnesses: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)
    runtime_ms: int = 0
    tool_version: str = __version__

    def to_json(self) -> str:
        # runtime_ms stays out of the canonical form: reports must be
        # byte-identical across re-runs with the same seed and version.
        payload = {
            "scenario": self.scenario,
            "spec": self.spec,
            "norm": self.norm,
            "seed": self.seed,
            "tool_version": self.tool_version,
            "objective_values": self.objective_values,
            "verdicts": [verdict_json(v) for v in self.verdicts],
            "ratio_interval": list(self.ratio_interval) if self.ratio_interval else None,
            "witnesses": [witness_json(w) for w in self.witnesses],
            "extra": self.extra,
        }
        return canonical_json(payload) + "\n"

    def write(self, path: Optional[str]) -> None:
        if path:
            Path(path).write_text(self.to_json(), encoding="utf-8")
            print(f"report written to {path}")


# -- profile file IO -----------------------------------------------------------


def load_profile(path: str) -> Profile:
    """Read {"d": int, "points": [[...], ...]} with field-level diagnostics."""
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as err:
        raise ValueError(f"cannot read profile file {path}: {err}") from err
    except json.JSONDecodeError as err:
        raise ValueError(
            f"profile file {path} is not valid JSON (line {err.lineno}, column {err.colno})"
        ) from err
    if not isinstance(raw, dict) or "points" not in raw:
        raise ValueError(f"profile file {path}: expected an object with a 'points' field")
    points = raw["points"]
    if not isinstance(points, list) or not points:
        raise ValueError(f"profile file {path}: 'points' must be a nonempty list")
    d = raw.get("d")
    rows = []
    for idx, row in enumerate(points):
        if not isinstance(row, list) or (d is not None and len(row) != d):
            raise ValueError(
                f"profile file {path}: point {idx} must be a list of {d} reals"
            )
        rows.append([float(x) for x in row])
    return Profile.from_rows(rows)


# -- property suite ------------------------------------------------------------


def _first_coord_dominated(norm: Norm) -> bool:
    """Whether |v_0| <= ||v|| holds, the geometry the sep2d analysis needs."""
    if norm.transform is not None:
        return False
    if norm.weights is not None and norm.weights[0] < 1.0:
        return False
    return True


def expected_outcomes(spec: MechanismSpec, n: int, d: int, norm: Norm) -> dict:
    """Documented behavior per mechanism: pass / fail / info (no claim)."""
    exp = {name: "pass" for name in PROPERTIES}
    kind = spec.kind
    if kind == "rand_center":
        exp["group_strategyproof"] = (
            "fail" if n >= 3 and d >= 2 and norm.strictly_convex else "info"
        )
        exp["support_segment"] = "fail" if n >= 3 and d >= 2 else "pass"
        exp["2dictatorship"] = "fail" if n >= 3 and d >= 2 else ("pass" if d >= 2 else "info")
    if kind == "sep2d":
        exp["translation_invariance"] = "fail"
        exp["2dictatorship"] = "fail"
        if not _first_coord_dominated(norm):
            exp["strategyproof"] = "info"
            exp["group_strategyproof"] = "info"
            exp["translation_invariance"] = "info"
            exp["2dictatorship"] = "info"
            exp["cost_continuity"] = "info"
    if kind == "coord_median":
        exp["group_strategyproof"] = "info"
        exp["2dictatorship"] = "info"
        if norm.transform is not None:
            exp["strategyproof"] = "info"
            exp["cost_continuity"] = "info"
    if d == 1:
        # segment/dictatorship characterizations need d >= 2; geometry checks soften
        exp["support_segment"] = "pass"
        exp["2dictatorship"] = "info"
    return exp


def _sp_search_verdict(name: str, witness: Optional[Witness]) -> PropertyVerdict:
    if witness is None:
        return PropertyVerdict(name, True, 0.0, note="no validated witness within budget")
    margin = max(after - before for _, before, after in witness.per_agent_delta)
    return PropertyVerdict(name, False, margin, witness)


def _check_profiles(spec: MechanismSpec, n: int, d: int, seed: int) -> list[Profile]:
    profiles = structured_profiles(n, d)
    gen = np.random.Generator(np.random.Philox(key=seed).jumped(987))
    for _ in range(4):
        profiles.append(Profile.from_rows(gen.normal(size=(n, d)) * 1.5))
    if spec.kind == "sep2d":
        # pin profiles on both sides of the branch constant
        for offset in (0.7, -0.7):
            base = profiles[0]
            shifted = base.replaced(
                1,
                Point(tuple([spec.a + offset] + list(base.agent(1).coords[1:]))),
            )
            profiles.append(shifted)
    return profiles


def run_check(
    spec: MechanismSpec, norm: Norm, n: int, d: int, seed: int, budget: int
) -> tuple[ExperimentReport, int]:
    fn = resolve(spec)
    restarts = max(8, min(300, budget // 250))
    config = SearchConfig(rng_seed=seed, restarts=restarts, local_steps=20)
    profiles = _check_profiles(spec, n, d, seed)
    gen = np.random.Generator(np.random.Philox(key=seed).jumped(13))

    verdicts: list[PropertyVerdict] = []
    z_points = [Point.from_array(row) for row in gen.normal(size=(24, d)) * 2.0]
    verdicts.append(check_unanimity(spec, norm, z_points, n=n))

    shifts = [Point.from_array(row) for row in gen.normal(size=(3, d))]
    e1 = np.zeros(d)
    e1[0] = 1.0
    shifts.append(Point.from_array(1.5 * e1))
    if spec.kind == "sep2d":
        # shifts that push the first coordinate across the branch constant
        shifts.append(Point.from_array((spec.a + 1.0) * e1))
        shifts.append(Point.from_array((spec.a - 2.0) * e1))
    verdicts.append(check_translation_invariance(spec, norm, profiles[:8], shifts))

    verdicts.append(
        _sp_search_verdict(
            "strategyproof", search_sp_violation(spec, norm, n, d, config)
        )
    )
    verdicts.append(
        _sp_search_verdict(
            "group_strategyproof", search_gsp_violation(spec, norm, n, d, config)
        )
    )

    support = None
    for profile in profiles:
        v = check_support_segment(spec, profile, norm)
        if support is None or v.margin < support.margin:
            support = v
    verdicts.append(
        PropertyVerdict(
            "support_segment", support.passed, support.margin, support.witness, note=support.note
        )
    )

    verdicts.append(check_2dictatorship(spec, profiles, norm))

    cont_margin = math.inf
    cont_worst: Optional[PropertyVerdict] = None
    for profile in profiles[:6]:
        for agent in range(1, n + 1):
            base = profile.agent(agent).as_array()
            perturbations = [
                Point.from_array(base + step)
                for step in gen.normal(size=(8, d)) * 0.4
            ]
            v = check_cost_continuity(spec, profile, agent, perturbations, norm)
            if v.margin < cont_margin:
                cont_margin, cont_worst = v.margin, v
    verdicts.append(cont_worst)

    unc = None
    unanimous = Profile(tuple(z_points[0] for _ in range(n)))
    for profile in [unanimous] + profiles[:5]:
        v = check_uncompromising(spec, profile, norm)
        if unc is None or v.margin < unc.margin:
            unc = v
    verdicts.append(unc)

    expected = expected_outcomes(spec, n, d, norm)
    exit_code = 0
    for v in verdicts:
        want = expected.get(v.name, "info")
        if want == "pass" and not v.passed:
            exit_code = 1
        if want == "fail" and v.passed:
            exit_code = 1

    report = ExperimentReport(
        scenario="check",
        spec=describe(spec),
        norm=format_norm(norm),
        seed=seed,
        verdicts=verdicts,
        extra={
            "n": n,
            "d": d,
            "budget": budget,
            "strictly_convex_norm": norm.strictly_convex,
            "expected": expected,
            "d1_note": (
                "d=1 run: the dictatorship/2-dictatorship characterizations assume d >= 2"
                if d == 1
                else None
            ),
        },
    )
    return report, exit_code


# -- commands -------------------------------------------------------------------


def cmd_evaluate(args) -> int:
    started = time.perf_counter()
    try:
        profile = load_profile(args.profile)
        spec = parse_mechanism(args.mech)
        norm = parse_norm(args.norm)
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    lot = apply(spec, profile, norm)
    mc = cost_mc(lot, profile, norm)
    sc = cost_sc(lot, profile, norm)
    opt_mc = opt_max_cost(profile, norm, args.budget)
    opt_sc = opt_social_cost(profile, norm, args.budget)
    rr_mc = approx_ratio(spec, profile, norm, Objective.MAX_COST, args.budget)
    rr_sc = approx_ratio(spec, profile, norm, Objective.SOCIAL_COST, args.budget)
    cen = centroid(lot)
    rad = radius(lot, norm)

    print(f"mechanism {describe(spec)} on {profile.n} agents in d={profile.d} ({format_norm(norm)})")
    print("output lottery:")
    for w, p in lot.atoms:
        print(f"  weight {w:.17g} at {p.coords}")
    print(f"centroid {cen.coords}  radius {rad:.17g}")
    print(f"max cost      {mc:.17g}  (optimum {opt_mc.value:.17g} +/- {opt_mc.certified_gap:.3g})")
    print(f"social cost   {sc:.17g}  (optimum {opt_sc.value:.17g} +/- {opt_sc.certified_gap:.3g})")
    print(f"mc ratio      {rr_mc.ratio:.12g}  certified [{rr_mc.lo:.12g}, {rr_mc.hi:.12g}]")
    print(f"sc ratio      {rr_sc.ratio:.12g}  certified [{rr_sc.lo:.12g}, {rr_sc.hi:.12g}]")

    report = ExperimentReport(
        scenario="evaluate",
        spec=describe(spec),
        norm=format_norm(norm),
        seed=args.seed,
        objective_values={
            "mc": mc,
            "sc": sc,
            "opt_mc": opt_mc.value,
            "opt_mc_gap": opt_mc.certified_gap,
            "opt_sc": opt_sc.value,
            "opt_sc_gap": opt_sc.certified_gap,
            "mc_ratio": rr_mc.ratio,
            "mc_ratio_lo": rr_mc.lo,
            "mc_ratio_hi": rr_mc.hi,
            "sc_ratio": rr_sc.ratio,
            "sc_ratio_lo": rr_sc.lo,
            "sc_ratio_hi": rr_sc.hi,
            "radius": rad,
        },
        extra={
            "profile": profile_json(profile),
            "lottery": lottery_json(lot),
            "centroid": point_json(cen),
        },
    )
    report.runtime_ms = int((time.perf_counter() - started) * 1000)
    print(f"runtime {report.runtime_ms} ms")
    report.write(args.out)
    return 0


def cmd_check(args) -> int:
    started = time.perf_counter()
    try:
        spec = parse_mechanism(args.mech)
        norm = parse_norm(args.norm)
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    if spec.kind == "sep2d" and args.n < 3:
        print("error: sep2d needs --n >= 3", file=sys.stderr)
        return 2
    if spec.kind == "dictator" and spec.index > args.n:
        print("error: dictator index exceeds --n", file=sys.stderr)
        return 2
    report, exit_code = run_check(spec, norm, args.n, args.d, args.seed, args.budget)
    expected = report.extra["expected"]
    print(f"property suite for {report.spec} ({report.norm}, n={args.n}, d={args.d}, seed={args.seed})")
    for v in report.verdicts:
        want = expected.get(v.name, "info")
        mark = "OK" if (
            want == "info"
            or (want == "pass" and v.passed)
            or (want == "fail" and not v.passed)
        ) else "MISMATCH"
        print(
            f"  {v.name:24s} {v.status:12s} margin {v.margin:+.3e}  expected {want:4s}  {mark}"
            + (f"  [{v.note}]" if v.note else "")
        )
    if report.extra.get("d1_note"):
        print(f"note: {report.extra['d1_note']}")
    report.runtime_ms = int((time.perf_counter() - started) * 1000)
    print(f"runtime {report.runtime_ms} ms; exit {exit_code}")
    report.write(args.out)
    return exit_code


def _documented_bound(kind: str, objective: Objective, n: int) -> Optional[float]:
    if kind == "dictator":
        return 2.0 if objective is Objective.MAX_COST else float(n - 1)
    if kind == "rand_med":
        if objective is Objective.MAX_COST:
            return 1.5 if n == 2 else 2.0
        return n / 2.0
    if kind == "rand_center" and objective is Objective.MAX_COST:
        return 2.0 - 1.0 / n
    return None


def cmd_ratio(args) -> int:
    started = time.perf_counter()
    try:
        spec = parse_mechanism(args.mech)
        norm = parse_norm(args.norm)
        objective = Objective.parse(args.obj)
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    config = SearchConfig(
        rng_seed=args.seed,
        restarts=max(8, min(200, args.budget // 250)),
        local_steps=24,
    )
    result = search_worst_ratio(spec, norm, objective, args.n, args.d, config)
    bound = _documented_bound(spec.kind, objective, args.n)
    print(
        f"worst {objective.value} ratio for {describe(spec)} over n={args.n}, d={args.d}: "
        f"{result.ratio:.9f} certified [{result.lo:.9f}, {result.hi:.9f}] "
        f"({result.evaluations} evaluations)"
    )
    print(f"documented bound: {bound:.9f}" if bound is not None else "documented bound: n/a")
    print("extremal profile:")
    for p in result.profile.points:
        print(f"  {p.coords}")
    report = ExperimentReport(
        scenario="ratio",
        spec=describe(spec),
        norm=format_norm(norm),
        seed=args.seed,
        objective_values={
            "objective": objective.value,
            "ratio": result.ratio,
            "cost": result.cost,
            "opt_value": result.opt.value,
            "opt_gap": result.opt.certified_gap,
            "theory_bound": bound,
        },
        ratio_interval=(result.lo, result.hi),
        extra={
            "n": args.n,
            "d": args.d,
            "evaluations": result.evaluations,
            "profile": profile_json(result.profile),
        },
    )
    report.runtime_ms = int((time.perf_counter() - started) * 1000)
    print(f"runtime {report.runtime_ms} ms")
    report.write(args.out)
    return 0


def _scenario_l1_median(seed: int) -> tuple[ExperimentReport, int, list[str]]:
    norm = Norm(1.0)
    profile = DISCUSSION_PROFILE
    spec = MechanismSpec("coord_median")
    truthful = apply(spec, profile, norm)
    coalition = (1, 2, 3)
    mis = Point((0.0, 0.0, 0.0))
    verdict = check_group_strategyproof_at(spec, profile, coalition, [mis] * 3, norm)
    moved = profile.replaced_many(coalition, [mis] * 3)
    after = apply(spec, moved, norm)
    lines = [
        "coordinate median under L1, 3 dimensions, 5 agents",
        f"profile: {[p.coords for p in profile.points]}",
        f"truthful output: {truthful.atoms[0][1].coords}",
        f"coalition {coalition} misreports {mis.coords}",
        f"new output: {after.atoms[0][1].coords}",
    ]
    for agent, before, afterc in verdict.witness.per_agent_delta if verdict.witness else ():
        lines.append(f"  agent {agent}: cost {before:g} -> {afterc:g}")
    ok = (
        not verdict.passed
        and verdict.witness is not None
        and all(abs(b - 2.0) < GEOM_TOL and abs(a - 1.0) < GEOM_TOL
                for _, b, a in verdict.witness.per_agent_delta)
    )
    report = ExperimentReport(
        scenario="l1-median",
        spec=describe(spec),
        norm=format_norm(norm),
        seed=seed,
        verdicts=[verdict],
        witnesses=[verdict.witness] if verdict.witness else [],
        extra={
            "profile": profile_json(profile),
            "truthful_output": lottery_json(truthful),
            "post_misreport_output": lottery_json(after),
        },
    )
    return report, 0 if ok else 1, lines


def _scenario_table1(seed: int, budget: int) -> tuple[ExperimentReport, int, list[str], list[dict]]:
    norm = Norm(2.0)
    rows: list[dict] = []
    lines = ["approximation-bound summary (measured with the two-agent mixed mechanism)"]
    for objective in (Objective.MAX_COST, Objective.SOCIAL_COST):
        for n in range(2, 7):
            config = SearchConfig(
                rng_seed=seed, restarts=max(8, min(40, budget // 600)), local_steps=16
            )
            result = search_worst_ratio(
                MechanismSpec("rand_med"), norm, objective, n, 2, config
            )
            det = 2.0 if objective is Objective.MAX_COST else float(n - 1)
            rand = _documented_bound("rand_med", objective, n)
            rows.append(
                {
                    "objective": objective.value,
                    "n": n,
                    "deterministic_bound": det,
                    "randomized_bound": rand,
                    "measured_lo": result.lo,
                    "measured_hi": result.hi,
                }
            )
            lines.append(
                f"  {objective.value} n={n}: deterministic {det:g}, randomized {rand:g}, "
                f"measured [{result.lo:.6f}, {result.hi:.6f}]"
            )
    report = ExperimentReport(
        scenario="table1",
        spec="rand_med",
        norm=format_norm(norm),
        seed=seed,
        extra={"rows": rows},
    )
    return report, 0, lines, rows


def _scenario_mech2_demo(seed: int) -> tuple[ExperimentReport, int, list[str]]:
    norm = Norm(2.0)
    a = 0.0
    spec = MechanismSpec("sep2d", a=a)
    cases = [
        ("short segment (r >= a, |r-a| < ||x1-x2||)", Profile.from_rows([(2, 0), (5, 0), (0, 4)])),
        ("capped at x2 (r >= a, |r-a| >= ||x1-x2||)", Profile.from_rows([(2, 0), (3, 0), (0, 4)])),
        ("other branch (r < a, companion on x1x3)", Profile.from_rows([(-1, 0), (5, 0), (-3, 4)])),
    ]
    lines = [f"two-dictator mechanism with branch constant a={a:g}"]
    payload = []
    for label, profile in cases:
        lot = apply(spec, profile, norm)
        r = profile.agent(1).coords[0]
        lines.append(f"  case: {label}")
        lines.append(f"    profile {[p.coords for p in profile.points]} (r={r:g})")
        for w, p in lot.atoms:
            lines.append(f"    weight {w:.6f} at {p.coords}")
        payload.append(
            {
                "label": label,
                "r": r,
                "profile": profile_json(profile),
                "lottery": lottery_json(lot),
            }
        )
    report = ExperimentReport(
        scenario="mech2-demo",
        spec=describe(spec),
        norm=format_norm(norm),
        seed=seed,
        extra={"cases": payload},
    )
    return report, 0, lines


def _scenario_procaccia_n2(seed: int, budget: int) -> tuple[ExperimentReport, int, list[str]]:
    norm = Norm(2.0)
    profile = Profile.from_rows([(0, 0), (2, 0)])
    spec = MechanismSpec("rand_med")
    rr = approx_ratio(spec, profile, norm, Objective.MAX_COST, budget)
    config = SearchConfig(rng_seed=seed, restarts=20, local_steps=16)
    worst = search_worst_ratio(spec, norm, Objective.MAX_COST, 2, 2, config)
    ok = abs(rr.ratio - 1.5) <= GEOM_TOL and worst.ratio <= 1.5 + 1e-6
    lines = [
        "two-agent mixed mechanism, maximum cost",
        f"profile ((0,0),(2,0)): ratio {rr.ratio:.12f} (documented 3/2)",
        f"worst ratio over searched profiles: {worst.ratio:.12f}",
    ]
    report = ExperimentReport(
        scenario="procaccia-n2",
        spec=describe(spec),
        norm=format_norm(norm),
        seed=seed,
        objective_values={
            "ratio_at_demo_profile": rr.ratio,
            "worst_ratio": worst.ratio,
        },
        ratio_interval=(worst.lo, worst.hi),
        extra={"profile": profile_json(profile), "worst_profile": profile_json(worst.profile)},
    )
    return report, 0 if ok else 1, lines


def write_csv(path: str, rows: Sequence[dict]) -> None:
    header = ["objective", "n", "deterministic_bound", "randomized_bound", "measured_lo", "measured_hi"]
    out = [",".join(header)]
    for row in rows:
        cells = []
        for key in header:
            val = row[key]
            cells.append(f"{val:.17g}" if isinstance(val, float) else str(val))
        out.append(",".join(cells))
    Path(path).write_text("\n".join(out) + "\n", encoding="utf-8")
    print(f"csv written to {path}")


def cmd_repro(args) -> int:
    started = time.perf_counter()
    if args.scenario not in SCENARIOS:
        print(f"error: unknown scenario {args.scenario!r} (choose from {', '.join(SCENARIOS)})", file=sys.stderr)
        return 2
    rows: list[dict] = []
    if args.scenario == "l1-median":
        report, code, lines = _scenario_l1_median(args.seed)
    elif args.scenario == "table1":
        report, code, lines, rows = _scenario_table1(args.seed, args.budget)
    elif args.scenario == "mech2-demo":
        report, code, lines = _scenario_mech2_demo(args.seed)
    else:
        report, code, lines = _scenario_procaccia_n2(args.seed, args.budget)
    for line in lines:
        print(line)
    report.runtime_ms = int((time.perf_counter() - started) * 1000)
    print(f"runtime {report.runtime_ms} ms; exit {code}")
    report.write(args.out)
    if args.csv:
        if rows:
            write_csv(args.csv, rows)
        else:
            print("note: --csv only applies to the table1 scenario", file=sys.stderr)
    return code


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="facilab",
        description="Verification bench for single-facility location mechanisms in normed spaces.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("evaluate", help="run a mechanism on a profile file and price it")
    p_eval.add_argument("--profile", required=True, help="JSON file {'d': int, 'points': [[...], ...]}")
    p_eval.add_argument("--mech", required=True, help="dictator:i | rand_med | rand_center | sep2d:a=<r> | coord_median")
    p_eval.add_argument("--norm", default="lp:2", help="lp:<p>[;w=...][;A=...], p=inf allowed")
    p_eval.add_argument("--budget", type=int, default=60_000)
    p_eval.add_argument("--seed", type=int, default=0)
    p_eval.add_argument("--out", default=None, help="write the JSON report here")
    p_eval.set_defaults(func=cmd_evaluate)

    p_check = sub.add_parser("check", help="run the full property suite for a mechanism")
    p_check.add_argument("--mech", required=True)
    p_check.add_argument("--norm", default="lp:2")
    p_check.add_argument("--n", type=int, default=3)
    p_check.add_argument("--d", type=int, default=2)
    p_check.add_argument("--seed", type=int, default=0)
    p_check.add_argument("--budget", type=int, default=20_000)
    p_check.add_argument("--out", default=None)
    p_check.set_defaults(func=cmd_check)

    p_ratio = sub.add_parser("ratio", help="search for the worst-case approximation ratio")
    p_ratio.add_argument("--mech", required=True)
    p_ratio.add_argument("--norm", default="lp:2")
    p_ratio.add_argument("--obj", required=True, help="mc | sc")
    p_ratio.add_argument("--n", type=int, default=3)
    p_ratio.add_argument("--d", type=int, default=2)
    p_ratio.add_argument("--seed", type=int, default=0)
    p_ratio.add_argument("--budget", type=int, default=10_000)
    p_ratio.add_argument("--out", default=None)
    p_ratio.set_defaults(func=cmd_ratio)

    p_repro = sub.add_parser("repro", help="run a canned reproduction scenario")
    p_repro.add_argument("scenario", help=" | ".join(SCENARIOS))
    p_repro.add_argument("--seed", type=int, default=0)
    p_repro.add_argument("--budget", type=int, default=12_000)
    p_repro.add_argument("--out", default=None)
    p_repro.add_argument("--csv", default=None, help="table1 only: write the summary CSV here")
    p_repro.set_defaults(func=cmd_repro)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
