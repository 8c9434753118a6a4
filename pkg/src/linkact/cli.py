"""Command-line front end.

Exit codes: 0 success, 2 usage error, 3 invalid solution (``check``),
4 I/O or parse error, 5 solver budget exhausted (best incumbent still
written). Link indices are 1-based in every file and printout; the library
uses 0-based indices internally.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

import numpy as np

from . import __version__
from .errors import LinkactError, ParseError, StructuralError
from .feasibility import Scheme, SchemeConfig, Solution, verify_solution
from .harness import (
    StudySpec,
    run_study,
    write_records_csv,
    write_summary_csv,
)
from .ilpgen import assignment_to_solution, emit_model, read_assignment
from .instance import Instance, TopologySpec, generate, read_instance, write_instance
from .solver import SolveStatus, canonical_weight, solve_exact
from .units import db_to_linear

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INVALID = 3
EXIT_IO = 4
EXIT_TIME_LIMIT = 5


def _add_threshold_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--gamma-db", type=float, help="uniform SINR threshold in dB")
    p.add_argument("--gamma-lin", type=float, help="uniform SINR threshold, linear")
    p.add_argument(
        "--weights",
        default=None,
        help="unit | rate | file:PATH (default: weights from the instance file, else unit)",
    )


def _resolve_instance(args) -> Instance:
    inst = read_instance(args.instance)
    if args.gamma_db is not None and args.gamma_lin is not None:
        raise ParseError("give at most one of --gamma-db / --gamma-lin")
    if args.gamma_db is not None:
        inst = inst.with_thresholds(db_to_linear(args.gamma_db))
    elif args.gamma_lin is not None:
        if args.gamma_lin <= 0:
            raise ParseError("--gamma-lin must be positive")
        inst = inst.with_thresholds(args.gamma_lin)
    elif inst.thresholds is None:
        raise ParseError("instance has no thresholds; pass --gamma-db or --gamma-lin")
    rule = args.weights
    if rule is None:
        if inst.weights is None:
            inst = inst.with_weights(1.0)
    elif rule == "unit":
        inst = inst.with_weights(1.0)
    elif rule == "rate":
        inst = inst.with_weights(np.log2(1.0 + inst.thresholds))
    elif rule.startswith("file:"):
        path = rule[5:]
        with open(path, "r", encoding="utf-8") as fh:
            vals = [float(tok) for tok in fh.read().split()]
        if len(vals) != inst.K:
            raise ParseError(f"weights file must list {inst.K} values")
        inst = inst.with_weights(vals)
    else:
        raise ParseError(f"unknown weights rule {rule!r}")
    return inst


def _scheme_config(scheme: str, stage_cap: Optional[int]) -> SchemeConfig:
    name = scheme.upper()
    if name in ("SIC-COMMON", "SIC-GENERAL"):
        name = "SIC"
    return SchemeConfig(Scheme(name), stage_cap=stage_cap)


def solution_to_doc(sol: Solution, scheme: str, stage_cap, status, nodes, wall_ms) -> dict:
    return {
        "scheme": scheme,
        "stage_cap": stage_cap,
        "active": [k + 1 for k in sol.active],
        "cancels": {str(k + 1): [m + 1 for m in ms] for k, ms in sorted(sol.cancels.items())},
        "weight": sol.weight,
        "status": status,
        "nodes_explored": nodes,
        "wall_ms": wall_ms,
    }


def solution_from_doc(doc: dict, K: int) -> Solution:
    try:
        active = tuple(int(a) - 1 for a in doc["active"])
        cancels = {
            int(k) - 1: tuple(int(m) - 1 for m in ms) for k, ms in doc.get("cancels", {}).items()
        }
        weight = float(doc.get("weight", 0.0))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed solution document: {exc}") from exc
    for idx in active:
        if not 0 <= idx < K:
            raise ParseError(f"active link {idx + 1} out of range 1..{K}")
    return Solution(active=active, cancels=cancels, weight=weight)


def _cmd_gen(args) -> int:
    spec = TopologySpec(
        dataset=args.dataset,
        density=args.density,
        K=args.links,
        seed=args.seed,
        pathloss_exponent=args.alpha,
        tx_power_dbm=args.tx_power_dbm,
        noise_dbm=args.noise_dbm,
        min_link_m=args.min_link_m,
        max_link_m=args.max_link_m,
        feasibility_threshold_db=args.feasibility_threshold_db,
    )
    write_instance(generate(spec), args.output)
    return EXIT_OK


def _cmd_solve(args) -> int:
    inst = _resolve_instance(args)
    cfg = _scheme_config(args.scheme, args.stage_cap)
    report = solve_exact(inst, cfg, budget_s=args.budget)
    doc = solution_to_doc(
        report.solution,
        args.scheme.upper(),
        cfg.stage_cap,
        report.status.value,
        report.nodes_explored,
        report.wall_time_s * 1000.0,
    )
    text = json.dumps(doc, indent=2) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    sys.stdout.write(text)
    return EXIT_TIME_LIMIT if report.status is SolveStatus.TIME_LIMIT else EXIT_OK


def _cmd_check(args) -> int:
    inst = _resolve_instance(args)
    with open(args.solution, "r", encoding="utf-8") as fh:
        text = fh.read()
    stripped = text.lstrip()
    scheme = args.scheme.lower()
    cfg = _scheme_config(scheme, args.stage_cap)
    if stripped.startswith("{"):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"solution file is not valid JSON: {exc}") from exc
        sol = solution_from_doc(doc, inst.K)
    else:
        formulation = scheme
        if scheme == "sic":
            # flat cancellation variables order by the margin sort, which is
            # only meaningful under a common threshold; staged variables
            # carry their order explicitly
            uniform = float(np.min(inst.thresholds)) == float(np.max(inst.thresholds))
            formulation = "sic-common" if uniform else "sic-general"
        sol = assignment_to_solution(inst, formulation, read_assignment(text))
    try:
        ok, violation = verify_solution(inst, cfg, sol)
    except StructuralError as exc:
        print(f"structural error: {exc}")
        return EXIT_INVALID
    if not ok:
        where = f"link {violation.link + 1}"
        if violation.interferer is not None:
            where += f", cancelling link {violation.interferer + 1}"
        if violation.stage is not None:
            where += f" at stage {violation.stage}"
        print(f"invalid: {violation.kind} condition fails at {where}")
        return EXIT_INVALID
    if inst.weights is not None and sol.active:
        expect = canonical_weight(inst.weights, sol.active)
        if abs(sol.weight - expect) > 1e-6 * max(1.0, abs(expect)):
            print(f"invalid: stated weight {sol.weight} != recomputed {expect}")
            return EXIT_INVALID
    print(f"valid: {len(sol.active)} active links")
    return EXIT_OK


def _cmd_emit_ilp(args) -> int:
    inst = _resolve_instance(args)
    model = emit_model(
        inst,
        args.scheme,
        stage_cap=args.stage_cap,
        apply_preprocess=not args.no_preprocess,
    )
    if args.format != "lp":
        raise ParseError(f"unknown model format {args.format!r}")
    with open(args.output, "w", encoding="utf-8") as fh:
        fh.write(model.lp_text())
    return EXIT_OK


def _cmd_reduce(args) -> int:
    inst = _resolve_instance(args)
    from .solver import reduce_sud_to_pic

    out = reduce_sud_to_pic(inst, epsilon=args.epsilon)
    write_instance(out, args.output)
    return EXIT_OK


def _cmd_experiment(args) -> int:
    spec = StudySpec(
        datasets=tuple(args.datasets.split(",")),
        k_values=tuple(int(v) for v in args.k_values.split(",")),
        seeds_per_cell=args.seeds,
        study="common_threshold" if args.study == 1 else "individual_threshold",
        thresholds_db=tuple(float(v) for v in args.gammas_db.split(",")),
        t_values=tuple(int(v) for v in args.t_values.split(",")),
        weights_rule="unit" if args.study == 1 else "rate",
        budget_per_solve_s=args.budget,
        seed_base=args.seed_base,
    )
    records = run_study(spec, jobs=args.jobs)
    write_records_csv(records, args.output)
    if args.summary_out:
        write_summary_csv(records, args.summary_out)
    timeouts = sum(1 for r in records if r.status != SolveStatus.OPTIMAL.value)
    print(f"wrote {len(records)} records to {args.output}" + (f" ({timeouts} hit the budget)" if timeouts else ""))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="linkact",
        description="Maximum-weight SINR-feasible link activation with interference cancellation",
    )
    parser.add_argument("--version", action="version", version=f"linkact {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a random topology instance")
    p.add_argument("--dataset", choices=("I", "N"), required=True)
    p.add_argument("--density", choices=("sparse", "dense"), required=True)
    p.add_argument("-K", "--links", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--alpha", type=float, default=4.0, help="path-loss exponent")
    p.add_argument("--tx-power-dbm", type=float, default=30.0)
    p.add_argument("--noise-dbm", type=float, default=-100.0)
    p.add_argument("--min-link-m", type=float, default=3.0)
    p.add_argument("--max-link-m", type=float, default=200.0)
    p.add_argument("--feasibility-threshold-db", type=float, default=6.0)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("solve", help="solve for the maximum-weight activation set")
    p.add_argument("-i", "--instance", required=True)
    p.add_argument("--scheme", choices=("sud", "slic", "pic", "sic"), required=True)
    p.add_argument("-T", "--stage-cap", type=int, default=None, help="SIC stage cap")
    _add_threshold_flags(p)
    p.add_argument("--budget", type=float, default=None, help="time budget in seconds")
    p.add_argument("-o", "--output", help="also write the solution document here")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("check", help="validate a solution file against an instance")
    p.add_argument("-i", "--instance", required=True)
    p.add_argument("--solution", required=True)
    p.add_argument(
        "--scheme",
        choices=("sud", "slic", "pic", "sic", "sic-common", "sic-general"),
        required=True,
    )
    p.add_argument("-T", "--stage-cap", type=int, default=None)
    _add_threshold_flags(p)
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("emit-ilp", help="write an LP-format model file")
    p.add_argument("-i", "--instance", required=True)
    p.add_argument(
        "--scheme",
        choices=("sud", "slic", "pic", "sic-common", "sic-general"),
        required=True,
    )
    p.add_argument("-T", "--stage-cap", type=int, default=None)
    _add_threshold_flags(p)
    p.add_argument("--format", default="lp")
    p.add_argument("--no-preprocess", action="store_true", help="skip variable fixings")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_emit_ilp)

    p = sub.add_parser("reduce", help="apply the SUD-to-PIC embedding transform")
    p.add_argument("-i", "--instance", required=True)
    p.add_argument("--epsilon", type=float, default=None)
    _add_threshold_flags(p)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_reduce)

    p = sub.add_parser("experiment", help="run a seeded study sweep, writing CSV")
    p.add_argument("--study", type=int, choices=(1, 2), required=True)
    p.add_argument("--datasets", default="I-sparse,I-dense,N-sparse,N-dense")
    p.add_argument("--k-values", default="5,10,15,20,25,30")
    p.add_argument("--seeds", type=int, default=30)
    p.add_argument("--seed-base", type=int, default=1)
    p.add_argument("--gammas-db", default="-9,-6,-3,0,3,6")
    p.add_argument("--t-values", default="0,1,2,3,4,5")
    p.add_argument("--budget", type=float, default=120.0, help="per-solve budget, seconds")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--summary-out", default=None)
    p.set_defaults(func=_cmd_experiment)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, LinkactError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
