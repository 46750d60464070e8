"""Command-line harness: ``sfcrel {eval,simulate,search,sweep}``.

Exit codes: 0 success, 2 validation error, 3 infeasible search,
4 analytic/Monte Carlo disagreement (``simulate --strict`` only).
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from . import analytic, montecarlo, search
from .model import (BackupSpec, ChainSpec, ReliabilityParams, Scenario, Strategy,
                    total_backup_subchains, validate)
from .overhead import utilization
from .sweep import ConfigError, ResultRow, parse_config, run_sweep, to_csv, to_json

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_INFEASIBLE = 3
EXIT_DISAGREE = 4
DISAGREE_SE = 4.0


def probability(text: str) -> float:
    if "%" in text:
        raise argparse.ArgumentTypeError(f"percent values are not accepted: {text!r}")
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a probability: {text!r}") from None


def int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers: {text!r}") from None


def _scenario_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--strategy", required=True, choices=[s.value for s in Strategy])
    p.add_argument("--n", type=int, default=1, help="parallel sub-flows")
    p.add_argument("--psi", type=int, default=1, help="VNFs per sub-SFC")
    p.add_argument("--N", dest="n_servers", type=int, default=1, help="active servers per sub-flow (dVNF)")
    p.add_argument("--psi-split", type=int_list, default=(), help="VNFs per active server, e.g. 2,1")
    p.add_argument("--sigma", type=int, default=0, help="backup copies per backup server")
    p.add_argument("--m", type=int, default=0, help="backup servers (anbn)")
    p.add_argument("--phi", type=probability, default=1.0)
    p.add_argument("--phi-r", type=probability, default=1.0)
    p.add_argument("--upsilon", type=probability, default=1.0)
    p.add_argument("--upsilon-r", type=probability, default=1.0)


def _output_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", metavar="PATH", help="write here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sfcrel", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="closed-form service success of one scenario")
    _scenario_args(p)
    _output_args(p)

    p = sub.add_parser("simulate", help="closed form plus Monte Carlo estimate")
    _scenario_args(p)
    _output_args(p)
    p.add_argument("--trials", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--strict", action="store_true",
                   help=f"exit {EXIT_DISAGREE} when MC and analytic differ by more than {DISAGREE_SE:g} SE")

    p = sub.add_parser("search", help="minimal sigma, or maximal n with --max-n")
    _scenario_args(p)
    _output_args(p)
    p.add_argument("--target", type=probability, required=True)
    p.add_argument("--max-n", action="store_true", help="find the largest protected n for fixed sigma/m")

    p = sub.add_parser("sweep", help="run a sweep config file")
    p.add_argument("config", help="sweep config path")
    p.add_argument("--workers", type=int, default=1)
    _output_args(p)
    return parser


def scenario_from_args(args) -> Scenario:
    return Scenario(
        Strategy.parse(args.strategy),
        ReliabilityParams(args.phi, args.phi_r, args.upsilon, args.upsilon_r),
        ChainSpec(args.n, args.psi, args.n_servers, args.psi_split),
        BackupSpec(args.sigma, args.m),
    )


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_rows(rows: list[ResultRow], args) -> None:
    _emit(to_json(rows) if args.format == "json" else to_csv(rows), args.out)


def _emit_records(records: list[dict], args) -> None:
    if args.format == "json":
        _emit(json.dumps(records, indent=2) + "\n", args.out)
        return
    cols = list(records[0])
    lines = [",".join(cols)]
    for r in records:
        lines.append(",".join(format(v, ".17g") if isinstance(v, float) else str(v) for v in r.values()))
    _emit("\n".join(lines) + "\n", args.out)


def _valid_or_exit(sc: Scenario) -> bool:
    check = validate(sc)
    if not check.ok:
        print(f"error: {check}", file=sys.stderr)
    return check.ok


def cmd_eval(args) -> int:
    sc = scenario_from_args(args)
    if not _valid_or_exit(sc):
        return EXIT_INVALID
    _emit_rows([ResultRow.for_scenario(sc, analytic.evaluate(sc))], args)
    return EXIT_OK


def cmd_simulate(args) -> int:
    sc = scenario_from_args(args)
    if not _valid_or_exit(sc):
        return EXIT_INVALID
    if args.trials < 1:
        print("error: trials must be >= 1", file=sys.stderr)
        return EXIT_INVALID
    value = analytic.evaluate(sc)
    est = montecarlo.estimate(sc, args.trials, args.seed, workers=args.workers)
    row = ResultRow.for_scenario(sc, value)
    row.mc_mean, row.mc_ci_low, row.mc_ci_high = est.mean, est.ci_low, est.ci_high
    _emit_rows([row], args)
    se = math.sqrt(value * (1.0 - value) / args.trials)
    gap = abs(est.mean - value)
    if gap > DISAGREE_SE * se and gap > 0.0:
        print(f"warning: Monte Carlo mean {est.mean:.10g} differs from analytic {value:.10g} "
              f"by {gap / se if se else math.inf:.2f} SE", file=sys.stderr)
        if args.strict:
            return EXIT_DISAGREE
    return EXIT_OK


def cmd_search(args) -> int:
    sc = scenario_from_args(args)
    if not _valid_or_exit(sc):
        return EXIT_INVALID
    try:
        if args.max_n:
            n = search.max_protected_n(sc.strategy, sc.params, sc.psi_total, sc.sigma, sc.backup.m,
                                       args.target, n_servers=sc.chain.n_servers)
            if n == 0:
                print(f"infeasible: no n <= 64 reaches {args.target}", file=sys.stderr)
                return EXIT_INFEASIBLE
            best = sc.with_(n=n)
            record = {"strategy": sc.strategy.value, "n": n, "psi_total": best.psi_total,
                      "n_servers": best.chain.n_servers, "sigma": best.sigma, "m": best.backup.m,
                      "sigma_total": total_backup_subchains(best),
                      "achieved": analytic.evaluate(best), "omega": utilization(best)}
        else:
            res = search.min_sigma(sc.strategy, sc.params, sc.chain, sc.backup.m, args.target)
            record = {"strategy": sc.strategy.value, "n": sc.n, "psi_total": sc.psi_total,
                      "n_servers": res.scenario.chain.n_servers, "sigma": res.sigma_min,
                      "m": sc.backup.m, "sigma_total": res.sigma_total,
                      "achieved": res.achieved, "omega": res.omega}
    except search.InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    _emit_records([record], args)
    return EXIT_OK


def cmd_sweep(args) -> int:
    try:
        with open(args.config) as fh:
            spec = parse_config(fh.read())
        rows = run_sweep(spec, workers=args.workers)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    _emit_rows(rows, args)
    return EXIT_OK


COMMANDS = {"eval": cmd_eval, "simulate": cmd_simulate, "search": cmd_search, "sweep": cmd_sweep}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return COMMANDS[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
